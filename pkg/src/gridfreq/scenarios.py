"""Rescaling of the calibrated reference model to other dispatch snapshots.

A :class:`ReferenceAnchor` characterizes the system at the calibration
instant: the estimated parameter set, the dispatch mix at that instant and
the per-technology inertia split. Droops, damping and the generation
parcel of the inertia are then rescaled to any other snapshot:

* droop:    r_t = r_o * pg_o / pg_t           (per technology)
* damping:  d_t = d_o * pd_t / pd_o           (per area load)
* inertia:  h_t = h_o * pg_t / pg_o           (per technology parcel)

The load inertia parcel is held constant across snapshots (optional
proportional-to-load scaling is available as a switch, default off).
Technologies dispatched at zero are removed from the model entirely; the
tie coefficient and governor time constants are never rescaled.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .metrics import DEFAULT_TAIL_S, DEFAULT_WINDOWS_MS, MetricsReport, compute_report
from .model import (
    AreaModel,
    Disturbance,
    GenerationBlock,
    ModelError,
    TechnologyKind,
    TwoAreaSystem,
)
from .simulator import SimConfig, SimulationDivergedError, simulate

__all__ = [
    "SYNCHRONOUS_TECHS",
    "DispatchSnapshot",
    "MitigationSpec",
    "TrajectoryEntry",
    "ScenarioTrajectory",
    "ReferenceAnchor",
    "scale_droop",
    "scale_damping",
    "split_inertia",
    "scale_inertia",
    "with_inertia_split",
    "apply_snapshot",
    "apply_mitigation",
    "halve_small_steam",
    "SweepRow",
    "sweep",
]

#: Technologies whose machines are synchronously coupled (contribute inertia).
SYNCHRONOUS_TECHS = ("nuclear", "coal", "ccgt", "hydro", "small_steam")

#: Name of the inertia-only block added by synchronous-condenser mitigation.
SC_BLOCK_NAME = "sync_condenser"


@dataclass(frozen=True)
class DispatchSnapshot:
    """Per-technology generation (GW) and load (GW) of one area at one instant.

    Only ratios against the reference mix matter to the model; the listed
    technologies need not sum to the load (net import is not enforced).
    Keys outside the synchronous set (wind, solar_pv, net imports) are
    carried for documentation and ignored by the rescaling.
    """

    id: str
    area: str
    pg: dict[str, float]
    load: float

    def __post_init__(self) -> None:
        if self.area.upper() not in ("IP", "CE"):
            raise ModelError(f"snapshot[{self.id}].area: must be 'IP' or 'CE'")
        object.__setattr__(self, "area", self.area.upper())
        for tech, value in self.pg.items():
            if value < 0:
                raise ModelError(f"snapshot[{self.id}].pg[{tech}]: must be >= 0")
        if not self.load > 0:
            raise ModelError(f"snapshot[{self.id}].load: must be positive")


@dataclass(frozen=True)
class MitigationSpec:
    """Synchronous condensers added to the IP area from ``online_from`` on."""

    count: int = 3
    h_each: float = 4.0  # s, on the unit's own rating
    rating_each: float = 0.25  # GVA
    online_from: int = 2025

    def __post_init__(self) -> None:
        if self.count < 0:
            raise ModelError("mitigation.count: must be >= 0")
        if self.h_each < 0 or self.rating_each < 0:
            raise ModelError("mitigation: inertia and rating must be >= 0")

    def added_inertia(self, s_base: float) -> float:
        return self.count * self.h_each * self.rating_each / s_base


@dataclass(frozen=True)
class TrajectoryEntry:
    year: int
    month: int | None
    ip: DispatchSnapshot
    ce: DispatchSnapshot

    @property
    def scenario_suffix(self) -> str:
        if self.month is None:
            return str(self.year)
        return f"{self.year}-{self.month:02d}"

    @property
    def sort_key(self) -> tuple[int, int]:
        return (self.year, self.month or 0)


@dataclass(frozen=True)
class ScenarioTrajectory:
    """Ordered sequence of dispatch snapshots plus variant flags."""

    name: str
    entries: tuple[TrajectoryEntry, ...]
    small_steam_halving: bool = False
    mitigation: MitigationSpec | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        keys = [e.sort_key for e in self.entries]
        if any(b <= a for a, b in zip(keys, keys[1:])):
            raise ModelError(f"trajectory[{self.name}]: snapshots must be strictly ordered in time")


@dataclass(frozen=True)
class ReferenceAnchor:
    """Calibrated model plus the dispatch mix it was calibrated at.

    The per-technology inertia split is carried on the model's blocks
    (``h_contrib``) together with the area ``h_load`` parcel.
    """

    system: TwoAreaSystem
    mix_ip: DispatchSnapshot
    mix_ce: DispatchSnapshot

    def __post_init__(self) -> None:
        s_base = self.system.base.s_base
        for area, mix in ((self.system.area_ip, self.mix_ip), (self.system.area_ce, self.mix_ce)):
            if mix.area != area.id:
                raise ModelError(f"anchor mix for {area.id}: wrong area id {mix.area!r}")
            for block in area.blocks:
                pg_gw = mix.pg.get(block.name)
                if pg_gw is None:
                    raise ModelError(
                        f"anchor mix for {area.id}: missing technology {block.name!r}"
                    )
                if abs(pg_gw / s_base - block.pg) > 1e-9:
                    raise ModelError(
                        f"anchor mix for {area.id}: dispatch of {block.name!r} "
                        f"disagrees with the model blocks"
                    )

    def mix(self, area_id: str) -> DispatchSnapshot:
        return self.mix_ip if area_id.upper() == "IP" else self.mix_ce


# --------------------------------------------------------------------------- #
# Scaling laws
# --------------------------------------------------------------------------- #


def scale_droop(r_oi: float, pg_oi: float, pg_ti: float) -> float:
    """Rescale a technology droop from reference dispatch to new dispatch."""
    if pg_oi <= 0:
        raise ValueError("scale_droop: reference dispatch pg_oi must be positive")
    if pg_ti <= 0:
        raise ValueError(
            "scale_droop: zero target dispatch removes the block from FCR; "
            "drop the block instead of scaling"
        )
    return r_oi * pg_oi / pg_ti


def scale_damping(d_o: float, pd_o: float, pd_t: float) -> float:
    """Rescale load damping proportionally to the system load."""
    if pd_o <= 0:
        raise ValueError("scale_damping: reference load pd_o must be positive")
    if pd_t <= 0:
        raise ValueError("scale_damping: target load pd_t must be positive")
    return d_o * pd_t / pd_o


def split_inertia(
    h_o: float, mix_o: DispatchSnapshot, typical_h: dict[str, float], s_base: float
) -> tuple[dict[str, float], float]:
    """Split a total area inertia into per-technology parcels plus load share.

    Uses typical per-unit inertia constants (on the machine's own rating,
    dispatch taken as the rating proxy) converted to the common base.
    """
    parcels: dict[str, float] = {}
    for tech in SYNCHRONOUS_TECHS:
        pg = mix_o.pg.get(tech, 0.0)
        if pg <= 0:
            continue
        if tech not in typical_h:
            raise ValueError(f"split_inertia: typical inertia table misses {tech!r}")
        parcels[tech] = typical_h[tech] * pg / s_base
    h_load = h_o - sum(parcels.values())
    if h_load < 0:
        raise ValueError(
            "split_inertia: typical inertia table inconsistent with estimated H "
            f"(load share would be {h_load:.6g} s)"
        )
    return parcels, h_load


def scale_inertia(h_oi: float, pg_oi: float, pg_ti: float) -> float:
    """Rescale one technology inertia parcel with its dispatch."""
    if pg_oi <= 0:
        raise ValueError("scale_inertia: reference dispatch pg_oi must be positive")
    return h_oi * pg_ti / pg_oi


def with_inertia_split(
    sys: TwoAreaSystem,
    mix_ip: DispatchSnapshot,
    mix_ce: DispatchSnapshot,
    typical_h: dict[str, float],
) -> TwoAreaSystem:
    """Populate per-block inertia parcels from a typical-inertia table.

    Leaves every total area inertia unchanged; the remainder becomes the
    load inertia share.
    """
    s_base = sys.base.s_base

    def rebuild(area: AreaModel, mix: DispatchSnapshot) -> AreaModel:
        parcels, h_load = split_inertia(area.h, mix, typical_h, s_base)
        blocks = tuple(
            replace(b, h_contrib=parcels.get(b.name, 0.0)) for b in area.blocks
        )
        assigned = {b.name for b in blocks}
        dangling = set(parcels) - assigned
        if dangling:
            raise ValueError(
                f"split_inertia: technologies {sorted(dangling)} have inertia "
                f"parcels but no model block in area {area.id}"
            )
        return replace(area, h_load=h_load, blocks=blocks)

    return replace(
        sys,
        area_ip=rebuild(sys.area_ip, mix_ip),
        area_ce=rebuild(sys.area_ce, mix_ce),
    )


# --------------------------------------------------------------------------- #
# Snapshot application and mitigation
# --------------------------------------------------------------------------- #


def apply_snapshot(
    anchor: ReferenceAnchor,
    snap_ip: DispatchSnapshot,
    snap_ce: DispatchSnapshot,
    scale_load_inertia: bool = False,
) -> TwoAreaSystem:
    """Build the system representing a new dispatch snapshot.

    Applying the anchor's own mix returns the reference model exactly
    (fixed point of the mapping).
    """
    sys = anchor.system
    s_base = sys.base.s_base

    def rebuild(area: AreaModel, mix_o: DispatchSnapshot, snap: DispatchSnapshot) -> AreaModel:
        blocks: list[GenerationBlock] = []
        for block in area.blocks:
            pg_o = mix_o.pg[block.name]
            pg_t = snap.pg.get(block.name, 0.0)
            if pg_t <= 0:
                continue  # decommissioned: no FCR loop, no inertia parcel
            governor = block.governor
            if block.fcr_enabled and governor is not None:
                governor = replace(governor, r=scale_droop(governor.r, pg_o, pg_t))
            blocks.append(
                replace(
                    block,
                    pg=pg_t / s_base,
                    h_contrib=scale_inertia(block.h_contrib, pg_o, pg_t),
                    governor=governor,
                )
            )
        h_load = area.h_load
        if scale_load_inertia:
            h_load = area.h_load * snap.load / mix_o.load
        h = h_load + sum(b.h_contrib for b in blocks)
        d = scale_damping(area.d, mix_o.load, snap.load)
        return replace(area, h=h, h_load=h_load, d=d, blocks=tuple(blocks))

    return replace(
        sys,
        area_ip=rebuild(sys.area_ip, anchor.mix_ip, snap_ip),
        area_ce=rebuild(sys.area_ce, anchor.mix_ce, snap_ce),
    )


def apply_mitigation(
    sys: TwoAreaSystem, spec: MitigationSpec | None, year: int
) -> TwoAreaSystem:
    """Add the synchronous-condenser inertia to the IP area when active."""
    if spec is None or spec.count == 0 or year < spec.online_from:
        return sys
    dh = spec.added_inertia(sys.base.s_base)
    area = sys.area_ip
    sc_block = GenerationBlock(
        name=SC_BLOCK_NAME,
        kind=TechnologyKind.STEAM_TGOV1,
        pg=0.0,
        h_contrib=dh,
        fcr_enabled=False,
    )
    return replace(
        sys,
        area_ip=replace(area, h=area.h + dh, blocks=area.blocks + (sc_block,)),
    )


def halve_small_steam(snap: DispatchSnapshot, year: int) -> DispatchSnapshot:
    """Small-steam reduction variant: linear decline after 2030 to half by 2040."""
    if year <= 2030 or "small_steam" not in snap.pg:
        return snap
    factor = max(0.5, 1.0 - 0.05 * (year - 2030))
    pg = dict(snap.pg)
    pg["small_steam"] = pg["small_steam"] * factor
    return replace(snap, pg=pg)


# --------------------------------------------------------------------------- #
# Sweep
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class SweepRow:
    scenario_id: str
    year: int
    month: int | None
    area: str
    status: str  # "ok" or an error message
    report: MetricsReport | None


REFERENCE_DISTURBANCE = Disturbance(area="IP", dp=0.1, t_start=1.0)


def sweep(
    anchor: ReferenceAnchor,
    trajectory: ScenarioTrajectory,
    dist: Disturbance = REFERENCE_DISTURBANCE,
    cfg: SimConfig | None = None,
    windows_ms: tuple[float, ...] = DEFAULT_WINDOWS_MS,
    tail_s: float = DEFAULT_TAIL_S,
) -> list[SweepRow]:
    """Simulate the reference disturbance for every snapshot of a trajectory.

    Produces one row per snapshot per area in deterministic order.
    Per-snapshot failures are recorded in the row status and the sweep
    continues; only invalid global inputs raise.
    """
    cfg = cfg or SimConfig()
    rows: list[SweepRow] = []
    for entry in trajectory.entries:
        scenario_id = f"{trajectory.name}-{entry.scenario_suffix}"
        snap_ip = entry.ip
        if trajectory.small_steam_halving:
            snap_ip = halve_small_steam(snap_ip, entry.year)
        try:
            sys = apply_snapshot(anchor, snap_ip, entry.ce)
            sys = apply_mitigation(sys, trajectory.mitigation, entry.year)
            trace = simulate(sys, dist, cfg)
            for area in ("IP", "CE"):
                report = compute_report(trace, area, windows_ms, tail_s)
                rows.append(SweepRow(scenario_id, entry.year, entry.month, area, "ok", report))
        except (ModelError, ValueError, SimulationDivergedError) as exc:
            for area in ("IP", "CE"):
                rows.append(
                    SweepRow(scenario_id, entry.year, entry.month, area, f"error: {exc}", None)
                )
    return rows
