"""Domain types for the two-area electromechanical frequency model.

Conventions used throughout the package:

* All powers and inertia constants are expressed on one common apparent
  power base (``SystemBase.s_base``, GVA). There are no per-machine bases.
* Frequencies in Hz, angles in electrical radians, time constants in
  seconds, droops in p.u. frequency per p.u. power on the common base.
* A positive disturbance ``dp`` is a generation loss, modeled as an
  equivalent load step on the disturbed area.

All types are immutable after construction and safe to share between
concurrent readers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping

__all__ = [
    "ModelError",
    "TechnologyKind",
    "SystemBase",
    "GovernorParams",
    "GenerationBlock",
    "AreaModel",
    "TieLine",
    "TwoAreaSystem",
    "Disturbance",
    "build_system",
    "system_to_config",
    "validate_decomposition",
]

DECOMPOSITION_TOL = 1e-9


class ModelError(ValueError):
    """A model configuration violates a structural invariant.

    The message always names the offending field.
    """


class TechnologyKind(str, Enum):
    """Equivalent turbine-governor families for the technology loops."""

    STEAM_TGOV1 = "steam_tgov1"  # coal, nuclear, small steam turbines
    GAS_GAST = "gas_gast"  # CCGT / OCGT
    HYDRO_CLASSIC = "hydro_classic"  # conventional hydro

    @classmethod
    def parse(cls, value: str, where: str = "kind") -> "TechnologyKind":
        try:
            return cls(value)
        except ValueError:
            known = ", ".join(k.value for k in cls)
            raise ModelError(
                f"{where}: unknown technology kind {value!r} (known: {known})"
            ) from None


@dataclass(frozen=True)
class SystemBase:
    """Common apparent power base (GVA) and nominal frequency (Hz)."""

    s_base: float = 10.0
    f0: float = 50.0

    def __post_init__(self) -> None:
        if not self.s_base > 0:
            raise ModelError("base.s_base: apparent power base must be positive")
        if not self.f0 > 0:
            raise ModelError("base.f0: nominal frequency must be positive")


@dataclass(frozen=True)
class GovernorParams:
    """Parameters of one equivalent turbine-governor loop.

    ``tg`` is the governor (first lag) time constant for every kind; for
    the gas turbine family it doubles as the fuel-valve lag that heads the
    three-lag chain (the field commonly called T1), so configuration files
    may spell it ``t1``.

    Kind-specific constants:

    * ``STEAM_TGOV1`` -- ``t2``/``t3`` turbine lead/lag, ``dt`` turbine damping.
    * ``GAS_GAST``    -- ``t2``/``t3`` remaining lags, ``lmax`` load limit,
      ``kt`` temperature-loop gain.
    * ``HYDRO_CLASSIC`` -- ``rt`` transient droop, ``tr`` reset time,
      ``tw`` water starting time.
    """

    kind: TechnologyKind
    r: float
    tg: float
    t2: float | None = None
    t3: float | None = None
    dt: float = 0.0
    lmax: float | None = None
    kt: float | None = None
    rt: float | None = None
    tr: float | None = None
    tw: float | None = None

    def __post_init__(self) -> None:
        w = f"governor[{self.kind.value}]"
        if not self.r > 0:
            raise ModelError(f"{w}.r: droop must be positive")
        if not self.tg > 0:
            raise ModelError(f"{w}.tg: governor time constant must be positive")
        if self.kind is TechnologyKind.STEAM_TGOV1:
            self._require_positive(w, "t2", "t3")
            if self.dt < 0:
                raise ModelError(f"{w}.dt: turbine damping must be non-negative")
        elif self.kind is TechnologyKind.GAS_GAST:
            self._require_positive(w, "t2", "t3")
            if self.lmax is None or self.lmax < 0:
                raise ModelError(f"{w}.lmax: load limit must be non-negative")
            if self.kt is None or self.kt < 0:
                raise ModelError(f"{w}.kt: temperature gain must be non-negative")
        elif self.kind is TechnologyKind.HYDRO_CLASSIC:
            self._require_positive(w, "tr", "tw")
            if self.rt is None or not self.rt > 0:
                raise ModelError(f"{w}.rt: transient droop must be positive")
            if self.rt < self.r:
                raise ModelError(
                    f"{w}.rt: transient droop must be >= steady-state droop r"
                )

    def _require_positive(self, w: str, *names: str) -> None:
        for name in names:
            value = getattr(self, name)
            if value is None or not value > 0:
                raise ModelError(f"{w}.{name}: missing or non-positive time constant")


#: Number of internal governor states per technology kind.
GOVERNOR_STATE_COUNT = {
    TechnologyKind.STEAM_TGOV1: 2,
    TechnologyKind.GAS_GAST: 3,
    TechnologyKind.HYDRO_CLASSIC: 3,
}


@dataclass(frozen=True)
class GenerationBlock:
    """One equivalent technology loop of an area.

    A block with ``fcr_enabled=False`` has no governor and contributes only
    inertia (e.g. Iberian nuclear and the small steam turbine fleet).
    """

    name: str
    kind: TechnologyKind
    pg: float
    h_contrib: float
    fcr_enabled: bool
    governor: GovernorParams | None = None

    def __post_init__(self) -> None:
        w = f"block[{self.name}]"
        if self.pg < 0:
            raise ModelError(f"{w}.pg: dispatched power must be non-negative")
        if self.h_contrib < 0:
            raise ModelError(f"{w}.h_contrib: inertia contribution must be non-negative")
        if self.fcr_enabled and self.governor is None:
            raise ModelError(f"{w}.governor: missing governor for FCR-enabled block")
        if not self.fcr_enabled and self.governor is not None:
            raise ModelError(
                f"{w}.governor: inertia-only block must not carry governor parameters"
            )
        if self.governor is not None and self.governor.kind is not self.kind:
            raise ModelError(f"{w}.governor.kind: does not match block kind")

    @property
    def n_states(self) -> int:
        return GOVERNOR_STATE_COUNT[self.kind] if self.fcr_enabled else 0


@dataclass(frozen=True)
class AreaModel:
    """One control area: swing-equation constants plus technology blocks."""

    id: str
    h: float
    h_load: float
    d: float
    blocks: tuple[GenerationBlock, ...] = ()

    def __post_init__(self) -> None:
        area = f"area_{self.id.lower()}"
        if self.id not in ("IP", "CE"):
            raise ModelError(f"{area}.id: must be 'IP' or 'CE'")
        if self.h_load < 0:
            raise ModelError(f"{area}.h_load: load inertia must be non-negative")
        if self.h < self.h_load:
            raise ModelError(f"{area}.h: total inertia must be >= load inertia share")
        if self.d < 0:
            raise ModelError(f"{area}.d: damping must be non-negative")
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if any(b.h_contrib != 0.0 for b in self.blocks):
            if not validate_decomposition(self):
                raise ModelError(
                    f"{area}.h: inertia decomposition mismatch, "
                    f"h != h_load + sum of block contributions"
                )


def validate_decomposition(area: AreaModel) -> bool:
    """True iff the area inertia splits additively into load + block parcels."""
    total = area.h_load + sum(b.h_contrib for b in area.blocks)
    return abs(area.h - total) <= DECOMPOSITION_TOL


@dataclass(frozen=True)
class TieLine:
    """Synchronizing torque coefficient of the interconnection, p.u./rad.

    ``t_coeff = 0`` models islanded operation.
    """

    t_coeff: float

    def __post_init__(self) -> None:
        if self.t_coeff < 0:
            raise ModelError("tie.t_coeff: synchronizing coefficient must be >= 0")


@dataclass(frozen=True)
class TwoAreaSystem:
    """Complete parametrized dynamic model of the interconnected system."""

    base: SystemBase
    area_ip: AreaModel
    area_ce: AreaModel
    tie: TieLine

    def __post_init__(self) -> None:
        if self.area_ip.id != "IP":
            raise ModelError("area_ip.id: must be 'IP'")
        if self.area_ce.id != "CE":
            raise ModelError("area_ce.id: must be 'CE'")
        for area in (self.area_ip, self.area_ce):
            if not area.h > 0:
                raise ModelError(f"area_{area.id.lower()}.h: inertia must be positive")

    def area(self, area_id: str) -> AreaModel:
        key = area_id.upper()
        if key == "IP":
            return self.area_ip
        if key == "CE":
            return self.area_ce
        raise ModelError(f"area id must be 'IP' or 'CE', got {area_id!r}")


@dataclass(frozen=True)
class Disturbance:
    """Active power step on one area, p.u. on the common base.

    Positive ``dp`` is a generation loss. The reference disturbance of the
    shipped study is ``dp = 0.1`` (1 GW on a 10 GVA base) in area IP.
    """

    area: str
    dp: float
    t_start: float = 0.0

    def __post_init__(self) -> None:
        if self.area.upper() not in ("IP", "CE"):
            raise ModelError("disturbance.area: must be 'IP' or 'CE'")
        object.__setattr__(self, "area", self.area.upper())
        if self.t_start < 0:
            raise ModelError("disturbance.t_start: must be >= 0")


# --------------------------------------------------------------------------- #
# Configuration (de)serialization
# --------------------------------------------------------------------------- #

_GOVERNOR_FIELDS = {
    TechnologyKind.STEAM_TGOV1: ("r", "tg", "t2", "t3", "dt"),
    TechnologyKind.GAS_GAST: ("r", "tg", "t2", "t3", "lmax", "kt"),
    TechnologyKind.HYDRO_CLASSIC: ("r", "tg", "rt", "tr", "tw"),
}


def _need(section: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in section:
        raise ModelError(f"{where}.{key}: missing required field")
    return section[key]


def _number(section: Mapping[str, Any], key: str, where: str) -> float:
    value = _need(section, key, where)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ModelError(f"{where}.{key}: expected a number, got {value!r}")
    return float(value)


def _parse_governor(
    raw: Mapping[str, Any], kind: TechnologyKind, where: str
) -> GovernorParams:
    raw = dict(raw)
    if "kind" in raw:
        gov_kind = TechnologyKind.parse(raw.pop("kind"), f"{where}.kind")
        if gov_kind is not kind:
            raise ModelError(f"{where}.kind: does not match block kind")
    if kind is TechnologyKind.GAS_GAST and "t1" in raw:
        # The gas fuel-valve lag may be spelled t1; it is the governor lag tg.
        t1 = raw.pop("t1")
        if "tg" in raw and abs(raw["tg"] - t1) > 1e-12:
            raise ModelError(f"{where}.t1: conflicts with tg (give one of the two)")
        raw["tg"] = t1
    fields = _GOVERNOR_FIELDS[kind]
    kwargs: dict[str, float] = {}
    for name in fields:
        if name == "dt":
            kwargs[name] = float(raw.pop(name, 0.0))
        else:
            kwargs[name] = _number(raw, name, where)
            raw.pop(name)
    if raw:
        extra = ", ".join(sorted(raw))
        raise ModelError(f"{where}: unexpected governor fields: {extra}")
    return GovernorParams(kind=kind, **kwargs)


def _parse_block(raw: Mapping[str, Any], where: str) -> GenerationBlock:
    name = str(_need(raw, "name", where))
    where = f"{where}[{name}]"
    kind = TechnologyKind.parse(str(_need(raw, "kind", where)), f"{where}.kind")
    fcr_enabled = bool(_need(raw, "fcr_enabled", where))
    governor_raw = raw.get("governor")
    governor = None
    if governor_raw is not None:
        governor = _parse_governor(governor_raw, kind, f"{where}.governor")
    return GenerationBlock(
        name=name,
        kind=kind,
        pg=_number(raw, "pg", where),
        h_contrib=_number(raw, "h_contrib", where),
        fcr_enabled=fcr_enabled,
        governor=governor,
    )


def _parse_area(raw: Mapping[str, Any], area_id: str) -> AreaModel:
    where = f"area_{area_id.lower()}"
    given_id = str(raw.get("id", area_id)).upper()
    if given_id != area_id:
        raise ModelError(f"{where}.id: expected {area_id!r}, got {given_id!r}")
    blocks_raw = raw.get("blocks", [])
    if not isinstance(blocks_raw, (list, tuple)):
        raise ModelError(f"{where}.blocks: expected a list")
    blocks = tuple(_parse_block(b, f"{where}.blocks") for b in blocks_raw)
    return AreaModel(
        id=area_id,
        h=_number(raw, "h", where),
        h_load=_number(raw, "h_load", where),
        d=_number(raw, "d", where),
        blocks=blocks,
    )


def build_system(config: Mapping[str, Any]) -> TwoAreaSystem:
    """Build and validate a :class:`TwoAreaSystem` from a configuration mapping.

    The mapping uses the sections ``base``, ``area_ip``, ``area_ce`` and
    ``tie`` with field names matching the domain types. Raises
    :class:`ModelError` naming the offending field on any violation.
    """
    base_raw = _need(config, "base", "config")
    base = SystemBase(
        s_base=_number(base_raw, "s_base", "base"),
        f0=_number(base_raw, "f0", "base"),
    )
    area_ip = _parse_area(_need(config, "area_ip", "config"), "IP")
    area_ce = _parse_area(_need(config, "area_ce", "config"), "CE")
    tie = TieLine(t_coeff=_number(_need(config, "tie", "config"), "t_coeff", "tie"))
    return TwoAreaSystem(base=base, area_ip=area_ip, area_ce=area_ce, tie=tie)


def _governor_to_dict(gov: GovernorParams) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for name in _GOVERNOR_FIELDS[gov.kind]:
        out[name] = getattr(gov, name)
    return out


def system_to_config(sys: TwoAreaSystem) -> dict[str, Any]:
    """Serialize a system to the configuration mapping accepted by
    :func:`build_system`. Round-trips field-for-field."""

    def area_dict(area: AreaModel) -> dict[str, Any]:
        return {
            "id": area.id,
            "h": area.h,
            "h_load": area.h_load,
            "d": area.d,
            "blocks": [
                {
                    "name": b.name,
                    "kind": b.kind.value,
                    "pg": b.pg,
                    "h_contrib": b.h_contrib,
                    "fcr_enabled": b.fcr_enabled,
                    "governor": None if b.governor is None else _governor_to_dict(b.governor),
                }
                for b in area.blocks
            ],
        }

    return {
        "base": {"s_base": sys.base.s_base, "f0": sys.base.f0},
        "area_ip": area_dict(sys.area_ip),
        "area_ce": area_dict(sys.area_ce),
        "tie": {"t_coeff": sys.tie.t_coeff},
    }
