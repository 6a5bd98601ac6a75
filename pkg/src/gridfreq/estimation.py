"""Parameter identification from recorded two-area frequency responses.

The fit minimizes the summed squared error between recorded and simulated
frequency (both areas, all recorded samples) with a particle swarm whose
inertia weight descends along a logistic chaos map (CDIW). Calibration runs
in two stages:

1. a reduced 8-parameter model (one equivalent steam loop per area) that is
   cheap to evaluate, then
2. the full 14-parameter model, seeded from the reduced estimate after
   allocating each area's equivalent droop across its technologies in
   proportion to their dispatch.

Bounds are enforced by the optimizer (positions are clamped); plausibility
constraints beyond the box (hydro transient droop above steady droop,
physical inertia band, tie-coefficient band) enter as weighted penalties so
that a better-fitting but implausible parameter set is visibly flagged
rather than silently accepted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .model import (
    AreaModel,
    Disturbance,
    GenerationBlock,
    GovernorParams,
    ModelError,
    SystemBase,
    TechnologyKind,
    TieLine,
    TwoAreaSystem,
)
from .scenarios import DispatchSnapshot
from .simulator import FrequencyTrace, SimConfig, SimulationDivergedError, simulate

__all__ = [
    "TurbineDefaults",
    "RecordedEvent",
    "Penalty",
    "ParamSpace",
    "PsoConfig",
    "EstimationResult",
    "ReducedTemplate",
    "FullTemplate",
    "reduced_space",
    "full_space",
    "objective",
    "penalized_cost",
    "pso_optimize",
    "estimate_reduced",
    "allocate_droops",
    "estimate_full",
    "synthesize_event",
]

#: Finite cost assigned to diverged or unbuildable candidates so the swarm
#: update stays well-defined.
SENTINEL_COST = 1e9

#: Peak-to-peak frequency deviation (Hz) below which an event carries no
#: usable disturbance information.
FLAT_TRACE_PTP = 0.01

#: Hard bounds of the parameter boxes (editable per space).
DEFAULT_BOUNDS = {
    "h": (1.0, 10.0),
    "d": (0.1, 3.0),
    "r": (0.01, 0.5),
    "rt": (0.05, 1.5),
    "tg": (0.05, 1.0),
    "t_coeff": (0.1, 5.0),
}

#: Plausibility bands checked as penalties (weights in Hz^2 per unit violation).
DEFAULT_PENALTY_WEIGHT = 100.0

REDUCED_PARAM_NAMES = ("h_ip", "h_ce", "d_ip", "d_ce", "r_ip", "r_ce", "tg", "t_coeff")
FULL_PARAM_NAMES = (
    "h_ip",
    "h_ce",
    "d_ip",
    "d_ce",
    "r_steam_ip",
    "r_ccgt_ip",
    "r_hydro_ip",
    "r_steam_ce",
    "r_ccgt_ce",
    "r_hydro_ce",
    "rt_hydro_ip",
    "rt_hydro_ce",
    "tg",
    "t_coeff",
)

#: Technologies forming each equivalent FCR loop. Iberian nuclear provides
#: no frequency containment and is therefore inertia-only.
FCR_GROUPS = {
    "IP": {"steam": ("coal",), "ccgt": ("ccgt",), "hydro": ("hydro",)},
    "CE": {"steam": ("nuclear", "coal"), "ccgt": ("ccgt",), "hydro": ("hydro",)},
}
INERTIA_ONLY_TECHS = {"IP": ("nuclear", "small_steam"), "CE": ("small_steam",)}
TECH_KINDS = {
    "nuclear": TechnologyKind.STEAM_TGOV1,
    "coal": TechnologyKind.STEAM_TGOV1,
    "small_steam": TechnologyKind.STEAM_TGOV1,
    "ccgt": TechnologyKind.GAS_GAST,
    "hydro": TechnologyKind.HYDRO_CLASSIC,
}


@dataclass(frozen=True)
class TurbineDefaults:
    """Fixed typical turbine constants (not estimated).

    The gas temperature-loop values follow the standard published block and
    are assumptions, flagged as such in the shipped configuration notes.
    """

    steam_t2: float = 2.1
    steam_t3: float = 7.0
    steam_dt: float = 0.0
    gas_t2: float = 0.1
    gas_t3: float = 3.0
    gas_lmax: float = 1.0
    gas_kt: float = 2.0
    hydro_tr: float = 5.0
    hydro_tw: float = 1.0


@dataclass(frozen=True)
class RecordedEvent:
    """A measured disturbance: traces, the known outage, and the mix then."""

    trace: FrequencyTrace
    dist: Disturbance
    mix_ip: DispatchSnapshot
    mix_ce: DispatchSnapshot

    def mix(self, area_id: str) -> DispatchSnapshot:
        return self.mix_ip if area_id.upper() == "IP" else self.mix_ce


@dataclass(frozen=True)
class Penalty:
    """Named plausibility penalty: weight times violation magnitude."""

    name: str
    weight: float
    violation: Callable[[Mapping[str, float]], float]

    def __post_init__(self) -> None:
        if not self.weight > 0:
            raise ValueError(f"penalty {self.name}: weight must be positive")


@dataclass(frozen=True)
class ParamSpace:
    """Bounded parameter box plus plausibility penalties."""

    entries: tuple[tuple[str, float, float], ...]
    penalties: tuple[Penalty, ...] = ()

    def __post_init__(self) -> None:
        for name, lo, hi in self.entries:
            if not lo < hi:
                raise ValueError(f"parameter {name}: lower bound must be < upper bound")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _, _ in self.entries)

    @property
    def lower(self) -> np.ndarray:
        return np.array([lo for _, lo, _ in self.entries])

    @property
    def upper(self) -> np.ndarray:
        return np.array([hi for _, _, hi in self.entries])

    def violations(self, params: Mapping[str, float]) -> dict[str, float]:
        return {p.name: p.violation(params) for p in self.penalties}

    def contains(self, params: Mapping[str, float]) -> bool:
        return all(lo <= params[name] <= hi for name, lo, hi in self.entries)

    def center(self) -> dict[str, float]:
        return {name: 0.5 * (lo + hi) for name, lo, hi in self.entries}


def _band_penalty(name: str, lo: float, hi: float, weight: float) -> Penalty:
    def violation(params: Mapping[str, float], _n=name, _lo=lo, _hi=hi) -> float:
        x = params[_n]
        return max(0.0, _lo - x) + max(0.0, x - _hi)

    return Penalty(name=f"{name}_band", weight=weight, violation=violation)


def _rt_penalty(area: str, weight: float) -> Penalty:
    rt_name, r_name = f"rt_hydro_{area}", f"r_hydro_{area}"

    def violation(params: Mapping[str, float]) -> float:
        return max(0.0, params[r_name] - params[rt_name])

    return Penalty(name=f"rt_ge_r_{area}", weight=weight, violation=violation)


def _entries(names: tuple[str, ...], bounds: dict[str, tuple[float, float]]):
    out = []
    for name in names:
        if name.startswith("h_"):
            key = "h"
        elif name.startswith("d_"):
            key = "d"
        elif name.startswith("rt_"):
            key = "rt"
        elif name.startswith("r_"):
            key = "r"
        else:
            key = name  # tg, t_coeff
        lo, hi = bounds[key]
        out.append((name, lo, hi))
    return tuple(out)


def reduced_space(
    bounds: dict[str, tuple[float, float]] | None = None,
    penalty_weight: float = DEFAULT_PENALTY_WEIGHT,
) -> ParamSpace:
    """Parameter space of the intermediate 8-parameter model."""
    bounds = {**DEFAULT_BOUNDS, **(bounds or {})}
    penalties = (
        _band_penalty("h_ip", *bounds["h"], penalty_weight),
        _band_penalty("h_ce", *bounds["h"], penalty_weight),
        _band_penalty("t_coeff", *bounds["t_coeff"], penalty_weight),
    )
    return ParamSpace(entries=_entries(REDUCED_PARAM_NAMES, bounds), penalties=penalties)


def full_space(
    bounds: dict[str, tuple[float, float]] | None = None,
    penalty_weight: float = DEFAULT_PENALTY_WEIGHT,
) -> ParamSpace:
    """Parameter space of the full 14-parameter model."""
    bounds = {**DEFAULT_BOUNDS, **(bounds or {})}
    penalties = (
        _band_penalty("h_ip", *bounds["h"], penalty_weight),
        _band_penalty("h_ce", *bounds["h"], penalty_weight),
        _band_penalty("t_coeff", *bounds["t_coeff"], penalty_weight),
        _rt_penalty("ip", penalty_weight),
        _rt_penalty("ce", penalty_weight),
    )
    return ParamSpace(entries=_entries(FULL_PARAM_NAMES, bounds), penalties=penalties)


# --------------------------------------------------------------------------- #
# Model templates
# --------------------------------------------------------------------------- #


def _split_group_droop(
    r_group: float, techs: tuple[str, ...], mix: DispatchSnapshot
) -> dict[str, float]:
    """Distribute one group droop over its member technologies.

    Gains (1/r) are proportional to dispatch, so the members behave exactly
    like a single loop with the group droop.
    """
    present = [(t, mix.pg.get(t, 0.0)) for t in techs]
    present = [(t, pg) for t, pg in present if pg > 0]
    total = sum(pg for _, pg in present)
    return {t: r_group * (total / pg) for t, pg in present}


@dataclass(frozen=True)
class ReducedTemplate:
    """Intermediate model: one equivalent steam loop per area."""

    base: SystemBase = SystemBase()
    turbine: TurbineDefaults = TurbineDefaults()

    param_names = REDUCED_PARAM_NAMES

    def instantiate(self, params: Mapping[str, float]) -> TwoAreaSystem:
        def area(area_id: str) -> AreaModel:
            suffix = area_id.lower()
            gov = GovernorParams(
                kind=TechnologyKind.STEAM_TGOV1,
                r=params[f"r_{suffix}"],
                tg=params["tg"],
                t2=self.turbine.steam_t2,
                t3=self.turbine.steam_t3,
                dt=self.turbine.steam_dt,
            )
            h = params[f"h_{suffix}"]
            block = GenerationBlock(
                name="equivalent",
                kind=TechnologyKind.STEAM_TGOV1,
                pg=1.0,
                h_contrib=0.0,
                fcr_enabled=True,
                governor=gov,
            )
            return AreaModel(
                id=area_id, h=h, h_load=h, d=params[f"d_{suffix}"], blocks=(block,)
            )

        return TwoAreaSystem(
            base=self.base,
            area_ip=area("IP"),
            area_ce=area("CE"),
            tie=TieLine(t_coeff=params["t_coeff"]),
        )


@dataclass(frozen=True)
class FullTemplate:
    """Full model: steam, gas and hydro loops per area, mapped to a mix."""

    mix_ip: DispatchSnapshot
    mix_ce: DispatchSnapshot
    base: SystemBase = SystemBase()
    turbine: TurbineDefaults = TurbineDefaults()

    param_names = FULL_PARAM_NAMES

    def _governor(
        self, tech: str, r: float, params: Mapping[str, float], suffix: str
    ) -> GovernorParams:
        tb = self.turbine
        kind = TECH_KINDS[tech]
        if kind is TechnologyKind.STEAM_TGOV1:
            return GovernorParams(
                kind=kind, r=r, tg=params["tg"], t2=tb.steam_t2, t3=tb.steam_t3, dt=tb.steam_dt
            )
        if kind is TechnologyKind.GAS_GAST:
            return GovernorParams(
                kind=kind, r=r, tg=params["tg"], t2=tb.gas_t2, t3=tb.gas_t3,
                lmax=tb.gas_lmax, kt=tb.gas_kt,
            )
        return GovernorParams(
            kind=kind, r=r, tg=params["tg"], rt=params[f"rt_hydro_{suffix}"],
            tr=tb.hydro_tr, tw=tb.hydro_tw,
        )

    def instantiate(self, params: Mapping[str, float]) -> TwoAreaSystem:
        def area(area_id: str, mix: DispatchSnapshot) -> AreaModel:
            suffix = area_id.lower()
            droops: dict[str, float] = {}
            for group, techs in FCR_GROUPS[area_id].items():
                droops.update(
                    _split_group_droop(params[f"r_{group}_{suffix}"], techs, mix)
                )
            blocks: list[GenerationBlock] = []
            for tech in ("nuclear", "coal", "ccgt", "hydro", "small_steam"):
                pg = mix.pg.get(tech, 0.0)
                if pg <= 0:
                    continue
                fcr = tech in droops and tech not in INERTIA_ONLY_TECHS[area_id]
                blocks.append(
                    GenerationBlock(
                        name=tech,
                        kind=TECH_KINDS[tech],
                        pg=pg / self.base.s_base,
                        h_contrib=0.0,
                        fcr_enabled=fcr,
                        governor=self._governor(tech, droops[tech], params, suffix)
                        if fcr
                        else None,
                    )
                )
            h = params[f"h_{suffix}"]
            return AreaModel(
                id=area_id, h=h, h_load=h, d=params[f"d_{suffix}"], blocks=tuple(blocks)
            )

        return TwoAreaSystem(
            base=self.base,
            area_ip=area("IP", self.mix_ip),
            area_ce=area("CE", self.mix_ce),
            tie=TieLine(t_coeff=params["t_coeff"]),
        )


# --------------------------------------------------------------------------- #
# Objective
# --------------------------------------------------------------------------- #


def _sim_config_for(trace: FrequencyTrace, max_dt: float = 0.005) -> SimConfig:
    """Integration config whose sample grid matches the recorded grid."""
    rec_dt = trace.sample_dt
    k = max(1, math.ceil(rec_dt / max_dt - 1e-9))
    t_end = (len(trace.t) - 1) * rec_dt
    return SimConfig(dt=rec_dt / k, t_end=t_end, sample_dt=rec_dt)


def objective(
    params: Mapping[str, float],
    event: RecordedEvent,
    template: ReducedTemplate | FullTemplate,
) -> float:
    """Quadratic error between recorded and simulated frequency, Hz^2.

    Sums over both areas and all recorded samples. Divergent or unbuildable
    candidates get the finite sentinel cost instead of raising.
    """
    try:
        sys = template.instantiate(params)
        cfg = _sim_config_for(event.trace)
        model_trace = simulate(sys, event.dist, cfg)
    except (ModelError, SimulationDivergedError, ValueError):
        return SENTINEL_COST
    err_ip = event.trace.f_ip - model_trace.f_ip
    err_ce = event.trace.f_ce - model_trace.f_ce
    cost = float(np.sum(err_ip * err_ip) + np.sum(err_ce * err_ce))
    if not math.isfinite(cost):
        return SENTINEL_COST
    return cost


def penalized_cost(
    params: Mapping[str, float],
    event: RecordedEvent,
    template: ReducedTemplate | FullTemplate,
    space: ParamSpace,
) -> float:
    """Objective plus weighted plausibility-penalty violations."""
    cost = objective(params, event, template)
    for pen in space.penalties:
        cost += pen.weight * pen.violation(params)
    return cost


# --------------------------------------------------------------------------- #
# CDIW particle swarm
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class PsoConfig:
    """Swarm settings. Both seeds are recorded in results for reproducibility."""

    swarm_size: int = 40
    max_iters: int = 300
    c1: float = 2.0
    c2: float = 2.0
    w_max: float = 0.9
    w_min: float = 0.4
    chaos_seed: float = 0.7
    rng_seed: int = 0
    v_max_frac: float = 0.5  # velocity limit as a fraction of each bound range
    stop_tol: float | None = None  # best-cost stagnation tolerance; None disables
    stop_patience: int = 50

    def __post_init__(self) -> None:
        if self.swarm_size < 10:
            raise ValueError("pso config: swarm_size must be >= 10")
        if self.max_iters < 0:
            raise ValueError("pso config: max_iters must be >= 0")
        if not (self.w_max > self.w_min > 0):
            raise ValueError("pso config: need w_max > w_min > 0")
        if not (0.0 < self.chaos_seed < 1.0):
            raise ValueError("pso config: chaos_seed must be in (0, 1)")
        if not (0.0 < self.v_max_frac <= 1.0):
            raise ValueError("pso config: v_max_frac must be in (0, 1]")


@dataclass(frozen=True)
class EstimationResult:
    """Best parameter vector found plus convergence and feasibility records."""

    best_params: dict[str, float]
    best_cost: float
    cost_history: np.ndarray  # global best per iteration; [0] is the initial swarm
    penalty_violations: dict[str, float]  # only violated penalties (> 0)
    feasible: bool
    space: ParamSpace
    cfg: PsoConfig
    unidentifiable: bool = False


def pso_optimize(
    space: ParamSpace,
    cfg: PsoConfig,
    cost_fn: Callable[[dict[str, float]], float],
    init_positions: np.ndarray | None = None,
) -> EstimationResult:
    """Minimize ``cost_fn`` over the bounded box with a CDIW particle swarm.

    Standard velocity/position updates; the inertia weight at iteration k is

        w(k) = (w_max - w_min) * (max_iters - k) / max_iters * z(k) + w_min

    with the logistic chaos map z(k+1) = 4 z(k) (1 - z(k)) started at the
    chaos seed. Positions are clamped to the bounds; the best particle ever
    seen is returned. Fully deterministic given the two seeds.
    """
    names = space.names
    lo, hi = space.lower, space.upper
    dim = len(names)
    swarm = cfg.swarm_size
    rng = np.random.default_rng(cfg.rng_seed)

    x = lo + (hi - lo) * rng.random((swarm, dim))
    if init_positions is not None:
        seeded = np.clip(np.atleast_2d(init_positions), lo, hi)
        x[: len(seeded)] = seeded
    v = np.zeros((swarm, dim))

    def evaluate(row: np.ndarray) -> float:
        return float(cost_fn(dict(zip(names, row))))

    costs = np.array([evaluate(x[i]) for i in range(swarm)])
    pbest_x = x.copy()
    pbest_c = costs.copy()
    g = int(np.argmin(pbest_c))
    gbest_x = pbest_x[g].copy()
    gbest_c = float(pbest_c[g])

    history = [gbest_c]
    z = cfg.chaos_seed
    v_max = cfg.v_max_frac * (hi - lo)
    stall = 0
    for k in range(cfg.max_iters):
        w = (cfg.w_max - cfg.w_min) * (cfg.max_iters - k) / cfg.max_iters * z + cfg.w_min
        z = 4.0 * z * (1.0 - z)
        r1 = rng.random((swarm, dim))
        r2 = rng.random((swarm, dim))
        v = w * v + cfg.c1 * r1 * (pbest_x - x) + cfg.c2 * r2 * (gbest_x - x)
        v = np.clip(v, -v_max, v_max)
        x = np.clip(x + v, lo, hi)
        costs = np.array([evaluate(x[i]) for i in range(swarm)])
        improved = costs < pbest_c
        pbest_x[improved] = x[improved]
        pbest_c[improved] = costs[improved]
        g = int(np.argmin(pbest_c))
        if float(pbest_c[g]) < gbest_c:
            improvement = gbest_c - float(pbest_c[g])
            gbest_c = float(pbest_c[g])
            gbest_x = pbest_x[g].copy()
        else:
            improvement = 0.0
        history.append(gbest_c)
        if cfg.stop_tol is not None:
            stall = 0 if improvement > cfg.stop_tol else stall + 1
            if stall >= cfg.stop_patience:
                break

    best_params = dict(zip(names, (float(val) for val in gbest_x)))
    assert space.contains(best_params), "optimizer returned a point outside bounds"
    violations = {n: v for n, v in space.violations(best_params).items() if v > 0}
    return EstimationResult(
        best_params=best_params,
        best_cost=gbest_c,
        cost_history=np.array(history),
        penalty_violations=violations,
        feasible=not violations,
        space=space,
        cfg=cfg,
    )


# --------------------------------------------------------------------------- #
# Two-stage workflow
# --------------------------------------------------------------------------- #


def _staged_pso(
    space: ParamSpace,
    cfg: PsoConfig,
    cost_fn: Callable[[dict[str, float]], float],
    init_positions: np.ndarray | None,
) -> EstimationResult:
    """Exploration run followed by two intensification restarts.

    The iteration budget of ``cfg`` is split 40/30/30; each restart
    re-seeds the whole swarm with shrinking Gaussian jitter around the
    incumbent best, which drives the final descent along the flat valleys
    of the fit surface. Deterministic: all sub-seeds derive from
    ``cfg.rng_seed``.
    """
    if cfg.max_iters < 10:
        return pso_optimize(space, cfg, cost_fn, init_positions=init_positions)
    lo, hi = space.lower, space.upper
    explore = cfg.max_iters - 2 * (3 * cfg.max_iters // 10)
    phases = [explore, 3 * cfg.max_iters // 10, 3 * cfg.max_iters // 10]
    jitters = [None, 0.01, 0.003]

    result: EstimationResult | None = None
    histories = []
    seeds = init_positions
    for phase, (iters, jitter) in enumerate(zip(phases, jitters)):
        sub_cfg = replace(cfg, max_iters=iters, rng_seed=3 * cfg.rng_seed + phase)
        if jitter is not None:
            assert result is not None
            incumbent = np.array([result.best_params[n] for n in space.names])
            rng = np.random.default_rng((cfg.rng_seed, 17 + phase))
            spread = rng.normal(0.0, jitter, size=(cfg.swarm_size, len(incumbent)))
            seeds = np.clip(incumbent + spread * (hi - lo), lo, hi)
            seeds[0] = incumbent
        stage = pso_optimize(space, sub_cfg, cost_fn, init_positions=seeds)
        if result is None or stage.best_cost <= result.best_cost:
            result = stage
        histories.append(stage.cost_history if phase == 0 else stage.cost_history[1:])
    history = np.minimum.accumulate(np.concatenate(histories))
    assert result is not None
    return replace(result, cfg=cfg, cost_history=history)


def _heuristic_seeds(
    event: RecordedEvent, space: ParamSpace, f0: float
) -> np.ndarray:
    """Deterministic starting points for the reduced fit.

    Pins the directly readable quantities (disturbed-area inertia from the
    initial slope, total regulating gain from the trace tail) and scans
    the weakly observable pair (other-area inertia, tie coefficient) over
    a coarse grid, which keeps the swarm out of the stiff-tie local basin.
    """
    trace, dist = event.trace, event.dist
    dt = trace.sample_dt
    bounds = {name: (lo, hi) for name, lo, hi in space.entries}

    def clip(name: str, value: float) -> float:
        lo, hi = bounds[name]
        return min(max(value, lo), hi)

    f_dist = trace.frequency(dist.area)
    k0 = min(int(round(dist.t_start / dt)), len(f_dist) - 2)
    m = max(1, min(int(round(0.2 / dt)), len(f_dist) - 1 - k0))
    slope = (f_dist[k0 + m] - f_dist[k0]) / (m * dt)
    h_label = "h_ip" if dist.area == "IP" else "h_ce"
    h_other = "h_ce" if dist.area == "IP" else "h_ip"
    h_dist = clip(h_label, -dist.dp * f0 / (2.0 * slope)) if slope * dist.dp < 0 else 5.0

    tail = np.mean(f_dist[-max(3, len(f_dist) // 10):])
    df_pu = (tail - f0) / f0
    g_total = dist.dp / abs(df_pu) if df_pu * dist.dp < 0 else 40.0
    r_even = clip("r_ip", 1.0 / max(1.0, g_total / 2.0 - 1.5))

    seeds = []
    for h2 in (2.0, 5.0, 8.0):
        for t in (0.2, 0.35, 0.6, 1.0, 1.8, 3.0):
            p = {
                h_label: h_dist,
                h_other: clip(h_other, h2),
                "d_ip": 1.5,
                "d_ce": 1.5,
                "r_ip": r_even,
                "r_ce": r_even,
                "tg": 0.3,
                "t_coeff": clip("t_coeff", t),
            }
            seeds.append([p[n] for n in space.names])
    return np.array(seeds)


def _is_flat(trace: FrequencyTrace) -> bool:
    return (
        float(np.ptp(trace.f_ip)) < FLAT_TRACE_PTP
        and float(np.ptp(trace.f_ce)) < FLAT_TRACE_PTP
    )


def _unidentifiable_result(
    space: ParamSpace, cfg: PsoConfig, cost: float
) -> EstimationResult:
    center = space.center()
    violations = {n: v for n, v in space.violations(center).items() if v > 0}
    return EstimationResult(
        best_params=center,
        best_cost=cost,
        cost_history=np.array([cost]),
        penalty_violations=violations,
        feasible=not violations,
        space=space,
        cfg=cfg,
        unidentifiable=True,
    )


def estimate_reduced(
    event: RecordedEvent,
    cfg: PsoConfig,
    space: ParamSpace | None = None,
    template: ReducedTemplate | None = None,
) -> EstimationResult:
    """Stage 1: fit the 8-parameter intermediate model to the event."""
    space = space or reduced_space()
    template = template or ReducedTemplate()
    if _is_flat(event.trace):
        cost = penalized_cost(space.center(), event, template, space)
        return _unidentifiable_result(space, cfg, cost)
    seeds = _heuristic_seeds(event, space, template.base.f0)
    return _staged_pso(
        space, cfg, lambda p: penalized_cost(p, event, template, space), seeds
    )


def allocate_droops(
    reduced: EstimationResult | Mapping[str, float],
    mix_ip: DispatchSnapshot,
    mix_ce: DispatchSnapshot,
    space: ParamSpace | None = None,
) -> dict[str, float]:
    """Turn a reduced estimate into a full-model starting point.

    Each area's equivalent regulating gain 1/R is split over the FCR
    technology groups in proportion to their dispatch at the event; hydro
    transient droops start at five times the allocated hydro droop. All
    values are clipped into the full-space bounds.
    """
    params = reduced.best_params if isinstance(reduced, EstimationResult) else dict(reduced)
    space = space or full_space()
    bounds = {name: (lo, hi) for name, lo, hi in space.entries}

    init: dict[str, float] = {
        "h_ip": params["h_ip"],
        "h_ce": params["h_ce"],
        "d_ip": params["d_ip"],
        "d_ce": params["d_ce"],
        "tg": params["tg"],
        "t_coeff": params["t_coeff"],
    }
    for area_id, mix in (("IP", mix_ip), ("CE", mix_ce)):
        suffix = area_id.lower()
        groups = FCR_GROUPS[area_id]
        weights = {
            g: sum(mix.pg.get(t, 0.0) for t in techs) for g, techs in groups.items()
        }
        total = sum(weights.values())
        if total <= 0:
            raise ValueError(f"allocate_droops: zero FCR dispatch in area {area_id}")
        r_area = params[f"r_{suffix}"]
        for group, w in weights.items():
            name = f"r_{group}_{suffix}"
            if w > 0:
                init[name] = r_area * total / w
            else:
                init[name] = bounds[name][1]  # absent group: weakest allowed droop
        init[f"rt_hydro_{suffix}"] = 5.0 * init[f"r_hydro_{suffix}"]

    return {
        name: min(max(init[name], bounds[name][0]), bounds[name][1])
        for name in space.names
    }


def estimate_full(
    event: RecordedEvent,
    init: Mapping[str, float],
    cfg: PsoConfig,
    space: ParamSpace | None = None,
    template: FullTemplate | None = None,
    seed_fraction: float = 0.5,
    seed_sigma: float = 0.02,
) -> EstimationResult:
    """Stage 2: fit the full 14-parameter model starting near ``init``.

    The first particle is placed exactly at ``init`` (so the result can
    never be worse than the starting point); a fraction of the swarm is
    seeded around it with bounded Gaussian jitter, the rest is uniform.
    """
    space = space or full_space()
    template = template or FullTemplate(mix_ip=event.mix_ip, mix_ce=event.mix_ce)
    if _is_flat(event.trace):
        cost = penalized_cost(space.center(), event, template, space)
        return _unidentifiable_result(space, cfg, cost)
    if not space.contains(init):
        raise ValueError("estimate_full: init must lie within the parameter bounds")

    lo, hi = space.lower, space.upper
    init_row = np.array([init[name] for name in space.names])
    n_seed = max(1, int(round(seed_fraction * cfg.swarm_size)))
    jitter_rng = np.random.default_rng((cfg.rng_seed, 1))
    jitter = jitter_rng.normal(0.0, seed_sigma, size=(n_seed, len(init_row))) * (hi - lo)
    seeded = np.clip(init_row + jitter, lo, hi)
    seeded[0] = init_row
    return pso_optimize(
        space,
        cfg,
        lambda p: penalized_cost(p, event, template, space),
        init_positions=seeded,
    )


# --------------------------------------------------------------------------- #
# Synthetic events
# --------------------------------------------------------------------------- #


def synthesize_event(
    sys: TwoAreaSystem,
    dist: Disturbance,
    mix_ip: DispatchSnapshot,
    mix_ce: DispatchSnapshot,
    rec_dt: float = 0.05,
    t_end: float = 45.0,
    noise_sd: float = 0.0,
    seed: int = 0,
) -> RecordedEvent:
    """Generate a recorded-style event from a known system (tests, examples)."""
    k = max(1, math.ceil(rec_dt / 0.005 - 1e-9))
    cfg = SimConfig(dt=rec_dt / k, t_end=t_end, sample_dt=rec_dt)
    trace = simulate(sys, dist, cfg)
    f_ip, f_ce = trace.f_ip, trace.f_ce
    if noise_sd > 0:
        rng = np.random.default_rng(seed)
        f_ip = f_ip + rng.normal(0.0, noise_sd, size=len(f_ip))
        f_ce = f_ce + rng.normal(0.0, noise_sd, size=len(f_ce))
    recorded = FrequencyTrace(t=trace.t, f_ip=f_ip, f_ce=f_ce, p_tie=None)
    return RecordedEvent(trace=recorded, dist=dist, mix_ip=mix_ip, mix_ce=mix_ce)
