"""Time-domain integration of the two-area model under a step disturbance.

Dynamics per area i (p.u. on the common base):

    2*H_i * d(dw_i)/dt = dPm_i - dPload_i - D_i*dw_i -/+ p_tie
    d(ddelta_i)/dt     = 2*pi*f0 * dw_i

with the tie-line flow linearized as ``t_coeff * (ddelta_ip - ddelta_ce)``
(export positive for IP inside the swing equations). The emitted trace
reports ``p_tie`` with the opposite, support-direction sign: positive means
flow from CE into IP, which is the physical direction after an IP
generation loss.

Integration is fixed-step classical 4th-order Runge-Kutta. The inner loop
is compiled with numba when available (set ``GRIDFREQ_NO_NUMBA=1`` to force
the pure-Python fallback, which is slow but bit-identical in structure).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .model import (
    Disturbance,
    GenerationBlock,
    ModelError,
    TechnologyKind,
    TwoAreaSystem,
)

__all__ = [
    "SimConfig",
    "FrequencyTrace",
    "SimulationDivergedError",
    "StateSpace",
    "simulate",
    "run_states",
    "build_state_space",
    "state_derivatives",
    "block_response",
]

TWO_PI = 2.0 * math.pi

# Ratio of integration step to the smallest model time constant above which
# a stability warning is recorded in the result.
DT_WARN_RATIO = 0.2


class SimulationDivergedError(RuntimeError):
    """The integrator produced a non-finite state."""

    def __init__(self, step: int, t: float):
        self.step = step
        self.t = t
        super().__init__(f"simulation diverged: non-finite state at step {step} (t={t:.6g} s)")


@dataclass(frozen=True)
class SimConfig:
    """Fixed-step integration settings.

    ``sample_dt`` must be an integer multiple of ``dt`` and ``t_end`` an
    integer multiple of ``sample_dt``.
    """

    dt: float = 0.005
    t_end: float = 60.0
    sample_dt: float = 0.01

    def __post_init__(self) -> None:
        if not 0 < self.dt <= self.sample_dt <= self.t_end:
            raise ModelError("sim config: need 0 < dt <= sample_dt <= t_end")
        if abs(self.stride * self.dt - self.sample_dt) > 1e-9 * self.sample_dt:
            raise ModelError("sim config: sample_dt must be a multiple of dt")
        n = self.n_samples - 1
        if abs(n * self.sample_dt - self.t_end) > 1e-6 * self.t_end:
            raise ModelError("sim config: t_end must be a multiple of sample_dt")

    @property
    def stride(self) -> int:
        return int(round(self.sample_dt / self.dt))

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def n_samples(self) -> int:
        return int(round(self.t_end / self.sample_dt)) + 1


@dataclass(frozen=True)
class FrequencyTrace:
    """Uniformly sampled frequency (Hz) and tie-line flow (p.u.) trace.

    ``p_tie`` is positive for flow from CE into IP. Recorded traces
    ingested from measurement files carry ``p_tie = None``.
    """

    t: np.ndarray
    f_ip: np.ndarray
    f_ce: np.ndarray
    p_tie: np.ndarray | None = None
    warnings: tuple[str, ...] = ()

    def frequency(self, area: str) -> np.ndarray:
        key = area.upper()
        if key == "IP":
            return self.f_ip
        if key == "CE":
            return self.f_ce
        raise ValueError(f"area must be 'IP' or 'CE', got {area!r}")

    @property
    def sample_dt(self) -> float:
        if len(self.t) < 2:
            raise ValueError("trace has fewer than two samples")
        return float(self.t[1] - self.t[0])


# --------------------------------------------------------------------------- #
# State-space assembly
# --------------------------------------------------------------------------- #

# Fixed swing-state indices.
DW_IP, DELTA_IP, DW_CE, DELTA_CE = 0, 1, 2, 3


@dataclass(frozen=True)
class StateSpace:
    """Linear part ``A`` plus gas-limiter metadata for one system.

    Gas fuel-valve rows of ``A`` are zero; their derivative (low-value
    select between the droop path and the temperature-limit path, with
    anti-windup clamping at the load limit) is evaluated inside the
    integration loop.
    """

    sys: TwoAreaSystem
    a: np.ndarray
    block_slices: tuple[tuple[str, str, int, int], ...]  # (area, name, start, n)
    gas_valve_idx: np.ndarray
    gas_temp_idx: np.ndarray
    gas_dw_idx: np.ndarray
    gas_r: np.ndarray
    gas_t1: np.ndarray
    gas_lmax: np.ndarray
    gas_kt: np.ndarray
    min_time_constant: float

    @property
    def n(self) -> int:
        return self.a.shape[0]


def _append_block(
    a: np.ndarray,
    block: GenerationBlock,
    dw_row: int,
    two_h: float,
    start: int,
) -> list[float]:
    """Wire one governor block into A; returns the block's time constants."""
    gov = block.governor
    assert gov is not None
    if block.kind is TechnologyKind.STEAM_TGOV1:
        s0, s1 = start, start + 1  # valve servo, turbine lead/lag state
        a[s0, dw_row] = -1.0 / (gov.r * gov.tg)
        a[s0, s0] = -1.0 / gov.tg
        a[s1, s0] = 1.0 / gov.t3
        a[s1, s1] = -1.0 / gov.t3
        # dPm = (t2/t3)*x0 + (1 - t2/t3)*x1 - dt*dw
        a[dw_row, s0] += (gov.t2 / gov.t3) / two_h
        a[dw_row, s1] += (1.0 - gov.t2 / gov.t3) / two_h
        a[dw_row, dw_row] -= gov.dt / two_h
        return [gov.tg, gov.t3]
    if block.kind is TechnologyKind.GAS_GAST:
        g0, g1, g2 = start, start + 1, start + 2  # fuel valve, fuel flow, exhaust temp
        # g0 row stays zero; handled nonlinearly in the kernel.
        a[g1, g0] = 1.0 / gov.t2
        a[g1, g1] = -1.0 / gov.t2
        a[g2, g1] = 1.0 / gov.t3
        a[g2, g2] = -1.0 / gov.t3
        a[dw_row, g1] += 1.0 / two_h
        return [gov.tg, gov.t2, gov.t3]
    if block.kind is TechnologyKind.HYDRO_CLASSIC:
        h0, h1, h2 = start, start + 1, start + 2  # droop comp., servo, penstock
        a1 = (gov.rt / gov.r) * gov.tr
        a[h0, dw_row] = -1.0 / a1
        a[h0, h0] = -1.0 / a1
        # y1 = -dw/rt + (1/r - 1/rt)*x0 feeds the servo lag
        a[h1, dw_row] = -1.0 / (gov.rt * gov.tg)
        a[h1, h0] = (1.0 / gov.r - 1.0 / gov.rt) / gov.tg
        a[h1, h1] = -1.0 / gov.tg
        a[h2, h1] = 2.0 / gov.tw
        a[h2, h2] = -2.0 / gov.tw
        # Penstock (1 - tw*s)/(1 + 0.5*tw*s): dPm = 3*x2 - 2*x1
        a[dw_row, h2] += 3.0 / two_h
        a[dw_row, h1] -= 2.0 / two_h
        return [gov.tg, 0.5 * gov.tw, a1]
    raise ModelError(f"block[{block.name}].kind: unsupported kind {block.kind}")


def build_state_space(sys: TwoAreaSystem) -> StateSpace:
    """Assemble the state matrix for a validated system.

    State ordering: ``[dw_ip, ddelta_ip, dw_ce, ddelta_ce]`` followed by the
    internal states of each FCR-enabled block, IP blocks first.
    """
    n = 4 + sum(b.n_states for b in sys.area_ip.blocks + sys.area_ce.blocks)
    a = np.zeros((n, n))
    f0 = sys.base.f0
    t_coeff = sys.tie.t_coeff

    slices: list[tuple[str, str, int, int]] = []
    gas_meta: list[tuple[int, int, int, float, float, float, float]] = []
    tcs: list[float] = []

    next_free = 4
    for area, dw_row, delta_row, tie_sign in (
        (sys.area_ip, DW_IP, DELTA_IP, +1.0),
        (sys.area_ce, DW_CE, DELTA_CE, -1.0),
    ):
        two_h = 2.0 * area.h
        a[dw_row, dw_row] -= area.d / two_h
        # p_tie = t_coeff*(delta_ce - delta_ip) enters IP with +, CE with -.
        a[dw_row, DELTA_CE] += tie_sign * t_coeff / two_h
        a[dw_row, DELTA_IP] -= tie_sign * t_coeff / two_h
        a[delta_row, dw_row] = TWO_PI * f0
        for block in area.blocks:
            if not block.fcr_enabled:
                continue
            start = next_free
            tcs.extend(_append_block(a, block, dw_row, two_h, start))
            slices.append((area.id, block.name, start, block.n_states))
            if block.kind is TechnologyKind.GAS_GAST:
                gov = block.governor
                assert gov is not None
                gas_meta.append(
                    (start, start + 2, dw_row, gov.r, gov.tg, gov.lmax, gov.kt)
                )
            next_free += block.n_states

    n_gas = len(gas_meta)
    gas_arr = np.array(gas_meta, dtype=float).reshape(n_gas, 7)
    return StateSpace(
        sys=sys,
        a=a,
        block_slices=tuple(slices),
        gas_valve_idx=gas_arr[:, 0].astype(np.int64),
        gas_temp_idx=gas_arr[:, 1].astype(np.int64),
        gas_dw_idx=gas_arr[:, 2].astype(np.int64),
        gas_r=np.ascontiguousarray(gas_arr[:, 3]),
        gas_t1=np.ascontiguousarray(gas_arr[:, 4]),
        gas_lmax=np.ascontiguousarray(gas_arr[:, 5]),
        gas_kt=np.ascontiguousarray(gas_arr[:, 6]),
        min_time_constant=min(tcs) if tcs else math.inf,
    )


# --------------------------------------------------------------------------- #
# RK4 kernel (numba-compiled when available)
# --------------------------------------------------------------------------- #

_USE_NUMBA = not os.environ.get("GRIDFREQ_NO_NUMBA")
if _USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _USE_NUMBA = False
if not _USE_NUMBA:

    def njit(**_kwargs):
        def wrap(fn):
            return fn

        return wrap


@njit(cache=True)
def _deriv(a, x, out, t, t_start, dist_row, dist_gain,
           gas_v, gas_m, gas_dw, gas_r, gas_t1, gas_lmax, gas_kt):
    n = a.shape[0]
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += a[i, j] * x[j]
        out[i] = acc
    if t >= t_start:
        out[dist_row] -= dist_gain
    for g in range(gas_v.shape[0]):
        iv = gas_v[g]
        vin_droop = -x[gas_dw[g]] / gas_r[g]
        vin_temp = gas_lmax[g] + gas_kt[g] * (gas_lmax[g] - x[gas_m[g]])
        vin = vin_droop if vin_droop < vin_temp else vin_temp
        dv = (vin - x[iv]) / gas_t1[g]
        if x[iv] >= gas_lmax[g] and dv > 0.0:
            dv = 0.0  # anti-windup at the load limit
        out[iv] = dv


@njit(cache=True)
def _rk4_loop(a, x0, dt, n_steps, stride, t_start, dist_row, dist_gain,
              gas_v, gas_m, gas_dw, gas_r, gas_t1, gas_lmax, gas_kt, out):
    n = a.shape[0]
    x = x0.copy()
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    xt = np.empty(n)
    out[0, :] = x
    sample = 1
    half = 0.5 * dt
    for step in range(n_steps):
        t0 = step * dt
        _deriv(a, x, k1, t0, t_start, dist_row, dist_gain,
               gas_v, gas_m, gas_dw, gas_r, gas_t1, gas_lmax, gas_kt)
        for i in range(n):
            xt[i] = x[i] + half * k1[i]
        _deriv(a, xt, k2, t0 + half, t_start, dist_row, dist_gain,
               gas_v, gas_m, gas_dw, gas_r, gas_t1, gas_lmax, gas_kt)
        for i in range(n):
            xt[i] = x[i] + half * k2[i]
        _deriv(a, xt, k3, t0 + half, t_start, dist_row, dist_gain,
               gas_v, gas_m, gas_dw, gas_r, gas_t1, gas_lmax, gas_kt)
        for i in range(n):
            xt[i] = x[i] + dt * k3[i]
        _deriv(a, xt, k4, t0 + dt, t_start, dist_row, dist_gain,
               gas_v, gas_m, gas_dw, gas_r, gas_t1, gas_lmax, gas_kt)
        for i in range(n):
            x[i] = x[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if (step + 1) % stride == 0:
            finite = True
            for i in range(n):
                if not np.isfinite(x[i]):
                    finite = False
            if not finite:
                return step + 1
            out[sample, :] = x
            sample += 1
    return -1


# --------------------------------------------------------------------------- #
# Public entry points
# --------------------------------------------------------------------------- #


def _integrate(ss: StateSpace, dist: Disturbance, cfg: SimConfig) -> np.ndarray:
    sys = ss.sys
    area = sys.area(dist.area)
    dist_row = DW_IP if area.id == "IP" else DW_CE
    dist_gain = dist.dp / (2.0 * area.h)
    out = np.empty((cfg.n_samples, ss.n))
    x0 = np.zeros(ss.n)
    bad = _rk4_loop(
        ss.a, x0, cfg.dt, cfg.n_steps, cfg.stride, dist.t_start, dist_row, dist_gain,
        ss.gas_valve_idx, ss.gas_temp_idx, ss.gas_dw_idx,
        ss.gas_r, ss.gas_t1, ss.gas_lmax, ss.gas_kt, out,
    )
    if bad >= 0:
        raise SimulationDivergedError(int(bad), float(bad * cfg.dt))
    return out


def run_states(
    sys: TwoAreaSystem, dist: Disturbance, cfg: SimConfig
) -> tuple[np.ndarray, np.ndarray, StateSpace]:
    """Integrate and return ``(t, states, state_space)`` at the sample grid.

    Diagnostic entry point used by the property tests; ``simulate`` is the
    normal interface.
    """
    ss = build_state_space(sys)
    states = _integrate(ss, dist, cfg)
    t = np.arange(cfg.n_samples) * cfg.sample_dt
    return t, states, ss


def simulate(sys: TwoAreaSystem, dist: Disturbance, cfg: SimConfig | None = None) -> FrequencyTrace:
    """Simulate the system response to a step disturbance.

    Returns the frequency of both areas and the tie-line flow deviation on
    the uniform ``cfg.sample_dt`` grid over ``[0, t_end]``. Raises
    :class:`SimulationDivergedError` if the state becomes non-finite; an
    integration step too large for the smallest model time constant is
    recorded as a warning on the returned trace.
    """
    cfg = cfg or SimConfig()
    ss = build_state_space(sys)
    warnings: tuple[str, ...] = ()
    if cfg.dt > DT_WARN_RATIO * ss.min_time_constant:
        warnings = (
            f"dt={cfg.dt:g} s exceeds {DT_WARN_RATIO:g} x smallest time constant "
            f"({ss.min_time_constant:g} s); results may be inaccurate",
        )
    states = _integrate(ss, dist, cfg)
    f0 = sys.base.f0
    t = np.arange(cfg.n_samples) * cfg.sample_dt
    f_ip = f0 * (1.0 + states[:, DW_IP])
    f_ce = f0 * (1.0 + states[:, DW_CE])
    p_tie = sys.tie.t_coeff * (states[:, DELTA_CE] - states[:, DELTA_IP])
    return FrequencyTrace(t=t, f_ip=f_ip, f_ce=f_ce, p_tie=p_tie, warnings=warnings)


def state_derivatives(
    ss: StateSpace, x: np.ndarray, t: float, dist: Disturbance
) -> np.ndarray:
    """Recompute the state derivative at one sampled state (test oracle)."""
    area = ss.sys.area(dist.area)
    dist_row = DW_IP if area.id == "IP" else DW_CE
    out = np.empty(ss.n)
    _deriv(
        ss.a, x, out, t, dist.t_start, dist_row, dist.dp / (2.0 * area.h),
        ss.gas_valve_idx, ss.gas_temp_idx, ss.gas_dw_idx,
        ss.gas_r, ss.gas_t1, ss.gas_lmax, ss.gas_kt,
    )
    return out


# --------------------------------------------------------------------------- #
# Single-block response, exposed for unit testing of the governor models
# --------------------------------------------------------------------------- #


def block_response(block: GenerationBlock, dw: np.ndarray, dt: float) -> np.ndarray:
    """Mechanical power deviation of one governor block driven by ``dw``.

    ``dw`` is sampled at interval ``dt`` and held constant across each step
    (zero-order hold). Raises :class:`ModelError` for inertia-only blocks.
    """
    gov = block.governor
    if gov is None:
        raise ModelError(f"block[{block.name}]: block has no governor")
    dw = np.asarray(dw, dtype=float)
    n = len(dw)
    pm = np.empty(n)

    if block.kind is TechnologyKind.STEAM_TGOV1:

        def deriv(x: np.ndarray, u: float) -> np.ndarray:
            return np.array(
                [(-u / gov.r - x[0]) / gov.tg, (x[0] - x[1]) / gov.t3]
            )

        def output(x: np.ndarray, u: float) -> float:
            return (gov.t2 / gov.t3) * x[0] + (1.0 - gov.t2 / gov.t3) * x[1] - gov.dt * u

        m = 2
    elif block.kind is TechnologyKind.GAS_GAST:

        def deriv(x: np.ndarray, u: float) -> np.ndarray:
            vin = min(-u / gov.r, gov.lmax + gov.kt * (gov.lmax - x[2]))
            dv = (vin - x[0]) / gov.tg
            if x[0] >= gov.lmax and dv > 0.0:
                dv = 0.0
            return np.array([dv, (x[0] - x[1]) / gov.t2, (x[1] - x[2]) / gov.t3])

        def output(x: np.ndarray, u: float) -> float:
            return x[1]

        m = 3
    else:  # HYDRO_CLASSIC
        a1 = (gov.rt / gov.r) * gov.tr

        def deriv(x: np.ndarray, u: float) -> np.ndarray:
            e = -u
            y1 = e / gov.rt + (1.0 / gov.r - 1.0 / gov.rt) * x[0]
            return np.array(
                [(e - x[0]) / a1, (y1 - x[1]) / gov.tg, (x[1] - x[2]) / (0.5 * gov.tw)]
            )

        def output(x: np.ndarray, u: float) -> float:
            return 3.0 * x[2] - 2.0 * x[1]

        m = 3

    x = np.zeros(m)
    for k in range(n):
        u = float(dw[k])
        pm[k] = output(x, u)
        k1 = deriv(x, u)
        k2 = deriv(x + 0.5 * dt * k1, u)
        k3 = deriv(x + 0.5 * dt * k2, u)
        k4 = deriv(x + dt * k3, u)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return pm
