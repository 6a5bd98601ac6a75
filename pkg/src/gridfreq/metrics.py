"""Frequency-stability indices: Nadir, sliding-window RoCoF, late-time mean.

RoCoF is measured as the endpoint difference of the frequency over a
sliding window (the common relay-measurement approximation), not as a
regression slope. Nadir is reported from the sampled points without
interpolation; at the default 10 ms sampling this bounds the error well
below 0.1 mHz for the dynamics considered here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .simulator import FrequencyTrace

__all__ = ["MetricsReport", "nadir", "rocof_sliding", "steady_state", "compute_report"]

#: Window lengths (ms) every report carries.
DEFAULT_WINDOWS_MS = (100.0, 500.0)
DEFAULT_TAIL_S = 10.0


@dataclass(frozen=True)
class MetricsReport:
    """Stability indices of one area for one simulated or recorded event."""

    nadir_hz: float
    t_nadir: float
    rocof: dict[float, float] = field(default_factory=dict)  # window ms -> Hz/s
    f_ss: float = float("nan")


def _series(trace: FrequencyTrace, area: str) -> np.ndarray:
    f = trace.frequency(area)
    if len(f) == 0:
        raise ValueError("empty trace")
    return f


def _uniform_dt(trace: FrequencyTrace) -> float:
    if len(trace.t) < 2:
        raise ValueError("trace needs at least two samples")
    dt = float(trace.t[1] - trace.t[0])
    diffs = np.diff(trace.t)
    if np.max(np.abs(diffs - dt)) > 1e-9:
        raise ValueError("trace is not uniformly sampled")
    return dt


def nadir(trace: FrequencyTrace, area: str) -> tuple[float, float]:
    """Minimum sampled frequency of ``area`` and its first attaining time."""
    f = _series(trace, area)
    idx = int(np.argmin(f))
    return float(f[idx]), float(trace.t[idx])


def rocof_sliding(trace: FrequencyTrace, area: str, window_ms: float) -> float:
    """Maximum |df/dt| over all placements of a ``window_ms`` endpoint window.

    The window must be a positive multiple of the sample interval and fit
    inside the trace.
    """
    f = _series(trace, area)
    dt = _uniform_dt(trace)
    window_s = window_ms / 1000.0
    if window_s < dt - 1e-12:
        raise ValueError(
            f"window {window_ms:g} ms is shorter than the sample interval {dt * 1e3:g} ms"
        )
    offset = int(round(window_s / dt))
    if abs(offset * dt - window_s) > 1e-9:
        raise ValueError(
            f"window {window_ms:g} ms is not a multiple of the sample interval"
        )
    if offset >= len(f):
        raise ValueError("window longer than trace")
    return float(np.max(np.abs(f[offset:] - f[:-offset])) / window_s)


def steady_state(trace: FrequencyTrace, area: str, tail_s: float) -> float:
    """Mean frequency of ``area`` over the final ``tail_s`` seconds."""
    f = _series(trace, area)
    _uniform_dt(trace)
    duration = float(trace.t[-1] - trace.t[0])
    if tail_s <= 0:
        raise ValueError("tail must be positive")
    if tail_s > duration + 1e-12:
        raise ValueError("tail longer than trace")
    mask = trace.t >= trace.t[-1] - tail_s + 1e-12
    return float(np.mean(f[mask]))


def compute_report(
    trace: FrequencyTrace,
    area: str,
    windows_ms: tuple[float, ...] = DEFAULT_WINDOWS_MS,
    tail_s: float = DEFAULT_TAIL_S,
) -> MetricsReport:
    """Full metrics report for one area of a trace."""
    nadir_hz, t_nadir = nadir(trace, area)
    rocof = {w: rocof_sliding(trace, area, w) for w in windows_ms}
    return MetricsReport(
        nadir_hz=nadir_hz,
        t_nadir=t_nadir,
        rocof=rocof,
        f_ss=steady_state(trace, area, tail_s),
    )
