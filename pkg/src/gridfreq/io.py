"""File formats: model/anchor/trajectory JSON, trace/metrics CSV, manifests.

All numeric output is written with nine significant digits so reruns with
identical inputs produce byte-identical files on any platform. Every CSV
emitted here is round-trip parseable by the readers in this module.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from . import __version__
from .metrics import MetricsReport
from .model import Disturbance, ModelError, TwoAreaSystem, build_system, system_to_config
from .scenarios import (
    DispatchSnapshot,
    MitigationSpec,
    ReferenceAnchor,
    ScenarioTrajectory,
    SweepRow,
    TrajectoryEntry,
)
from .simulator import FrequencyTrace

__all__ = [
    "fmt9",
    "sha256_file",
    "load_model_file",
    "save_model_file",
    "load_anchor_file",
    "load_trajectory_file",
    "save_trajectory_file",
    "write_trace_csv",
    "read_trace_csv",
    "metrics_csv_header",
    "metrics_row",
    "write_metrics_csv",
    "write_sweep_csv",
    "write_plot_csvs",
    "write_runlog_csv",
    "write_svg_chart",
    "read_event_csv",
    "read_event_sidecar",
    "write_event_csv",
    "write_event_sidecar",
    "write_manifest",
]


def fmt9(x: float) -> str:
    """Nine-significant-digit decimal rendering used in all CSV output."""
    return f"{x:.9g}"


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _load_json(path: str | Path) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: not valid JSON ({exc})") from None


# --------------------------------------------------------------------------- #
# Model and anchor files
# --------------------------------------------------------------------------- #


def load_model_file(path: str | Path) -> TwoAreaSystem:
    raw = _load_json(path)
    try:
        return build_system(raw)
    except ModelError as exc:
        raise ModelError(f"{path}: {exc}") from None


def save_model_file(sys: TwoAreaSystem, path: str | Path, notes: list[str] | None = None) -> None:
    config = system_to_config(sys)
    if notes:
        config["notes"] = notes
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2, sort_keys=False)
        fh.write("\n")


def _snapshot_from_dict(raw: Mapping[str, Any], snap_id: str, area: str) -> DispatchSnapshot:
    pg = {str(k): float(v) for k, v in raw.get("pg", {}).items()}
    return DispatchSnapshot(id=snap_id, area=area, pg=pg, load=float(raw["load"]))


def _snapshot_to_dict(snap: DispatchSnapshot) -> dict[str, Any]:
    return {"pg": dict(snap.pg), "load": snap.load}


def load_anchor_file(path: str | Path) -> ReferenceAnchor:
    raw = _load_json(path)
    if "model" not in raw or "mix_o" not in raw:
        raise ModelError(f"{path}: anchor file needs 'model' and 'mix_o' sections")
    try:
        system = build_system(raw["model"])
        mix_ip = _snapshot_from_dict(raw["mix_o"]["area_ip"], "anchor-mix", "IP")
        mix_ce = _snapshot_from_dict(raw["mix_o"]["area_ce"], "anchor-mix", "CE")
        return ReferenceAnchor(system=system, mix_ip=mix_ip, mix_ce=mix_ce)
    except (KeyError, ModelError, ValueError) as exc:
        raise ModelError(f"{path}: {exc}") from None


def save_anchor_file(
    anchor: ReferenceAnchor,
    path: str | Path,
    typical_inertia: Mapping[str, float] | None = None,
    notes: list[str] | None = None,
) -> None:
    payload: dict[str, Any] = {
        "model": system_to_config(anchor.system),
        "mix_o": {
            "area_ip": _snapshot_to_dict(anchor.mix_ip),
            "area_ce": _snapshot_to_dict(anchor.mix_ce),
        },
    }
    if typical_inertia is not None:
        payload["typical_inertia"] = dict(typical_inertia)
    if notes:
        payload["notes"] = notes
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


# --------------------------------------------------------------------------- #
# Trajectory files
# --------------------------------------------------------------------------- #


def load_trajectory_file(path: str | Path) -> ScenarioTrajectory:
    raw = _load_json(path)
    try:
        name = str(raw["name"])
        variants = raw.get("variants", {})
        mitigation_raw = variants.get("mitigation")
        mitigation = None
        if mitigation_raw is not None:
            mitigation = MitigationSpec(
                count=int(mitigation_raw["count"]),
                h_each=float(mitigation_raw["h_each"]),
                rating_each=float(mitigation_raw["rating_each"]),
                online_from=int(mitigation_raw["online_from"]),
            )
        entries = []
        for snap in raw["snapshots"]:
            year = int(snap["year"])
            month = int(snap["month"]) if "month" in snap and snap["month"] is not None else None
            suffix = f"{year}" if month is None else f"{year}-{month:02d}"
            entries.append(
                TrajectoryEntry(
                    year=year,
                    month=month,
                    ip=_snapshot_from_dict(snap["area_ip"], f"{name}-{suffix}", "IP"),
                    ce=_snapshot_from_dict(snap["area_ce"], f"{name}-{suffix}", "CE"),
                )
            )
        return ScenarioTrajectory(
            name=name,
            entries=tuple(entries),
            small_steam_halving=bool(variants.get("small_steam_halving", False)),
            mitigation=mitigation,
        )
    except (KeyError, TypeError, ValueError, ModelError) as exc:
        raise ModelError(f"{path}: {exc}") from None


def save_trajectory_file(
    traj: ScenarioTrajectory, path: str | Path, notes: list[str] | None = None
) -> None:
    payload: dict[str, Any] = {
        "name": traj.name,
        "variants": {
            "small_steam_halving": traj.small_steam_halving,
            "mitigation": None
            if traj.mitigation is None
            else {
                "count": traj.mitigation.count,
                "h_each": traj.mitigation.h_each,
                "rating_each": traj.mitigation.rating_each,
                "online_from": traj.mitigation.online_from,
            },
        },
        "snapshots": [
            {
                "year": e.year,
                **({"month": e.month} if e.month is not None else {}),
                "area_ip": _snapshot_to_dict(e.ip),
                "area_ce": _snapshot_to_dict(e.ce),
            }
            for e in traj.entries
        ],
    }
    if notes:
        payload["notes"] = notes
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


# --------------------------------------------------------------------------- #
# Traces
# --------------------------------------------------------------------------- #


def write_trace_csv(trace: FrequencyTrace, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "f_ip", "f_ce", "p_tie"])
        p_tie = trace.p_tie if trace.p_tie is not None else np.zeros(len(trace.t))
        for k in range(len(trace.t)):
            writer.writerow(
                [fmt9(trace.t[k]), fmt9(trace.f_ip[k]), fmt9(trace.f_ce[k]), fmt9(p_tie[k])]
            )


def read_trace_csv(path: str | Path) -> FrequencyTrace:
    t, f_ip, f_ce, p_tie = [], [], [], []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:4]] != ["t", "f_ip", "f_ce", "p_tie"]:
            raise ModelError(f"{path}: expected header 't,f_ip,f_ce,p_tie'")
        for row in reader:
            if not row:
                continue
            t.append(float(row[0]))
            f_ip.append(float(row[1]))
            f_ce.append(float(row[2]))
            p_tie.append(float(row[3]))
    return FrequencyTrace(
        t=np.array(t), f_ip=np.array(f_ip), f_ce=np.array(f_ce), p_tie=np.array(p_tie)
    )


# --------------------------------------------------------------------------- #
# Metrics and sweep CSV
# --------------------------------------------------------------------------- #

METRICS_HEADER = ["scenario_id", "area", "nadir_hz", "t_nadir", "rocof100", "rocof500", "f_ss"]


def metrics_csv_header() -> list[str]:
    return list(METRICS_HEADER)


def metrics_row(scenario_id: str, area: str, report: MetricsReport) -> list[str]:
    return [
        scenario_id,
        area,
        fmt9(report.nadir_hz),
        fmt9(report.t_nadir),
        fmt9(report.rocof.get(100.0, float("nan"))),
        fmt9(report.rocof.get(500.0, float("nan"))),
        fmt9(report.f_ss),
    ]


def write_metrics_csv(rows: Iterable[tuple[str, str, MetricsReport]], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRICS_HEADER)
        for scenario_id, area, report in rows:
            writer.writerow(metrics_row(scenario_id, area, report))


def write_sweep_csv(rows: Sequence[SweepRow], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRICS_HEADER + ["status"])
        for row in rows:
            if row.report is not None:
                writer.writerow(metrics_row(row.scenario_id, row.area, row.report) + [row.status])
            else:
                writer.writerow([row.scenario_id, row.area, "", "", "", "", "", row.status])


def write_plot_csvs(rows: Sequence[SweepRow], outdir: str | Path, area: str = "IP") -> list[Path]:
    """Plot-data extraction: year(/month) against nadir and RoCoF for one area."""
    outdir = Path(outdir)
    selected = [r for r in rows if r.area == area.upper() and r.report is not None]
    nadir_path = outdir / f"plot_{area.lower()}_nadir.csv"
    rocof_path = outdir / f"plot_{area.lower()}_rocof.csv"
    with open(nadir_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["year", "month", "nadir_hz"])
        for r in selected:
            writer.writerow([r.year, "" if r.month is None else r.month, fmt9(r.report.nadir_hz)])
    with open(rocof_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["year", "month", "rocof100", "rocof500"])
        for r in selected:
            writer.writerow(
                [
                    r.year,
                    "" if r.month is None else r.month,
                    fmt9(r.report.rocof.get(100.0, float("nan"))),
                    fmt9(r.report.rocof.get(500.0, float("nan"))),
                ]
            )
    return [nadir_path, rocof_path]


def write_runlog_csv(history: np.ndarray, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "best_cost"])
        for k, cost in enumerate(history):
            writer.writerow([k, fmt9(float(cost))])


# --------------------------------------------------------------------------- #
# Self-contained SVG line chart
# --------------------------------------------------------------------------- #


def write_svg_chart(
    series: Mapping[str, tuple[Sequence[float], Sequence[float]]],
    path: str | Path,
    title: str,
    y_label: str,
    width: int = 720,
    height: int = 420,
) -> None:
    """Write a minimal deterministic SVG line chart (no external assets)."""
    margin_l, margin_r, margin_t, margin_b = 64, 16, 36, 44
    plot_w = width - margin_l - margin_r
    plot_h = height - margin_t - margin_b

    xs_all = [x for xs, _ in series.values() for x in xs]
    ys_all = [y for _, ys in series.values() for y in ys]
    if not xs_all:
        xs_all, ys_all = [0.0, 1.0], [0.0, 1.0]
    x_min, x_max = min(xs_all), max(xs_all)
    y_min, y_max = min(ys_all), max(ys_all)
    if x_max == x_min:
        x_max = x_min + 1.0
    if y_max == y_min:
        y_max = y_min + 1.0
    pad = 0.05 * (y_max - y_min)
    y_min, y_max = y_min - pad, y_max + pad

    def sx(x: float) -> float:
        return margin_l + (x - x_min) / (x_max - x_min) * plot_w

    def sy(y: float) -> float:
        return margin_t + (y_max - y) / (y_max - y_min) * plot_h

    colors = ["#1f6fb2", "#c0392b", "#27824f", "#8e6fb2", "#b28a1f"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
    ]
    # axes
    parts.append(
        f'<line x1="{margin_l}" y1="{margin_t}" x2="{margin_l}" '
        f'y2="{margin_t + plot_h}" stroke="#444" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{margin_l}" y1="{margin_t + plot_h}" x2="{margin_l + plot_w}" '
        f'y2="{margin_t + plot_h}" stroke="#444" stroke-width="1"/>'
    )
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        yv = y_min + frac * (y_max - y_min)
        yy = sy(yv)
        parts.append(
            f'<line x1="{margin_l - 4}" y1="{yy:.2f}" x2="{margin_l}" y2="{yy:.2f}" stroke="#444"/>'
        )
        parts.append(
            f'<text x="{margin_l - 8}" y="{yy + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{yv:.4g}</text>'
        )
        xv = x_min + frac * (x_max - x_min)
        xx = sx(xv)
        parts.append(
            f'<line x1="{xx:.2f}" y1="{margin_t + plot_h}" x2="{xx:.2f}" '
            f'y2="{margin_t + plot_h + 4}" stroke="#444"/>'
        )
        parts.append(
            f'<text x="{xx:.2f}" y="{margin_t + plot_h + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{xv:.5g}</text>'
        )
    parts.append(
        f'<text x="16" y="{margin_t + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {margin_t + plot_h / 2:.1f})">{y_label}</text>'
    )
    for i, (label, (xs, ys)) in enumerate(series.items()):
        color = colors[i % len(colors)]
        points = " ".join(f"{sx(float(x)):.2f},{sy(float(y)):.2f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.6"/>'
        )
        parts.append(
            f'<text x="{margin_l + plot_w - 6}" y="{margin_t + 16 + 16 * i}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


# --------------------------------------------------------------------------- #
# Recorded events
# --------------------------------------------------------------------------- #


def read_event_csv(path: str | Path) -> FrequencyTrace:
    """Ingest a recorded event CSV ``t,f_ip,f_ce`` (Hz, s, uniform rate).

    The time axis is shifted to start at zero. Slightly irregular grids are
    resampled by linear interpolation onto an exactly uniform grid at the
    median interval; grossly irregular files are rejected.
    """
    t, f_ip, f_ce = [], [], []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["t", "f_ip", "f_ce"]:
            raise ModelError(f"{path}: expected header 't,f_ip,f_ce'")
        for row in reader:
            if not row:
                continue
            t.append(float(row[0]))
            f_ip.append(float(row[1]))
            f_ce.append(float(row[2]))
    if len(t) < 2:
        raise ModelError(f"{path}: needs at least two samples")
    t_arr = np.array(t) - t[0]
    f_ip_arr, f_ce_arr = np.array(f_ip), np.array(f_ce)
    diffs = np.diff(t_arr)
    if np.any(diffs <= 0):
        raise ModelError(f"{path}: time column must be strictly increasing")
    dt = float(np.median(diffs))
    if np.max(np.abs(diffs - dt)) > 0.05 * dt:
        raise ModelError(f"{path}: sampling is too irregular to resample")
    if np.max(np.abs(diffs - dt)) > 1e-9:
        n = int(np.floor(t_arr[-1] / dt + 1e-9)) + 1
        grid = np.arange(n) * dt
        f_ip_arr = np.interp(grid, t_arr, f_ip_arr)
        f_ce_arr = np.interp(grid, t_arr, f_ce_arr)
        t_arr = grid
    else:
        t_arr = np.arange(len(t_arr)) * dt
    return FrequencyTrace(t=t_arr, f_ip=f_ip_arr, f_ce=f_ce_arr, p_tie=None)


def write_event_csv(trace: FrequencyTrace, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "f_ip", "f_ce"])
        for k in range(len(trace.t)):
            writer.writerow([fmt9(trace.t[k]), fmt9(trace.f_ip[k]), fmt9(trace.f_ce[k])])


def read_event_sidecar(
    path: str | Path, s_base: float
) -> tuple[Disturbance, DispatchSnapshot, DispatchSnapshot]:
    """Sidecar JSON: the known outage (area, MW, start time) and event mix."""
    raw = _load_json(path)
    try:
        dist_raw = raw["disturbance"]
        dist = Disturbance(
            area=str(dist_raw["area"]),
            dp=float(dist_raw["mw"]) / (s_base * 1000.0),
            t_start=float(dist_raw["t_start"]),
        )
        mix_ip = _snapshot_from_dict(raw["mix"]["area_ip"], "event-mix", "IP")
        mix_ce = _snapshot_from_dict(raw["mix"]["area_ce"], "event-mix", "CE")
        return dist, mix_ip, mix_ce
    except (KeyError, TypeError, ValueError, ModelError) as exc:
        raise ModelError(f"{path}: {exc}") from None


def write_event_sidecar(
    dist: Disturbance,
    mix_ip: DispatchSnapshot,
    mix_ce: DispatchSnapshot,
    s_base: float,
    path: str | Path,
    notes: list[str] | None = None,
) -> None:
    payload: dict[str, Any] = {
        "disturbance": {
            "area": dist.area,
            "mw": dist.dp * s_base * 1000.0,
            "t_start": dist.t_start,
        },
        "mix": {
            "area_ip": _snapshot_to_dict(mix_ip),
            "area_ce": _snapshot_to_dict(mix_ce),
        },
    }
    if notes:
        payload["notes"] = notes
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


# --------------------------------------------------------------------------- #
# Run manifest
# --------------------------------------------------------------------------- #


def write_manifest(
    outdir: str | Path,
    command: str,
    inputs: Mapping[str, str | Path],
    config: Mapping[str, Any],
    seeds: Mapping[str, Any] | None = None,
) -> Path:
    """Write the single run manifest of an output directory."""
    manifest = {
        "command": command,
        "tool_version": __version__,
        "inputs": {
            label: {"path": str(p), "sha256": sha256_file(p)} for label, p in inputs.items()
        },
        "seeds": dict(seeds or {}),
        "config": dict(config),
        "wall_clock_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    path = Path(outdir) / "manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return path
