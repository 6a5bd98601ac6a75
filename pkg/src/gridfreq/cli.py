"""Command-line front end: simulate, metrics, estimate and sweep workflows.

Exit codes: 0 success, 2 validation error (bad files, bad flags,
unidentifiable event), 3 numerical failure (diverged simulation). Every run
writes a manifest next to its outputs; reruns with identical inputs and
seeds produce byte-identical CSV files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from . import io as gio
from .estimation import (
    FullTemplate,
    PsoConfig,
    RecordedEvent,
    allocate_droops,
    estimate_full,
    estimate_reduced,
)
from .metrics import compute_report
from .model import Disturbance, ModelError
from .scenarios import MitigationSpec, sweep
from .simulator import SimConfig, SimulationDivergedError, simulate

OUTDIR_ENV = "GRIDFREQ_OUTDIR"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _outdir(args: argparse.Namespace) -> Path:
    out = args.out or os.environ.get(OUTDIR_ENV) or "gridfreq-out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _add_sim_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dp-gw", type=float, default=1.0, help="generation loss in GW (positive)")
    parser.add_argument("--area", choices=["ip", "ce"], default="ip", help="disturbed area")
    parser.add_argument("--t-start", type=float, default=1.0, help="disturbance start time, s")
    parser.add_argument("--dt", type=float, default=0.005, help="integration step, s")
    parser.add_argument("--t-end", type=float, default=60.0, help="simulation horizon, s")
    parser.add_argument("--sample-dt", type=float, default=0.01, help="output sampling interval, s")


def _sim_config(args: argparse.Namespace) -> SimConfig:
    return SimConfig(dt=args.dt, t_end=args.t_end, sample_dt=args.sample_dt)


def cmd_simulate(args: argparse.Namespace) -> int:
    outdir = _outdir(args)
    system = gio.load_model_file(args.model)
    dist = Disturbance(
        area=args.area.upper(),
        dp=args.dp_gw / system.base.s_base,
        t_start=args.t_start,
    )
    cfg = _sim_config(args)
    trace = simulate(system, dist, cfg)
    for warning in trace.warnings:
        print(f"warning: {warning}", file=sys.stderr)

    scenario_id = Path(args.model).stem
    trace_path = outdir / "trace.csv"
    metrics_path = outdir / "metrics.csv"
    gio.write_trace_csv(trace, trace_path)
    gio.write_metrics_csv(
        [(scenario_id, area, compute_report(trace, area)) for area in ("IP", "CE")],
        metrics_path,
    )
    gio.write_manifest(
        outdir,
        command="simulate",
        inputs={"model": args.model},
        config={
            "dp_gw": args.dp_gw,
            "area": args.area,
            "t_start": args.t_start,
            "dt": args.dt,
            "t_end": args.t_end,
            "sample_dt": args.sample_dt,
        },
    )
    report = compute_report(trace, dist.area)
    print(
        f"simulated {scenario_id}: nadir {report.nadir_hz:.4f} Hz at {report.t_nadir:.2f} s, "
        f"rocof100 {report.rocof[100.0]:.4f} Hz/s -> {trace_path}"
    )
    return EXIT_OK


def cmd_metrics(args: argparse.Namespace) -> int:
    outdir = _outdir(args)
    trace = gio.read_trace_csv(args.trace)
    scenario_id = Path(args.trace).stem
    metrics_path = outdir / "metrics.csv"
    gio.write_metrics_csv(
        [(scenario_id, area, compute_report(trace, area)) for area in ("IP", "CE")],
        metrics_path,
    )
    gio.write_manifest(outdir, command="metrics", inputs={"trace": args.trace}, config={})
    print(f"metrics for {scenario_id} -> {metrics_path}")
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace) -> int:
    outdir = _outdir(args)
    s_base = args.model_base if args.model_base is not None else 10.0
    trace = gio.read_event_csv(args.trace)
    dist, mix_ip, mix_ce = gio.read_event_sidecar(args.sidecar, s_base)
    event = RecordedEvent(trace=trace, dist=dist, mix_ip=mix_ip, mix_ce=mix_ce)
    cfg = PsoConfig(
        swarm_size=args.swarm,
        max_iters=args.iters,
        rng_seed=args.seed,
        chaos_seed=args.chaos_seed,
    )

    results = {}
    if args.stage in ("reduced", "both"):
        reduced = estimate_reduced(event, cfg)
        if reduced.unidentifiable:
            print(
                "error: event is unidentifiable (flat traces carry no disturbance "
                "information); check the trace and sidecar files",
                file=sys.stderr,
            )
            return EXIT_VALIDATION
        results["reduced"] = reduced
        from .estimation import ReducedTemplate

        gio.save_model_file(
            ReducedTemplate().instantiate(reduced.best_params),
            outdir / "params_reduced.json",
            notes=["reduced 8-parameter estimate"],
        )
        gio.write_runlog_csv(reduced.cost_history, outdir / "runlog_reduced.csv")

    if args.stage in ("full", "both"):
        if args.stage == "both":
            init = allocate_droops(results["reduced"], mix_ip, mix_ce)
        elif args.init is not None:
            with open(args.init, "r", encoding="utf-8") as fh:
                init = {k: float(v) for k, v in json.load(fh).items()}
        else:
            print("error: --stage full requires --init with a parameter file", file=sys.stderr)
            return EXIT_VALIDATION
        full = estimate_full(event, init, cfg)
        if full.unidentifiable:
            print("error: event is unidentifiable (flat traces)", file=sys.stderr)
            return EXIT_VALIDATION
        results["full"] = full
        template = FullTemplate(mix_ip=mix_ip, mix_ce=mix_ce)
        gio.save_model_file(
            template.instantiate(full.best_params),
            outdir / "params_full.json",
            notes=["full 14-parameter estimate"],
        )
        gio.write_runlog_csv(full.cost_history, outdir / "runlog_full.csv")

    gio.write_manifest(
        outdir,
        command="estimate",
        inputs={"trace": args.trace, "sidecar": args.sidecar},
        config={"stage": args.stage, "swarm": args.swarm, "iters": args.iters},
        seeds={"rng_seed": args.seed, "chaos_seed": args.chaos_seed},
    )
    for stage, result in results.items():
        active = (
            ", ".join(f"{k}={v:.4g}" for k, v in result.penalty_violations.items())
            if result.penalty_violations
            else "none"
        )
        print(
            f"{stage}: final cost {result.best_cost:.6g} Hz^2, "
            f"active penalties: {active}"
        )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    outdir = _outdir(args)
    anchor = gio.load_anchor_file(args.anchor)
    trajectory = gio.load_trajectory_file(args.trajectory)
    if args.halve_small_steam:
        trajectory = replace(trajectory, small_steam_halving=True)
    if args.with_sc:
        trajectory = replace(trajectory, mitigation=trajectory.mitigation or MitigationSpec())
    dist = Disturbance(
        area=args.area.upper(),
        dp=args.dp_gw / anchor.system.base.s_base,
        t_start=args.t_start,
    )
    cfg = _sim_config(args)
    rows = sweep(anchor, trajectory, dist, cfg)

    sweep_path = outdir / "sweep_metrics.csv"
    gio.write_sweep_csv(rows, sweep_path)
    plot_paths = gio.write_plot_csvs(rows, outdir, area="IP")
    if args.svg:
        ok_rows = [r for r in rows if r.area == "IP" and r.report is not None]
        xs = [r.year + ((r.month - 1) / 12.0 if r.month else 0.0) for r in ok_rows]
        gio.write_svg_chart(
            {"nadir (IP)": (xs, [r.report.nadir_hz for r in ok_rows])},
            outdir / "chart_nadir.svg",
            title=f"{trajectory.name}: frequency nadir",
            y_label="Hz",
        )
        gio.write_svg_chart(
            {
                "rocof100 (IP)": (xs, [r.report.rocof[100.0] for r in ok_rows]),
                "rocof500 (IP)": (xs, [r.report.rocof[500.0] for r in ok_rows]),
            },
            outdir / "chart_rocof.svg",
            title=f"{trajectory.name}: max sliding-window RoCoF",
            y_label="Hz/s",
        )
    gio.write_manifest(
        outdir,
        command="sweep",
        inputs={"anchor": args.anchor, "trajectory": args.trajectory},
        config={
            "halve_small_steam": args.halve_small_steam,
            "with_sc": args.with_sc,
            "dp_gw": args.dp_gw,
            "area": args.area,
            "t_start": args.t_start,
            "dt": args.dt,
            "t_end": args.t_end,
            "sample_dt": args.sample_dt,
        },
    )
    n_err = sum(1 for r in rows if r.status != "ok")
    print(
        f"swept {trajectory.name}: {len(rows)} rows ({n_err} errors) -> {sweep_path}; "
        f"plot data: {', '.join(str(p) for p in plot_paths)}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridfreq",
        description="Two-area grid frequency dynamics: simulate, metrics, estimate, sweep.",
    )
    parser.add_argument("--version", action="version", version=f"gridfreq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="simulate a step disturbance on a model file")
    p_sim.add_argument("--model", required=True, help="model configuration JSON")
    _add_sim_flags(p_sim)
    p_sim.add_argument("--out", help=f"output directory (default: ${OUTDIR_ENV} or ./gridfreq-out)")
    p_sim.set_defaults(func=cmd_simulate)

    p_met = sub.add_parser("metrics", help="compute stability metrics from a trace CSV")
    p_met.add_argument("--trace", required=True, help="trace CSV (t,f_ip,f_ce,p_tie)")
    p_met.add_argument("--out", help="output directory")
    p_met.set_defaults(func=cmd_metrics)

    p_est = sub.add_parser("estimate", help="identify model parameters from a recorded event")
    p_est.add_argument("--trace", required=True, help="recorded event CSV (t,f_ip,f_ce)")
    p_est.add_argument("--sidecar", required=True, help="event sidecar JSON (disturbance + mix)")
    p_est.add_argument("--stage", choices=["reduced", "full", "both"], default="both")
    p_est.add_argument("--init", help="initial full parameter JSON (for --stage full)")
    p_est.add_argument("--swarm", type=int, default=40)
    p_est.add_argument("--iters", type=int, default=300)
    p_est.add_argument("--seed", type=int, default=0, help="swarm RNG seed")
    p_est.add_argument("--chaos-seed", type=float, default=0.7, help="inertia chaos map seed")
    p_est.add_argument("--model-base", type=float, default=None, help="common base in GVA (default 10)")
    p_est.add_argument("--out", help="output directory")
    p_est.set_defaults(func=cmd_estimate)

    p_swp = sub.add_parser("sweep", help="sweep a disturbance across a scenario trajectory")
    p_swp.add_argument("--anchor", required=True, help="reference anchor JSON")
    p_swp.add_argument("--trajectory", required=True, help="scenario trajectory JSON")
    p_swp.add_argument("--halve-small-steam", action="store_true")
    p_swp.add_argument("--with-sc", action="store_true", help="add synchronous condensers")
    p_swp.add_argument("--svg", action="store_true", help="also write SVG charts")
    _add_sim_flags(p_swp)
    p_swp.add_argument("--out", help="output directory")
    p_swp.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SimulationDivergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
