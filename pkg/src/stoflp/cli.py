"""Command-line front end.

Subcommands: solve, hybrid, simulate, render, count, anova.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .ga import GaConfig, run_ga, write_generation_log
from .hybrid import DEFAULT_B_SET, HybridConfig, run_hybrid, winner_moved, write_trace
from .instance import InstanceError, candidate_flows, load_instance
from .sim import SimConfig, simulate_batch
from .slicing import count_solutions, overlap_area, parse_layout, render_layout, render_svg
from .stats import main_effects_anova, one_way_anova, tukey_hsd


class CliError(Exception):
    pass


@dataclass
class RunReport:
    command: list[str]
    instance_digest: str | None = None
    seed: int | None = None
    best_objective: float | None = None
    reference: float | None = None
    gap: float | None = None
    outputs: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def to_json(self) -> str:
        data = asdict(self)
        data.pop("wall_time")  # keeps report files reproducible under a fixed seed
        return json.dumps(data, indent=2, sort_keys=True) + "\n"


def gap(value: float, reference: float) -> float:
    return (value - reference) / reference


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("STOFLP_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _ga_config(args, seed: int, threads: int) -> GaConfig:
    return GaConfig(
        population_size=args.population,
        islands=args.islands,
        stall_limit=args.stall_limit,
        max_generations=args.max_generations,
        rng_seed=seed,
        threads=threads,
    )


def _write(path: Path, text: str, report: RunReport) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    report.outputs.append(str(path))


def cmd_solve(args, report: RunReport) -> None:
    inst = load_instance(args.instance)
    report.instance_digest = _digest(args.instance)
    report.seed = args.seed
    flow = candidate_flows(inst.flows, args.b)
    res = run_ga(inst, flow, _ga_config(args, args.seed, _threads(args)))
    report.best_objective = res.objective
    report.extra.update(handling_cost=res.handling, p_inf=res.layout.p_inf, generations=res.generations, b=args.b)
    print(f"objective {res.objective:.4f}  handling {res.handling:.4f}  infeasible {res.layout.p_inf}  generations {res.generations}")
    if args.reference is not None:
        report.reference = args.reference
        report.gap = gap(res.objective, args.reference)
        print(f"reference {args.reference}  gap {report.gap:.4f}")

    out = Path(args.out_dir)
    stem = inst.name or "instance"
    meta = {"objective": res.objective, "handling_cost": res.handling, "b": float(args.b), "seed": args.seed}
    _write(out / f"{stem}_layout.txt", render_layout(res.layout, meta, res.chromosome), report)
    _write(out / f"{stem}.svg", render_svg(res.layout), report)
    path = out / f"{stem}_generations.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_generation_log(res.log, fh)
    report.outputs.append(str(path))


def cmd_hybrid(args, report: RunReport) -> None:
    inst = load_instance(args.instance)
    if inst.initial_layout is None and inst.flows.is_deterministic:
        raise CliError("instance has deterministic flows and no initial layout; use 'solve' instead")
    report.instance_digest = _digest(args.instance)
    report.seed = args.seed
    threads = _threads(args)
    cfg = HybridConfig(
        initial_b_set=tuple(args.b_set),
        time_limit=args.time_limit,
        alpha=args.alpha,
        ga=_ga_config(args, args.seed, threads),
        sim=SimConfig(replications=args.reps, rng_seed=args.seed, threads=threads),
        rng_seed=args.seed,
        max_iterations=args.max_iterations,
    )
    res = run_hybrid(inst, cfg)
    moved = winner_moved(res, inst)
    report.best_objective = res.candidate.sim_mean
    report.extra.update(
        b=res.b, iterations=len(res.trace), stop_reason=res.stop_reason, moved=[int(m) for m in moved]
    )
    print(f"winner b={res.b:g}  simulated mean {res.candidate.sim_mean:.6g}  stop: {res.stop_reason}")
    print("moved departments:", " ".join(str(i + 1) for i in np.flatnonzero(moved)) or "none")

    out = Path(args.out_dir)
    stem = inst.name or "instance"
    meta = {"b": res.b, "sim_mean": res.candidate.sim_mean, "handling_cost": res.candidate.result.handling}
    _write(out / f"{stem}_hybrid_layout.txt", render_layout(res.layout, meta, res.candidate.result.chromosome), report)
    _write(out / f"{stem}_hybrid.svg", render_svg(res.layout), report)
    path = out / f"{stem}_trace.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_trace(res.trace, fh)
    report.outputs.append(str(path))
    _write(out / f"{stem}_anova.txt", res.anova.to_text() + "\n" + res.tukey.to_text(), report)
    _write(out / f"{stem}_anova.csv", res.anova.to_csv(), report)
    _write(out / f"{stem}_tukey.csv", res.tukey.to_csv(), report)


def cmd_simulate(args, report: RunReport) -> None:
    inst = load_instance(args.instance)
    report.instance_digest = _digest(args.instance)
    report.seed = args.seed
    layouts = []
    for p in args.layouts:
        try:
            layouts.append(parse_layout(Path(p).read_text(encoding="utf-8"), inst)[0])
        except InstanceError as exc:
            raise CliError(f"{p}: {exc}") from None
    cfg = SimConfig(replications=args.reps, rng_seed=args.seed, threads=_threads(args))
    summary = simulate_batch(layouts, inst, None, cfg)
    labels = [Path(p).stem for p in args.layouts]
    for label, m, v in zip(labels, summary.means, summary.variances):
        print(f"{label}: mean {m:.6g}  variance {v:.6g}  n {summary.samples.shape[1]}")
    report.extra.update(means=[float(m) for m in summary.means], variances=[float(v) for v in summary.variances])
    if len(layouts) >= 2:
        table = one_way_anova(summary.groups)
        tk = tukey_hsd(summary, args.alpha, labels=labels)
        print(table.to_text())
        print(tk.to_text())
        report.extra.update(anova_p=table.p, df_error=table.df_error)
    if args.samples_csv:
        path = Path(args.samples_csv)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            summary.write_csv(fh, labels)
        report.outputs.append(str(path))


def cmd_render(args, report: RunReport) -> None:
    inst = load_instance(args.instance)
    report.instance_digest = _digest(args.instance)
    layout = parse_layout(Path(args.layout).read_text(encoding="utf-8"), inst)[0]
    overlap = overlap_area(layout)
    if overlap > 1e-9 * inst.width * inst.height:
        report.warnings.append(f"rectangles overlap (total {overlap:.6g})")
        print(f"warning: layout rectangles overlap (total area {overlap:.6g})", file=sys.stderr)
    _write(Path(args.svg_out), render_svg(layout), report)


def cmd_count(args, report: RunReport) -> None:
    try:
        value = count_solutions(args.n, args.seeded)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    report.extra["count"] = str(value)
    print(f"{value}  ({value:.5E})")


def _read_columns(path):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise CliError(f"{path}: no data rows")
    return rows


def cmd_anova(args, report: RunReport) -> None:
    rows = _read_columns(args.csv)
    cols = list(rows[0].keys())
    if args.factors:
        factors = args.factors.split(",")
        response = args.response or cols[-1]
        y = [float(r[response]) for r in rows]
        table = main_effects_anova([[r[f] for r in rows] for f in factors], y, names=factors)
        print(table.to_text())
        report.extra["anova"] = table.to_csv()
        return
    group = args.group or ("layout" if "layout" in cols else cols[0])
    value = args.response or ("cost" if "cost" in cols else cols[-1])
    labels: list[str] = []
    data: dict[str, list[float]] = {}
    for r in rows:
        g = r[group]
        if g not in data:
            labels.append(g)
            data[g] = []
        data[g].append(float(r[value]))
    groups = [np.array(data[g]) for g in labels]
    table = one_way_anova(groups)
    tk = tukey_hsd(groups, args.alpha, labels=labels)
    print(table.to_text())
    print(tk.to_text())
    report.extra.update(anova_p=table.p)


def _add_ga_args(p):
    p.add_argument("--population", type=int, default=70)
    p.add_argument("--islands", type=int, default=4)
    p.add_argument("--stall-limit", type=int, default=300)
    p.add_argument("--max-generations", type=int, default=1000)


def _b_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stoflp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--threads", type=int, default=None, help="worker cap (default: $STOFLP_THREADS or all cores)")
    parser.add_argument("--report", help="write the run report as JSON to this path")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the GA on one deterministic flow candidate")
    p.add_argument("instance")
    p.add_argument("--b", type=float, default=0.0, help="flow candidate mean + b*std (default 0)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default="out")
    p.add_argument("--reference", type=float, help="best-known objective for the gap column")
    _add_ga_args(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("hybrid", help="candidate-flow search with simulation and ANOVA")
    p.add_argument("instance")
    p.add_argument("--b-set", type=_b_list, default=list(DEFAULT_B_SET))
    p.add_argument("--time-limit", type=float, default=3600.0)
    p.add_argument("--max-iterations", type=int, default=50)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default="out")
    _add_ga_args(p)
    p.set_defaults(func=cmd_hybrid)

    p = sub.add_parser("simulate", help="simulate saved layouts and compare them")
    p.add_argument("instance")
    p.add_argument("layouts", nargs="+")
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--samples-csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("render", help="render a layout file as SVG")
    p.add_argument("instance")
    p.add_argument("layout")
    p.add_argument("svg_out")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("count", help="size of the slicing-tree search space")
    p.add_argument("n", type=int)
    p.add_argument("--seeded", action="store_true")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("anova", help="ANOVA and Tukey tables for a CSV of samples")
    p.add_argument("csv")
    p.add_argument("--group", help="group column (default: 'layout' or the first column)")
    p.add_argument("--response", help="response column (default: 'cost' or the last column)")
    p.add_argument("--factors", help="comma-separated factor columns for a main-effects ANOVA")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_anova)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    report = RunReport(command=argv)
    start = time.perf_counter()
    try:
        args.func(args, report)
    except (CliError, InstanceError, OSError, ValueError) as exc:
        print(f"stoflp {args.command}: error: {exc}", file=sys.stderr)
        return 1
    report.wall_time = time.perf_counter() - start
    print(f"wall time {report.wall_time:.2f}s", file=sys.stderr)
    if args.report:
        path = Path(args.report)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report.to_json(), encoding="utf-8")
    return 0
