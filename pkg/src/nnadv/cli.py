"""Command-line front end: generate, certify, sweep, draw.

Emissions are byte-deterministic for a fixed invocation: CSV uses a fixed
column schema, JSON is emitted with sorted keys, and irrational lengths
are printed with 12 significant digits.  ``NN_ADV_THREADS`` optionally
parallelizes independent certification cells; the output order never
changes.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict

from .construction import build_adversarial_tour, certify_adversarial_tour
from .engine import (
    Adversarial,
    IndexOrder,
    Lexicographic,
    TourPath,
    dumps_tour,
    loads_tour,
    measure_length,
    start_sweep,
)
from .family import Instance, build_unit_graph, family_instance
from .metrics import GraphicMetric, parse_metric
from .optimum import LOWER_BOUND_NOTE, perimeter_tour, ratio_bounds
from .perturb import perturb
from .svg import render_svg
from .tsplib import dumps_tsplib

CSV_HEADER = "k,n,metric,policy,start,open_len,closed_len,opt,ratio_open,ratio_closed,chain,lower_bound,upper_bound"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _k_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo_i, hi_i = int(lo), int(hi)
        if lo_i < 0 or hi_i < lo_i:
            raise argparse.ArgumentTypeError(f"bad level range {text!r}")
        return list(range(lo_i, hi_i + 1))
    return [_nonneg_int(text)]


def _policies(text: str):
    out = []
    for token in text.split(","):
        name = token.strip().lower()
        if name in ("lex", "lexicographic"):
            out.append(Lexicographic())
        elif name in ("index", "index_order"):
            out.append(IndexOrder())
        else:
            raise argparse.ArgumentTypeError(f"unknown policy {name!r}")
    if not out:
        raise argparse.ArgumentTypeError("no policy given")
    return out


def _emit(text: str, output: str | None, summary: str | None = None) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        if summary:
            print(summary)
    else:
        if summary:
            print(summary, file=sys.stderr)
        sys.stdout.write(text)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("NN_ADV_THREADS", "1")))
    except ValueError:
        return 1


def _instance_json(instance: Instance) -> dict:
    metric = instance.metric
    doc = {
        "n": instance.n,
        "k": instance.family_k,
        "scale": instance.scale,
        "cities": [[c.x, c.y] for c in instance.cities],
        "landmark_l": instance.landmark_l,
        "landmark_m": instance.landmark_m,
        "metric": {"kind": metric.name} if isinstance(metric, GraphicMetric) else {"kind": "lp", "p": metric.p},
    }
    if isinstance(metric, GraphicMetric):
        doc["edges"] = [list(e) for e in metric.edges]
    return doc


def cmd_generate(args) -> int:
    instance = family_instance(args.k, args.metric)
    if args.scale is not None:
        instance = perturb(instance, args.perturb, args.scale, args.seed)
    elif args.perturb != "none":
        raise ValueError("--perturb needs --scale (the refined lattice resolution)")

    if args.format == "tsplib":
        text = dumps_tsplib(instance)
    elif args.format == "json":
        text = json.dumps(_instance_json(instance), indent=2, sort_keys=True) + "\n"
    else:
        raise ValueError(f"generate cannot write format {args.format!r}")
    summary = f"n={instance.n} l={instance.landmark_l} m={instance.landmark_m} scale={instance.scale}"
    _emit(text, args.output, summary)
    return 0


def _certify_cell(k: int, metric_text: str, tour: TourPath | None) -> dict:
    instance = family_instance(k, metric_text)
    report = certify_adversarial_tour(k, instance=instance, tour=tour)
    order = (tour or build_adversarial_tour(k).tour).order
    _, closed_len = measure_length(instance, order, closed=True)
    bounds = ratio_bounds(instance.n, k)
    opt = float(instance.n)
    open_len = report.measured_length if report.measured_length is not None else math.nan
    return {
        "k": k,
        "n": instance.n,
        "metric": report.metric,
        "policy": "adversarial",
        "start": instance.landmark_l,
        "open_len": open_len,
        "closed_len": closed_len,
        "opt": opt,
        "ratio_open": open_len / opt,
        "ratio_closed": closed_len / opt,
        "chain": bounds.chain_value,
        "lower_bound": bounds.lower_bound,
        "upper_bound": bounds.upper_bound,
        "visits_all_cities": report.visits_all_cities,
        "endpoints_match": report.endpoints_match,
        "length_matches": report.length_matches,
        "nnr_weak_valid": report.nnr_weak_valid,
        "passed": report.passed,
        "predicted_length": report.predicted_length,
        "jump_tie_sizes": list(report.jump_tie_sizes),
        "failure": None if report.passed else report.failures(),
    }


def cmd_certify(args) -> int:
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    tour = None
    if args.tour:
        with open(args.tour, encoding="utf-8") as fh:
            tour = loads_tour(fh.read())
    cells = [(k, metric) for k in args.k for metric in metrics]
    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda cell: _certify_cell(cell[0], cell[1], tour), cells))
    else:
        rows = [_certify_cell(k, metric, tour) for k, metric in cells]

    all_passed = all(row["passed"] for row in rows)
    if args.format == "csv":
        lines = [CSV_HEADER]
        for row in rows:
            lines.append(",".join(_fmt(row[col]) for col in CSV_HEADER.split(",")))
        text = "\n".join(lines) + "\n"
    elif args.format == "json":
        text = json.dumps({"note": LOWER_BOUND_NOTE, "rows": rows}, indent=2, sort_keys=True) + "\n"
    else:
        lines = []
        for row in rows:
            checks = [
                row["visits_all_cities"],
                row["endpoints_match"],
                row["length_matches"],
                row["nnr_weak_valid"],
            ]
            marks = "".join(letter if ok else "-" for letter, ok in zip("abcd", checks))
            status = "PASS" if row["passed"] else f"FAIL ({row['failure']})"
            lines.append(
                f"k={row['k']:<2d} metric={row['metric']:<7s} n={row['n']:<5d} checks={marks} "
                f"open={_fmt(row['open_len']):>6s} ratio_open={row['ratio_open']:.6f} "
                f"chain={row['chain']:.4f} jump_ties={row['jump_tie_sizes']} {status}"
            )
        lines.append(f"note: {LOWER_BOUND_NOTE}")
        lines.append("all checks passed" if all_passed else "CERTIFICATION FAILED")
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)

    if args.tour_out:
        if len(args.k) != 1:
            raise ValueError("--tour-out needs a single level")
        with open(args.tour_out, "w", encoding="utf-8") as fh:
            fh.write(dumps_tour(build_adversarial_tour(args.k[0]).tour))
    return 0 if all_passed else 1


def cmd_sweep(args) -> int:
    instance = family_instance(args.k, args.metric)
    starts = None if args.start is None else [args.start]
    rows = start_sweep(instance, args.policy, starts)
    bounds = ratio_bounds(instance.n, args.k)
    records = [
        {
            "k": args.k,
            "n": instance.n,
            "metric": instance.metric.name,
            "policy": row.policy,
            "start": row.start,
            "open_len": row.open_length,
            "closed_len": row.closed_length,
            "opt": row.optimum,
            "ratio_open": row.ratio_open,
            "ratio_closed": row.ratio_closed,
            "chain": bounds.chain_value,
            "lower_bound": bounds.lower_bound,
            "upper_bound": bounds.upper_bound,
            "weak_valid": row.weak_valid,
        }
        for row in rows
    ]
    if args.format == "json":
        text = json.dumps(records, indent=2, sort_keys=True) + "\n"
    else:
        lines = [CSV_HEADER]
        for rec in records:
            lines.append(",".join(_fmt(rec[col]) for col in CSV_HEADER.split(",")))
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return 0


def cmd_draw(args) -> int:
    instance = family_instance(args.k, args.metric)
    choice = args.tour
    if choice == "adversarial":
        tour = build_adversarial_tour(args.k).tour
    elif choice == "perimeter":
        tour, _ = perimeter_tour(instance)
    elif choice == "none":
        tour = None
    else:
        with open(choice, encoding="utf-8") as fh:
            tour = loads_tour(fh.read())
    _emit(render_svg(instance, tour), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nnadv",
        description="Worst-case grid instances for the nearest-neighbor TSP heuristic.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate an instance file")
    gen.add_argument("--k", type=_nonneg_int, required=True, help="family level")
    gen.add_argument("--metric", default="l2", help="l1, l2, l3, l1.5, linf, or graphic")
    gen.add_argument("--format", choices=["tsplib", "json"], default="tsplib")
    gen.add_argument("--scale", type=int, default=None, help="refine the lattice to this scale")
    gen.add_argument("--perturb", choices=["none", "strictify"], default="none")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--output", "-o", default=None)
    gen.set_defaults(func=cmd_generate)

    cert = sub.add_parser("certify", help="machine-check the forced tours")
    cert.add_argument("--k", type=_k_range, required=True, help="level or range, e.g. 3 or 0..8")
    cert.add_argument("--metrics", default="l1,l2,linf,l3,graphic", help="comma-separated metric list")
    cert.add_argument("--format", choices=["table", "csv", "json"], default="table")
    cert.add_argument("--tour", default=None, help="certify this tour file instead of the built tour")
    cert.add_argument("--tour-out", default=None, help="also write the built tour in interchange format")
    cert.add_argument("--output", "-o", default=None)
    cert.set_defaults(func=cmd_certify)

    sweep = sub.add_parser("sweep", help="run every start city under deterministic policies")
    sweep.add_argument("--k", type=_nonneg_int, required=True)
    sweep.add_argument("--metric", default="l2")
    sweep.add_argument("--policy", type=_policies, default=[Lexicographic()])
    sweep.add_argument("--start", type=_nonneg_int, default=None, help="single start (default: all)")
    sweep.add_argument("--format", choices=["csv", "json"], default="csv")
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--output", "-o", default=None)
    sweep.set_defaults(func=cmd_sweep)

    draw = sub.add_parser("draw", help="render an instance and a tour as SVG")
    draw.add_argument("--k", type=_nonneg_int, required=True)
    draw.add_argument("--metric", default="l2")
    draw.add_argument("--tour", default="adversarial", help="adversarial, perimeter, none, or a tour file")
    draw.add_argument("--output", "-o", default=None)
    draw.set_defaults(func=cmd_draw)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        parse_metric(getattr(args, "metric", "l2"))  # fail fast on bad metric flags
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
