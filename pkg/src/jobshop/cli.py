"""Benchmark harness: run the solver over instance/seed grids.

Reads plain or earliness/tardiness instances, optionally derives
lag-bounded variants, runs one optimization per (instance, seed) cell,
and writes a JSONL (or CSV) stream of per-run reports plus a per-instance
CSV summary.  Cells are independent; a process pool can run them in
parallel without changing any result because every cell draws from its
own counter-based random stream.

Exit status 0 means the matrix completed (individual cell errors are
recorded in the reports); 2 means the configuration was unusable.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import zlib
from dataclasses import asdict, dataclass
from fractions import Fraction
from multiprocessing import Pool
from pathlib import Path

from .io import derive_time_lag, parse_et, parse_jsp, validate_solution
from .models import build_model
from .search import SearchConfig, optimize

__all__ = ["prd", "gmr", "run", "main", "RunReport"]

HEURISTIC_NAMES = {
    "tdom-tw": "tdom_over_tw",
    "tdom-bw": "tdom_plus_bw",
    "dom-wdeg": "dom_over_wdeg",
}


def prd(cost: float, ref: float) -> float:
    """Percent relative deviation of a cost from a reference value."""
    if ref <= 0:
        raise ValueError("reference cost must be positive")
    return (cost - ref) / ref * 100.0


def gmr(costs, refs) -> float:
    """Geometric mean of the paired ratios cost_i / ref_i."""
    if len(costs) != len(refs):
        raise ValueError("cost and reference lists differ in length")
    if not costs:
        raise ValueError("need at least one pair")
    acc = 0.0
    for c, r in zip(costs, refs):
        if c <= 0 or r <= 0:
            raise ValueError("ratios need positive costs")
        acc += math.log(c / r)
    return math.exp(acc / len(costs))


@dataclass
class RunReport:
    """Result of one (instance, seed) cell."""

    instance: str
    variant: str
    seed: int
    objective: int | None
    proven: bool
    lower_bound: int | None
    failures: int
    restarts: int
    nodes: int
    wall_time: float
    error: str | None = None


def _solve_cell(payload) -> RunReport:
    (path, name, model_kind, lag, seed, cfg_fields, time_limit) = payload
    try:
        text = Path(path).read_text()
        if model_kind == "et":
            inst = parse_et(text, name)
        else:
            inst = parse_jsp(text, name)
        if lag is not None:
            inst = derive_time_lag(inst, 0, lag)
        config = SearchConfig(
            seed=seed,
            stream_key=zlib.crc32(inst.name.encode()),
            **cfg_fields,
        )
        model = build_model(inst, model_kind)
        result = optimize(model, config, time_limit=time_limit)
        if result.best is not None:
            err = validate_solution(inst, result.best)
            if err is not None:
                raise RuntimeError(f"solver returned an invalid schedule: {err}")
        return RunReport(
            instance=inst.name,
            variant=model_kind,
            seed=seed,
            objective=result.best.objective if result.best else None,
            proven=result.status == "optimal",
            lower_bound=result.lower_bound,
            failures=result.stats.fails,
            restarts=result.stats.restarts,
            nodes=result.stats.nodes,
            wall_time=round(result.stats.time, 3),
        )
    except Exception as exc:  # cell errors are reported, never fatal
        return RunReport(
            instance=name,
            variant=model_kind,
            seed=seed,
            objective=None,
            proven=False,
            lower_bound=None,
            failures=0,
            restarts=0,
            nodes=0,
            wall_time=0.0,
            error=f"{type(exc).__name__}: {exc}",
        )


def run(payloads, jobs: int = 1) -> list[RunReport]:
    """Solve every cell, optionally across a process pool; order is kept."""
    if jobs > 1 and len(payloads) > 1:
        with Pool(processes=jobs) as pool:
            return pool.map(_solve_cell, payloads)
    return [_solve_cell(p) for p in payloads]


def _load_refs(path: str) -> dict[str, float]:
    refs = {}
    for line in Path(path).read_text().splitlines():
        line = line.replace(",", " ").strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise ValueError(f"bad reference line {line!r}")
        refs[parts[0]] = float(parts[1])
    return refs


def _summarize(reports: list[RunReport], refs: dict[str, float]) -> list[dict]:
    by_inst: dict[str, list[RunReport]] = {}
    order: list[str] = []
    for r in reports:
        if r.instance not in by_inst:
            by_inst[r.instance] = []
            order.append(r.instance)
        by_inst[r.instance].append(r)
    rows = []
    for name in order:
        cells = by_inst[name]
        objs = [c.objective for c in cells if c.objective is not None]
        row = {
            "instance": name,
            "variant": cells[0].variant,
            "runs": len(cells),
            "errors": sum(1 for c in cells if c.error),
            "best": min(objs) if objs else None,
            "worst": max(objs) if objs else None,
            "proven": any(c.proven for c in cells),
            "prd": None,
        }
        if objs and name in refs:
            row["prd"] = round(prd(min(objs), refs[name]), 2)
        rows.append(row)
    return rows


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="jobshop-bench",
        description="job-shop scheduling benchmark harness",
    )
    ap.add_argument(
        "--model",
        required=True,
        choices=["jsp", "et", "tl", "nw-task", "nw-interval"],
    )
    ap.add_argument("--instance", action="append", default=[], metavar="FILE")
    ap.add_argument("--dir", metavar="DIR", help="run every *.txt under DIR")
    ap.add_argument(
        "--derive-lag",
        metavar="Y",
        help="maximal time lag factor (rational or 'inf'); required for tl",
    )
    ap.add_argument("--time-limit", type=float, default=3600.0, metavar="S")
    ap.add_argument(
        "--node-limit",
        type=int,
        default=30000,
        metavar="N",
        help="node cap per dichotomy probe (0 disables the dichotomy phase)",
    )
    ap.add_argument("--fail-limit", type=int, default=None, metavar="N")
    ap.add_argument("--seeds", type=int, default=1, metavar="K")
    ap.add_argument(
        "--heuristic",
        choices=sorted(HEURISTIC_NAMES),
        default=None,
        help="default: dom-wdeg for et, tdom-tw otherwise",
    )
    ap.add_argument("--restart-base", type=int, default=256)
    ap.add_argument("--restart-factor", type=float, default=1.3)
    ap.add_argument("--greedy-iters", type=int, default=1000)
    ap.add_argument("--no-nogoods", action="store_true")
    ap.add_argument("--ref", metavar="FILE", help="reference costs for PRD")
    ap.add_argument("--out", default="out", metavar="DIR")
    ap.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    ap.add_argument("--jobs", type=int, default=1, metavar="N")
    return ap


def _parse_lag(text: str):
    if text in ("inf", "Inf", "INF"):
        return math.inf
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"bad lag factor {text!r}") from None


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        paths = [Path(p) for p in args.instance]
        if args.dir:
            paths.extend(sorted(Path(args.dir).glob("*.txt")))
        for p in paths:
            if not p.is_file():
                raise ValueError(f"instance file not found: {p}")
        lag = _parse_lag(args.derive_lag) if args.derive_lag is not None else None
        if args.model == "tl" and lag is None:
            raise ValueError("--model tl needs --derive-lag")
        if args.model in ("nw-task", "nw-interval"):
            if lag is None:
                lag = 0
            elif lag != 0:
                raise ValueError("no-wait models need --derive-lag 0")
        if args.model in ("jsp", "et") and lag is not None:
            raise ValueError(f"--derive-lag does not apply to {args.model}")
        if args.seeds < 1:
            raise ValueError("--seeds must be at least 1")
        heuristic = args.heuristic or ("dom-wdeg" if args.model == "et" else "tdom-tw")
        cfg_fields = {
            "heuristic": HEURISTIC_NAMES[heuristic],
            "restart_base": args.restart_base,
            "restart_factor": args.restart_factor,
            "greedy_iterations": args.greedy_iters,
            "dichotomy_node_limit": args.node_limit or None,
            "fail_limit": args.fail_limit,
            "use_nogoods": not args.no_nogoods,
        }
        refs = _load_refs(args.ref) if args.ref else {}
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    payloads = []
    for p in paths:
        for seed in range(args.seeds):
            payloads.append(
                (str(p), p.stem, args.model, lag, seed, cfg_fields, args.time_limit)
            )
    reports = run(payloads, jobs=args.jobs)
    if args.format == "jsonl":
        report_path = out_dir / "reports.jsonl"
        with report_path.open("w") as fh:
            for r in reports:
                fh.write(json.dumps(asdict(r)) + "\n")
    else:
        report_path = out_dir / "reports.csv"
        with report_path.open("w", newline="") as fh:
            fields = list(asdict(reports[0]).keys()) if reports else []
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            for r in reports:
                writer.writerow(asdict(r))
    rows = _summarize(reports, refs)
    summary_path = out_dir / "summary.csv"
    with summary_path.open("w", newline="") as fh:
        fields = ["instance", "variant", "runs", "errors", "best", "worst", "proven", "prd"]
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    for row in rows:
        mark = "*" if row["proven"] else ""
        prd_txt = "" if row["prd"] is None else f"  prd={row['prd']:+.2f}%"
        print(
            f"{row['instance']:<24} best={row['best']}{mark}"
            f" worst={row['worst']}{prd_txt}"
        )
    print(f"wrote {report_path} and {summary_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
