"""Compare the two no-wait models on a set of instances.

Runs the harness once per model (task disjuncts vs merged forbidden
intervals) on the zero-lag derivations and prints a side-by-side table
of the best makespans found.
"""

import argparse
import csv
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from jobshop.cli import main as bench

MODELS = ("nw-task", "nw-interval")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dir", default="instances")
    ap.add_argument("--only", nargs="*", default=["la01", "la02", "la03", "la04"])
    ap.add_argument("--seeds", type=int, default=1)
    ap.add_argument("--time-limit", type=float, default=60.0)
    ap.add_argument("--out", default="results/nw")
    args = ap.parse_args()

    files = []
    for stem in args.only:
        f = Path(args.dir) / f"{stem}.txt"
        if not f.is_file():
            print(f"skipping {stem}: no {f}", file=sys.stderr)
            continue
        files.append(str(f))
    if not files:
        print("no instances to run", file=sys.stderr)
        return 2

    for model in MODELS:
        argv = ["--model", model,
                "--seeds", str(args.seeds),
                "--time-limit", str(args.time_limit),
                "--out", str(Path(args.out) / model)]
        for f in files:
            argv += ["--instance", f]
        print(f"== {model} ==")
        rc = bench(argv)
        if rc:
            return rc

    best = {}
    for model in MODELS:
        with (Path(args.out) / model / "summary.csv").open() as fh:
            for row in csv.DictReader(fh):
                star = "*" if row["proven"] == "True" else ""
                best.setdefault(row["instance"], {})[model] = row["best"] + star
    print(f"\n{'instance':<16} {MODELS[0]:>12} {MODELS[1]:>12}")
    for name, cells in best.items():
        print(f"{name:<16} {cells.get(MODELS[0], '-'):>12} "
              f"{cells.get(MODELS[1], '-'):>12}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
