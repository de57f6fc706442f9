"""Run the time-lag benchmark grid at desk scale.

Derives la*_0_y variants for each requested lag factor and runs the
benchmark harness once per factor, writing one output directory per y.
Defaults are sized for a workstation (small instance subset, short time
limit); pass --dir instances --time-limit 3600 for the full campaign.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from jobshop.cli import main as bench


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dir", default="instances", help="plain JSP instance files")
    ap.add_argument("--only", nargs="*", default=["la01", "la02", "la03", "la04"],
                    help="instance stems to include (default: a small subset)")
    ap.add_argument("--y", nargs="*", default=["1", "10"],
                    help="lag factors to derive (rational or 'inf')")
    ap.add_argument("--seeds", type=int, default=1)
    ap.add_argument("--time-limit", type=float, default=60.0)
    ap.add_argument("--out", default="results/tl")
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

    worst = 0
    for y in args.y:
        argv = ["--model", "tl", "--derive-lag", y,
                "--seeds", str(args.seeds),
                "--time-limit", str(args.time_limit),
                "--out", str(Path(args.out) / f"y_{y}")]
        for f in files:
            argv += ["--instance", f]
        print(f"== y = {y} ==")
        worst = max(worst, bench(argv))
    return worst


if __name__ == "__main__":
    sys.exit(main())
