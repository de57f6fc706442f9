#!/usr/bin/env python3
"""Structural and anchor checks for the bundled benchmark instances.

Checks, for every instances/la*.txt file:
  - header matches row count and row width
  - each row's machine sequence is a permutation of 0..m-1
  - durations lie in [5, 99]
  - nested families share their parent's rows verbatim

For the authentic files, also checks the load anchors: the maximum machine
load is a valid lower bound on the makespan optimum, and equals it exactly
for the load-tight members (la01, la05, la06).
"""
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
INST = ROOT / "instances"

# published makespan optima used as anchors for the authentic files
PUBLISHED = {"la01": 666, "la02": 655, "la03": 597, "la04": 590, "la05": 593, "la06": 926}
LOAD_TIGHT = {"la01", "la05", "la06"}
NESTED = {"la06": "la01", "la07": "la03", "la08": "la04", "la09": "la02",
          "la10": "la05", "la11": "la06", "la12": "la07", "la13": "la08",
          "la14": "la09", "la15": "la10", "la21": "la16", "la22": "la17",
          "la23": "la18", "la24": "la19", "la25": "la20", "la26": "la21",
          "la27": "la22", "la28": "la23", "la29": "la24", "la30": "la25",
          "la31": "la26", "la32": "la27", "la33": "la28", "la34": "la29",
          "la35": "la30"}


def load(name):
    lines = (INST / f"{name}.txt").read_text().split("\n")
    n, m = map(int, lines[0].split())
    rows = [lines[1 + i] for i in range(n)]
    return n, m, rows


def main():
    bad = 0
    for path in sorted(INST.glob("la*.txt")):
        name = path.stem
        n, m, rows = load(name)
        loads = [0] * m
        for r in rows:
            toks = r.split()
            machines = [int(t) for t in toks[0::2]]
            durs = [int(t) for t in toks[1::2]]
            if sorted(machines) != list(range(m)):
                print(f"FAIL {name}: row machines not a permutation: {r}")
                bad += 1
            if not all(5 <= d <= 99 for d in durs):
                print(f"FAIL {name}: duration outside [5,99]: {r}")
                bad += 1
            for mc, d in zip(machines, durs):
                loads[mc] += d
        if name in NESTED:
            _, _, prows = load(NESTED[name])
            if rows[: len(prows)] != prows:
                print(f"FAIL {name}: not nested on {NESTED[name]}")
                bad += 1
        if name in PUBLISHED:
            opt = PUBLISHED[name]
            if max(loads) > opt:
                print(f"FAIL {name}: max load {max(loads)} exceeds optimum {opt}")
                bad += 1
            if name in LOAD_TIGHT and max(loads) != opt:
                print(f"FAIL {name}: load-tight anchor {opt} != max load {max(loads)}")
                bad += 1
        print(f"ok   {name}: {n}x{m}, max machine load {max(loads)}")
    if bad:
        print(f"{bad} check(s) failed")
        return 1
    print("all instance checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
