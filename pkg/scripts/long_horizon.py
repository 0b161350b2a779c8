"""PAPA personal/parallel and the lower bound over a long outer-iteration horizon.

    python scripts/long_horizon.py --outer-iters 300
"""

import argparse

import numpy as np

from papa.driver import RunConfig, compare
from papa.scenario import default_scenario


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--outer-iters", type=int, default=300)
    args = ap.parse_args()
    traces = compare(RunConfig(default_scenario(), outer_iters=args.outer_iters),
                     variants=("papa_personal", "papa_parallel", "lower_bound"))
    marks = np.unique(np.linspace(0, args.outer_iters - 1, 13).astype(int))
    print("iter  " + "  ".join(f"{n:>14s}" for n in traces))
    for t in marks:
        print(f"{t:4d}  " + "  ".join(f"{tr.total_power[t]:14.4e}" for tr in traces.values()))


if __name__ == "__main__":
    main()
