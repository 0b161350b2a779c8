"""Total-power convergence of every variant on the default network (one shared channel draw).

    python scripts/fig4_convergence.py --outer-iters 50 --out results/fig4
"""

import argparse
from pathlib import Path

from papa.driver import RunConfig, compare
from papa.scenario import default_scenario


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--outer-iters", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results/fig4"))
    args = ap.parse_args()

    sc = default_scenario()
    sc.seed = args.seed
    args.out.mkdir(parents=True, exist_ok=True)
    traces = compare(RunConfig(sc, outer_iters=args.outer_iters))
    for name, trace in traces.items():
        trace.write_csv(args.out / f"{name}.csv")
        tp = trace.total_power
        tail = tp[-10:]
        print(f"{name:14s} first {tp[0]:.4e}  final {tp[-1]:.4e} W  "
              f"last-10 spread {(tail.max() - tail.min()) / tail[-1]:.2%}")


if __name__ == "__main__":
    main()
