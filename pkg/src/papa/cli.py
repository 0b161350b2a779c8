"""Command line entry point.

    papa run --config default.cfg --out trace.csv [--model parallel] [--baseline random_phase]
    papa sweep --config default.cfg --targets-db 0,2,5,8 --out summary.csv
    papa compare --config default.cfg --out traces/
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from papa.driver import (
    COMPARE_VARIANTS,
    Baseline,
    Infeasible,
    RunConfig,
    compare,
    papa_run,
    sweep_sinr,
    write_sweep_csv,
)
from papa.phase_opt import SCAConfig
from papa.power_filter import Stage1Config
from papa.scenario import ConfigError, load_config
from papa.system import ModelKind

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 1, 2

log = logging.getLogger("papa")


def _parse_targets(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty target list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="papa", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", required=True, type=Path)
        p.add_argument("--outer-iters", type=int, default=50)
        p.add_argument("--stage1-iters", type=int, default=50)
        p.add_argument("--sca-iters", type=int, default=100)
        p.add_argument("--no-accelerated", action="store_true",
                       help="bisect the multiplier instead of normalising at its floor")

    run = sub.add_parser("run", help="single PAPA or baseline run -> trace CSV")
    common(run)
    run.add_argument("--model", choices=["personal", "parallel"], default="personal")
    run.add_argument("--baseline", choices=[b.value for b in Baseline], default="none")

    sweep = sub.add_parser("sweep", help="final total power over a list of SINR targets")
    common(sweep)
    sweep.add_argument("--targets-db", required=True, type=_parse_targets)

    comp = sub.add_parser("compare", help="convergence traces of every variant -> directory")
    common(comp)
    return parser


def _run_config(args, scenario, **kw) -> RunConfig:
    return RunConfig(
        scenario=scenario,
        outer_iters=args.outer_iters,
        stage1=Stage1Config(inner_iters=args.stage1_iters),
        sca=SCAConfig(inner_iters=args.sca_iters),
        accelerated=not args.no_accelerated,
        **kw,
    )


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        scenario = load_config(args.config)
        if args.command == "run":
            model = ModelKind.DIRECT if args.baseline == "no_ris" else ModelKind(args.model)
            cfg = _run_config(args, scenario, model=model, baseline=Baseline(args.baseline))
        else:
            cfg = _run_config(args, scenario)
    except (OSError, ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "run":
        try:
            result = papa_run(cfg)
        except Infeasible as exc:
            exc.trace.write_csv(args.out)
            print(f"infeasible: {exc}", file=sys.stderr)
            return EXIT_INFEASIBLE
        result.trace.write_csv(args.out)
        log.info("final total power %.6e W (%s)", result.trace.final_power, result.status.value)
        return EXIT_OK

    if args.command == "sweep":
        rows = sweep_sinr(cfg, args.targets_db)
        write_sweep_csv(rows, args.out)
        bad = [r for r in rows if r.status == "Infeasible"]
        for r in bad:
            print(f"infeasible: {r.variant} at {r.target_db:g} dB", file=sys.stderr)
        return EXIT_INFEASIBLE if bad else EXIT_OK

    args.out.mkdir(parents=True, exist_ok=True)
    traces = compare(cfg, COMPARE_VARIANTS)
    status = EXIT_OK
    for name, trace in traces.items():
        trace.write_csv(args.out / f"{name}.csv")
        if trace.rows and trace.rows[-1].status.value == "Infeasible":
            print(f"infeasible: {name}", file=sys.stderr)
            status = EXIT_INFEASIBLE
        elif trace.rows:
            log.info("%-14s final total power %.6e W", name, trace.final_power)
    return status


if __name__ == "__main__":
    sys.exit(main())
