"""Outer alternating loop, baselines, sweeps and CSV traces."""

from __future__ import annotations

import csv
import enum
import io
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from papa.phase_opt import SCAConfig, norm_bound, phase_stage
from papa.power_filter import Stage1Config, Stage1Status, stage1_solve
from papa.scenario import ChannelSet, Scenario, db_to_linear, synthesize_channels
from papa.system import ModelKind, PhaseBank, SolverState, all_signatures, sinr_all


class Baseline(str, enum.Enum):
    NONE = "none"
    NO_RIS = "no_ris"
    RANDOM_PHASE = "random_phase"
    LOWER_BOUND = "lower_bound"


class Infeasible(RuntimeError):
    """Stage one exceeded the power cap; ``trace`` holds the iterations completed so far."""

    def __init__(self, message: str, trace: "ConvergenceTrace"):
        super().__init__(message)
        self.trace = trace


@dataclass
class RunConfig:
    scenario: Scenario
    model: ModelKind = ModelKind.PERSONAL
    outer_iters: int = 50
    stage1: Stage1Config = field(default_factory=Stage1Config)
    sca: SCAConfig = field(default_factory=SCAConfig)
    accelerated: bool = True
    baseline: Baseline = Baseline.NONE

    def __post_init__(self):
        self.model = ModelKind(self.model)
        self.baseline = Baseline(self.baseline)
        if self.outer_iters < 1:
            raise ValueError("outer_iters must be >= 1")
        if self.baseline is Baseline.NO_RIS:
            self.model = ModelKind.DIRECT
        elif self.model is ModelKind.DIRECT:
            raise ValueError("the direct model is only used by the no_ris baseline")
        if self.baseline is Baseline.LOWER_BOUND and self.model is not ModelKind.PERSONAL:
            raise ValueError("the lower_bound baseline uses the personal model")


@dataclass
class TraceRow:
    iter: int
    total_power: float
    powers: np.ndarray
    min_sinr_ratio: float
    wall_time_s: float
    status: Stage1Status


@dataclass
class ConvergenceTrace:
    n_users: int
    rows: list[TraceRow] = field(default_factory=list)

    @property
    def total_power(self) -> np.ndarray:
        return np.array([r.total_power for r in self.rows])

    @property
    def final_power(self) -> float:
        return self.rows[-1].total_power

    def header(self) -> list[str]:
        return ["iter", "total_power", *[f"p_{i}" for i in range(self.n_users)],
                "min_sinr_ratio", "wall_time_s"]

    def to_csv(self, include_wall_time: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = self.header()
        w.writerow(header if include_wall_time else header[:-1])
        for r in self.rows:
            row = [str(r.iter), _fmt(r.total_power), *map(_fmt, r.powers), _fmt(r.min_sinr_ratio)]
            if include_wall_time:
                row.append(_fmt(r.wall_time_s))
            w.writerow(row)
        return buf.getvalue()

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv())


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def read_trace_csv(path: str | Path) -> list[dict[str, float]]:
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


@dataclass
class RunResult:
    trace: ConvergenceTrace
    state: SolverState
    phases: PhaseBank
    status: Stage1Status


def papa_run(
    cfg: RunConfig,
    channels: ChannelSet | None = None,
    f1_traces: list[list[float]] | None = None,
) -> RunResult:
    """Alternate stage one (filters, powers) and stage two (phases) for ``outer_iters`` rounds.

    The trace records the state after each round's stage one, so row ``t``
    is the power achieved with the phases designed in round ``t - 1``.
    ``f1_traces`` collects every SCA objective sequence when given.
    """
    sc = cfg.scenario
    ch = channels if channels is not None else synthesize_channels(sc)
    rng = np.random.default_rng([sc.seed, 1])
    pb = PhaseBank.random(ch.n_users, ch.n_elements, rng)
    kind = cfg.model
    state = SolverState.initial(all_signatures(ch, pb, kind), sc.noise_power)
    run_phases = cfg.baseline in (Baseline.NONE, Baseline.LOWER_BOUND)
    bounds = (np.array([norm_bound(ch, i, kind) for i in range(ch.n_users)])
              if run_phases else None)

    trace = ConvergenceTrace(ch.n_users)
    t0 = time.perf_counter()
    status = Stage1Status.ITER_LIMIT
    for t in range(cfg.outer_iters):
        state, status, _ = stage1_solve(state, cfg.stage1, sc.sinr_targets, sc.noise_power)
        ratio = float(np.min(sinr_all(state, sc.noise_power) / sc.sinr_targets)) \
            if np.all(sc.sinr_targets > 0) else float("nan")
        trace.rows.append(TraceRow(t, float(state.p.sum()), state.p.copy(), ratio,
                                   time.perf_counter() - t0, status))
        if status is Stage1Status.INFEASIBLE:
            raise Infeasible(f"power cap exceeded at outer iteration {t}", trace)
        if run_phases and t < cfg.outer_iters - 1:
            pb, state = phase_stage(state, ch, pb, kind, cfg.sca, cfg.accelerated,
                                    lower_bound=cfg.baseline is Baseline.LOWER_BOUND,
                                    bounds=bounds, f1_traces=f1_traces)
    return RunResult(trace, state, pb, status)


# --- experiments ----------------------------------------------------------

VARIANTS = {
    "papa_personal": dict(model=ModelKind.PERSONAL, baseline=Baseline.NONE),
    "papa_parallel": dict(model=ModelKind.PARALLEL, baseline=Baseline.NONE),
    "random_phase": dict(model=ModelKind.PERSONAL, baseline=Baseline.RANDOM_PHASE),
    "no_ris": dict(model=ModelKind.DIRECT, baseline=Baseline.NO_RIS),
    "lower_bound": dict(model=ModelKind.PERSONAL, baseline=Baseline.LOWER_BOUND),
}
SWEEP_VARIANTS = ("papa_personal", "papa_parallel", "random_phase", "no_ris")
COMPARE_VARIANTS = ("papa_personal", "papa_parallel", "random_phase", "no_ris", "lower_bound")


def variant_config(cfg: RunConfig, variant: str, scenario: Scenario | None = None) -> RunConfig:
    spec = VARIANTS[variant]
    return RunConfig(
        scenario=scenario if scenario is not None else cfg.scenario,
        model=spec["model"],
        outer_iters=cfg.outer_iters,
        stage1=cfg.stage1,
        sca=cfg.sca,
        accelerated=cfg.accelerated,
        baseline=spec["baseline"],
    )


@dataclass
class SweepRow:
    target_db: float
    variant: str
    total_power: float
    status: str


def sweep_sinr(cfg: RunConfig, targets_db, variants=SWEEP_VARIANTS) -> list[SweepRow]:
    """Final total power for every (target, variant); channels are shared across variants."""
    targets_db = sorted(float(t) for t in targets_db)
    if not targets_db:
        raise ValueError("empty target list")
    ch = synthesize_channels(cfg.scenario)
    rows = []
    for tdb in targets_db:
        sc = cfg.scenario.with_targets(db_to_linear(tdb))
        for name in variants:
            try:
                res = papa_run(variant_config(cfg, name, sc), channels=ch)
                rows.append(SweepRow(tdb, name, res.trace.final_power, res.status.value))
            except Infeasible:
                rows.append(SweepRow(tdb, name, float("inf"), Stage1Status.INFEASIBLE.value))
    return rows


def write_sweep_csv(rows: list[SweepRow], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["target_db", "variant", "total_power", "status"])
        for r in rows:
            w.writerow([_fmt(r.target_db), r.variant, _fmt(r.total_power), r.status])


def compare(cfg: RunConfig, variants=COMPARE_VARIANTS) -> dict[str, ConvergenceTrace]:
    """Convergence traces of each variant on one shared channel draw."""
    ch = synthesize_channels(cfg.scenario)
    out = {}
    for name in variants:
        try:
            out[name] = papa_run(variant_config(cfg, name), channels=ch).trace
        except Infeasible as exc:
            out[name] = exc.trace
    return out
