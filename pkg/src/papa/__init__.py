"""Phase-aware uplink power control for networks of distributed RISs."""

from papa.numerics import norm2, solve_hpd, spectral_norm
from papa.scenario import ChannelSet, Scenario, default_scenario, synthesize_channels
from papa.system import ModelKind, PhaseBank, SolverState, sinr, total_power
from papa.power_filter import Stage1Config, Stage1Status, stage1_solve
from papa.phase_opt import SCAConfig, phase_stage
from papa.driver import Baseline, ConvergenceTrace, RunConfig, papa_run, sweep_sinr

__all__ = [
    "Baseline",
    "ChannelSet",
    "ConvergenceTrace",
    "ModelKind",
    "PhaseBank",
    "RunConfig",
    "SCAConfig",
    "Scenario",
    "SolverState",
    "Stage1Config",
    "Stage1Status",
    "default_scenario",
    "norm2",
    "papa_run",
    "phase_stage",
    "sinr",
    "solve_hpd",
    "spectral_norm",
    "stage1_solve",
    "sweep_sinr",
    "synthesize_channels",
    "total_power",
]
