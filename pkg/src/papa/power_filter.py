"""Stage one: MMSE filter and SINR-target power updates for fixed phases."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from papa.numerics import solve_hpd
from papa.system import SolverState

ORTHOGONAL_TOL = 1e-30


class OrthogonalFilter(ValueError):
    """The filter has (numerically) no projection on its own user's signature."""


class Stage1Status(str, enum.Enum):
    CONVERGED = "Converged"
    ITER_LIMIT = "IterLimit"
    INFEASIBLE = "Infeasible"


@dataclass
class Stage1Config:
    inner_iters: int = 50
    power_cap: float = 1e6
    tol: float = 1e-9

    def __post_init__(self):
        if self.inner_iters < 1 or not self.power_cap > 0 or not self.tol > 0:
            raise ValueError("inner_iters >= 1, power_cap > 0 and tol > 0 required")


def noise_plus_interference(state: SolverState, i: int, noise_power: float) -> np.ndarray:
    S = state.signatures
    w = state.p.copy()
    w[i] = 0.0
    A = (S * w) @ S.conj().T
    A = 0.5 * (A + A.conj().T)
    A[np.diag_indices_from(A)] += noise_power
    return A


def mmse_direction(state: SolverState, i: int, noise_power: float) -> np.ndarray:
    """``A_i^{-1} s_i``, the filter up to its scalar prefactor."""
    return solve_hpd(noise_plus_interference(state, i, noise_power), state.signatures[:, i])


def filter_update(state: SolverState, i: int, noise_power: float) -> np.ndarray:
    s = state.signatures[:, i]
    x = mmse_direction(state, i, noise_power)
    p_i = state.p[i]
    return np.sqrt(p_i) / (1.0 + p_i * np.vdot(s, x).real) * x


def _power_for_filter(state: SolverState, c: np.ndarray, i: int, target: float, noise_power: float):
    proj = np.abs(c.conj() @ state.signatures) ** 2
    if proj[i] < ORTHOGONAL_TOL * max(1.0, np.vdot(c, c).real):
        raise OrthogonalFilter(f"user {i}: |c^H s| = {np.sqrt(proj[i]):.3e}")
    w = state.p.copy()
    w[i] = 0.0
    return float(target * (proj @ w + noise_power * np.vdot(c, c).real) / proj[i])


def power_update(state: SolverState, i: int, target: float, noise_power: float) -> float:
    """Power that puts user i exactly on its SINR target with the stored filter ``c_i``."""
    return _power_for_filter(state, state.filters[:, i], i, target, noise_power)


def stage1_solve(
    state: SolverState, cfg: Stage1Config, targets, noise_power: float
) -> tuple[SolverState, Stage1Status, list[float]]:
    """Gauss-Seidel sweeps of filter then power updates, users in index order.

    Returns the updated copy of the state, a status and the total power after
    every sweep.
    """
    st = state.copy()
    targets = np.broadcast_to(np.asarray(targets, dtype=float), st.p.shape)
    history: list[float] = []
    prev = float(st.p.sum())
    for _ in range(cfg.inner_iters):
        for i in range(st.n_users):
            direction = mmse_direction(st, i, noise_power)
            s = st.signatures[:, i]
            c = np.sqrt(st.p[i]) / (1.0 + st.p[i] * np.vdot(s, direction).real) * direction
            st.filters[:, i] = c
            # zero power gives a zero filter; SINR only depends on the filter's direction
            st.p[i] = _power_for_filter(st, c if st.p[i] > 0 else direction, i, targets[i], noise_power)
        total = float(st.p.sum())
        history.append(total)
        if not np.all(np.isfinite(st.p)) or np.any(st.p > cfg.power_cap):
            return st, Stage1Status.INFEASIBLE, history
        if abs(total - prev) <= cfg.tol * max(total, prev):
            return st, Stage1Status.CONVERGED, history
        prev = total
    return st, Stage1Status.ITER_LIMIT, history
