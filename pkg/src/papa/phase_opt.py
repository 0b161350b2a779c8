"""Stage two: target signatures, unit-modulus phase regression and its variants."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from papa.numerics import norm2, solve_hpd, spectral_norm
from papa.scenario import ChannelSet
from papa.system import ModelKind, PhaseBank, SolverState, all_signatures

MU_FLOOR_REL = 1e-12
BISECTION_RTOL = 1e-8
MAX_DOUBLINGS = 60
MAX_BISECTIONS = 500


class SingularSystem(ValueError):
    pass


class BisectionFailure(RuntimeError):
    pass


@dataclass
class SCAConfig:
    inner_iters: int = 100
    lambda_init: float | None = None  # None: 4*||X|| + 2*||v|| per problem
    backtrack_factor: float = 2.0
    grad_tol: float = 1e-8  # on the step length max|grad|/lambda, in radians

    def __post_init__(self):
        if self.inner_iters < 1:
            raise ValueError("inner_iters must be >= 1")
        if self.lambda_init is not None and not self.lambda_init > 0:
            raise ValueError("lambda_init must be positive")
        if not self.backtrack_factor > 1:
            raise ValueError("backtrack_factor must exceed 1")


@dataclass
class RegressionProblem:
    """Fit ``B @ exp(1j*phi)`` to ``target`` where ``B = G diag(h)``."""

    X: np.ndarray
    v: np.ndarray
    target: np.ndarray

    @classmethod
    def from_cascade(cls, B: np.ndarray, target: np.ndarray) -> "RegressionProblem":
        B = np.asarray(B, dtype=complex)
        target = np.asarray(target, dtype=complex)
        X = B.conj().T @ B
        return cls(X=0.5 * (X + X.conj().T), v=B.conj().T @ target, target=target)


# --- optimal signature -------------------------------------------------------


def _resolvent(gram: np.ndarray, p_i: float, c_i: np.ndarray, mu: float) -> np.ndarray:
    A = p_i * gram
    A[np.diag_indices_from(A)] += mu
    return math.sqrt(p_i) * solve_hpd(A, c_i)


def mu_floor(C: np.ndarray, p_i: float) -> float:
    return MU_FLOOR_REL * p_i * spectral_norm(C) ** 2


def optimal_signature(
    C: np.ndarray, p_i: float, c_i: np.ndarray, norm_bound: float
) -> tuple[np.ndarray, float]:
    """Norm-constrained optimal signature ``sqrt(p) (p C C^H + mu I)^{-1} c`` and its ``mu``.

    ``mu`` is the smallest multiplier (not below a tiny floor) for which the
    norm is within ``norm_bound``; found by log-scale bisection.
    """
    if not p_i > 0:
        raise ValueError("optimal signature needs a positive power")
    C = np.asarray(C, dtype=complex)
    gram = C @ C.conj().T
    lo = mu_floor(C, p_i)
    if not lo > 0:
        raise SingularSystem("all filters are zero")
    s = _resolvent(gram, p_i, c_i, lo)
    if norm2(s) <= norm_bound:
        return s, lo

    hi = 1.0 if lo < 1.0 else 2.0 * lo
    for _ in range(MAX_DOUBLINGS):
        if norm2(_resolvent(gram, p_i, c_i, hi)) < norm_bound:
            break
        hi *= 2.0
    else:
        raise BisectionFailure(f"no bracket up to mu={hi:.3e}")

    for _ in range(MAX_BISECTIONS):
        mid = math.sqrt(lo * hi)
        if mid in (lo, hi):
            mid = 0.5 * (lo + hi)
        s = _resolvent(gram, p_i, c_i, mid)
        n = norm2(s)
        if abs(n - norm_bound) <= BISECTION_RTOL * norm_bound:
            return s, mid
        if n > norm_bound:
            lo = mid
        else:
            hi = mid
    raise BisectionFailure("bisection did not reach the norm tolerance")


def accelerated_signature(C: np.ndarray, p_i: float, c_i: np.ndarray, norm_bound: float) -> np.ndarray:
    """Multiplier at its floor, then rescaled to exactly the norm bound."""
    C = np.asarray(C, dtype=complex)
    s = _resolvent(C @ C.conj().T, p_i, c_i, mu_floor(C, p_i))
    return s * (norm_bound / norm2(s))


# --- SCA phase regression -------------------------------------------------------


def f1(prob: RegressionProblem, phi: np.ndarray) -> float:
    theta = np.exp(1j * np.asarray(phi))
    return float(np.vdot(theta, prob.X @ theta).real - 2.0 * np.vdot(theta, prob.v).real)


def sca_gradient(prob: RegressionProblem, phi: np.ndarray) -> np.ndarray:
    theta = np.exp(1j * np.asarray(phi))
    return 2.0 * np.imag(theta.conj() * (prob.X @ theta - prob.v))


def wrap_angle(phi: np.ndarray) -> np.ndarray:
    """Map angles to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(phi, dtype=float), 2 * np.pi)


def default_lambda(prob: RegressionProblem) -> float:
    lam = 4.0 * spectral_norm(prob.X) + 2.0 * norm2(prob.v)
    return lam if lam > 0 else 1.0


def sca_phase_solve(
    prob: RegressionProblem, phi0: np.ndarray, cfg: SCAConfig, trace: list[float] | None = None
) -> np.ndarray:
    """Majorize-minimize gradient steps on the unit-modulus regression.

    ``trace``, if given, receives the objective at the start and after every
    accepted step.
    """
    phi = np.asarray(phi0, dtype=float).copy()
    lam = cfg.lambda_init if cfg.lambda_init is not None else default_lambda(prob)
    val = f1(prob, phi)
    if trace is not None:
        trace.append(val)
    for _ in range(cfg.inner_iters):
        grad = sca_gradient(prob, phi)
        if np.max(np.abs(grad), initial=0.0) <= cfg.grad_tol * lam:
            break
        for _ in range(200):
            cand = phi - grad / lam
            cand_val = f1(prob, cand)
            if cand_val <= val:
                break
            lam *= cfg.backtrack_factor
        else:
            break
        phi, val = cand, cand_val
        if trace is not None:
            trace.append(val)
    return wrap_angle(phi)


def lower_bound_signature(prob: RegressionProblem, B: np.ndarray) -> np.ndarray:
    """Project the target onto the column space of ``B`` (unconstrained least squares)."""
    B = np.asarray(B, dtype=complex)
    coef, *_ = np.linalg.lstsq(B, prob.target, rcond=None)
    return B @ coef


# --- whole stage ------------------------------------------------------------------


def norm_bound(ch: ChannelSet, i: int, kind: ModelKind) -> float:
    """sqrt(K) * ||G H|| bound on user i's signature; summed over RISs for the parallel model."""
    K = ch.n_elements
    if ModelKind(kind) is ModelKind.PARALLEL:
        return math.sqrt(K) * sum(spectral_norm(ch.cascade(i, j)) for j in range(ch.n_users))
    return math.sqrt(K) * spectral_norm(ch.cascade(i, i))


def phase_stage(
    state: SolverState,
    ch: ChannelSet,
    pb: PhaseBank,
    kind: ModelKind,
    cfg: SCAConfig,
    accelerated: bool = False,
    lower_bound: bool = False,
    bounds: np.ndarray | None = None,
    f1_traces: list[list[float]] | None = None,
) -> tuple[PhaseBank, SolverState]:
    """Target signatures from the current filters, then per-user phase regression.

    With ``lower_bound`` the regression is unconstrained least squares; the
    phases are then left untouched and the returned state carries the
    projected signatures directly. ``bounds`` caches the per-user norm bounds.
    """
    kind = ModelKind(kind)
    if kind is ModelKind.DIRECT:
        raise ValueError("the direct model has no phases to design")
    if lower_bound and kind is not ModelKind.PERSONAL:
        raise ValueError("the lower bound is defined for the personal model")
    N = ch.n_users
    C = state.filters
    theta_n = pb.theta
    new_phi = pb.phi.copy()
    new_state = state.copy()
    for i in range(N):
        if not state.p[i] > 0:
            continue
        bound = bounds[i] if bounds is not None else norm_bound(ch, i, kind)
        if accelerated:
            target = accelerated_signature(C, state.p[i], C[:, i], bound)
        else:
            target, _ = optimal_signature(C, state.p[i], C[:, i], bound)
        if kind is ModelKind.PARALLEL:
            others = sum(ch.cascade(i, j) @ theta_n[j] for j in range(N) if j != i)
            target = target - others
        B = ch.cascade(i, i)
        prob = RegressionProblem.from_cascade(B, target)
        if lower_bound:
            new_state.signatures[:, i] = lower_bound_signature(prob, B)
            continue
        trace = [] if f1_traces is not None else None
        new_phi[i] = sca_phase_solve(prob, pb.phi[i], cfg, trace)
        if f1_traces is not None:
            f1_traces.append(trace)
    new_pb = PhaseBank(new_phi)
    if not lower_bound:
        new_state.signatures = all_signatures(ch, new_pb, kind)
    return new_pb, new_state
