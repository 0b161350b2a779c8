"""Effective signatures and filter-output SINR for the personal, parallel and direct models."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from papa.scenario import ChannelSet


class ModelKind(str, enum.Enum):
    PERSONAL = "personal"
    PARALLEL = "parallel"
    DIRECT = "direct"


class ZeroFilter(ValueError):
    pass


@dataclass
class PhaseBank:
    """Real phase angles, one row of K per RIS. Reflection coefficients are ``exp(1j*phi)``."""

    phi: np.ndarray

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        if not np.all(np.isfinite(self.phi)):
            raise ValueError("phase angles must be finite")

    @property
    def theta(self) -> np.ndarray:
        return np.exp(1j * self.phi)

    @classmethod
    def random(cls, n_ris: int, n_elements: int, rng: np.random.Generator) -> "PhaseBank":
        # uniform on (-pi, pi]
        return cls(np.pi - 2 * np.pi * rng.random((n_ris, n_elements)))

    @classmethod
    def zeros(cls, n_ris: int, n_elements: int) -> "PhaseBank":
        return cls(np.zeros((n_ris, n_elements)))

    def copy(self) -> "PhaseBank":
        return PhaseBank(self.phi.copy())


@dataclass
class SolverState:
    """Powers ``p`` (N,), filters and signatures as M x N arrays (column i = user i)."""

    p: np.ndarray
    filters: np.ndarray
    signatures: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        self.filters = np.asarray(self.filters, dtype=complex)
        self.signatures = np.asarray(self.signatures, dtype=complex)
        if np.any(self.p < 0):
            raise ValueError("powers must be non-negative")

    @property
    def n_users(self) -> int:
        return self.p.shape[0]

    def copy(self) -> "SolverState":
        return SolverState(self.p.copy(), self.filters.copy(), self.signatures.copy())

    @classmethod
    def initial(cls, signatures: np.ndarray, noise_power: float) -> "SolverState":
        sig = np.asarray(signatures, dtype=complex)
        return cls(np.full(sig.shape[1], noise_power), sig.copy(), sig)


def effective_signature(ch: ChannelSet, pb: PhaseBank, i: int, kind: ModelKind) -> np.ndarray:
    if not 0 <= i < ch.n_users:
        raise IndexError(f"user index {i} out of range for {ch.n_users} users")
    kind = ModelKind(kind)
    if kind is ModelKind.DIRECT:
        return ch.h_direct[i].copy()
    theta = pb.theta
    if kind is ModelKind.PERSONAL:
        return ch.G[i] @ (theta[i] * ch.h[i, i])
    return np.einsum("jmk,jk->m", ch.G, theta * ch.h[i])


def all_signatures(ch: ChannelSet, pb: PhaseBank, kind: ModelKind) -> np.ndarray:
    """M x N matrix of every user's signature under ``kind``."""
    kind = ModelKind(kind)
    if kind is ModelKind.DIRECT:
        return ch.h_direct.T.copy()
    theta = pb.theta
    if kind is ModelKind.PERSONAL:
        idx = np.arange(ch.n_users)
        return np.einsum("imk,ik->mi", ch.G, theta * ch.h[idx, idx])
    return np.einsum("jmk,ijk->mi", ch.G, theta[None, :, :] * ch.h)


def sinr(state: SolverState, i: int, noise_power: float) -> float:
    c = state.filters[:, i]
    cc = np.vdot(c, c).real
    if cc == 0.0:
        raise ZeroFilter(f"filter of user {i} is zero")
    gains = np.abs(c.conj() @ state.signatures) ** 2 * state.p
    interference = gains.sum() - gains[i]
    return float(gains[i] / (interference + noise_power * cc))


def sinr_all(state: SolverState, noise_power: float) -> np.ndarray:
    return np.array([sinr(state, i, noise_power) for i in range(state.n_users)])


def total_power(state: SolverState) -> float:
    return float(np.sum(state.p))
