"""Network geometry, steering-vector channels and the key=value config format."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

BS_HEIGHT = 25.0
RIS_HEIGHT = 10.0
USER_HEIGHT = 1.5
RIS_OFFSET = 10.0

CHANNEL_KINDS = ("los", "rayleigh")


class ConfigError(ValueError):
    pass


class DegenerateGeometry(ValueError):
    pass


@dataclass
class Scenario:
    n_users: int = 10
    n_bs_antennas: int = 8
    n_ris_elements: int = 100
    sinr_targets: np.ndarray | float = 3.5
    noise_power: float = 1e-13
    alpha_ris: float = 2.0
    alpha_direct: float = 3.0
    bs_pos: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, BS_HEIGHT]))
    user_pos: np.ndarray | None = None
    ris_pos: np.ndarray | None = None
    channel_kind: str = "rayleigh"
    seed: int = 0

    def __post_init__(self):
        self.sinr_targets = np.broadcast_to(
            np.asarray(self.sinr_targets, dtype=float), (self.n_users,)
        ).copy()
        if self.user_pos is None:
            self.user_pos = default_user_positions(self.n_users)
        if self.ris_pos is None:
            self.ris_pos = ris_positions_ahead(self.user_pos, self.bs_pos[:2])
        self.bs_pos = np.asarray(self.bs_pos, dtype=float)
        self.user_pos = np.asarray(self.user_pos, dtype=float)
        self.ris_pos = np.asarray(self.ris_pos, dtype=float)
        self.validate()

    @property
    def ris_side(self) -> int:
        return math.isqrt(self.n_ris_elements)

    def validate(self) -> None:
        N = self.n_users
        if N < 1 or self.n_bs_antennas < 1 or self.n_ris_elements < 1:
            raise ConfigError("n_users, n_bs_antennas and n_ris_elements must be >= 1")
        if self.ris_side**2 != self.n_ris_elements:
            raise ConfigError(f"n_ris_elements={self.n_ris_elements} is not a perfect square")
        if np.any(self.sinr_targets < 0):
            raise ConfigError("SINR targets must be non-negative")
        if not self.noise_power > 0:
            raise ConfigError("noise_power must be positive")
        if self.channel_kind not in CHANNEL_KINDS:
            raise ConfigError(f"channel_kind must be one of {CHANNEL_KINDS}")
        if self.seed < 0:
            raise ConfigError("seed must be unsigned")
        if self.user_pos.shape != (N, 3) or self.ris_pos.shape != (N, 3):
            raise ConfigError("user and RIS positions must be N x 3")
        if self.bs_pos.shape != (3,):
            raise ConfigError("bs position must have 3 coordinates")

    def with_targets(self, targets) -> "Scenario":
        return dataclasses.replace(self, sinr_targets=np.broadcast_to(targets, (self.n_users,)))


def default_user_positions(n_users: int) -> np.ndarray:
    xs = np.linspace(-90.0, 110.0, n_users) if n_users > 1 else np.array([10.0])
    ys = 25.0 * (np.arange(n_users) + 1)
    return np.column_stack([xs, ys, np.full(n_users, USER_HEIGHT)])


def ris_positions_ahead(user_pos: np.ndarray, bs_xy: np.ndarray, offset: float = RIS_OFFSET):
    """Place each RIS ``offset`` metres from its user, horizontally toward the BS."""
    user_pos = np.asarray(user_pos, dtype=float)
    delta = np.asarray(bs_xy, dtype=float) - user_pos[:, :2]
    dist = np.linalg.norm(delta, axis=1, keepdims=True)
    if np.any(dist <= offset):
        raise DegenerateGeometry("a user is within the RIS offset of the base station")
    xy = user_pos[:, :2] + offset * delta / dist
    return np.column_stack([xy, np.full(len(user_pos), RIS_HEIGHT)])


def default_scenario() -> Scenario:
    return Scenario()


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


# --- steering vectors -------------------------------------------------------


def steering_vector(azimuth: float, elevation: float, nx: int, ny: int) -> np.ndarray:
    """Planar half-wavelength array response, element ``(m, n)`` flattened row-major."""
    m = np.arange(nx)[:, None]
    n = np.arange(ny)[None, :]
    se = math.sin(elevation)
    phase = math.pi * (m * se * math.cos(azimuth) + n * se * math.sin(azimuth))
    return np.exp(1j * phase).ravel()


def ula_steering(azimuth: float, n: int) -> np.ndarray:
    return np.exp(1j * math.pi * np.arange(n) * math.sin(azimuth))


def angles(src: np.ndarray, dst: np.ndarray) -> tuple[float, float]:
    """Azimuth and elevation of ``src`` as seen from ``dst``."""
    d = np.asarray(src, dtype=float) - np.asarray(dst, dtype=float)
    return math.atan2(d[1], d[0]), math.atan2(d[2], math.hypot(d[0], d[1]))


def _distance(a, b) -> float:
    d = float(np.linalg.norm(np.asarray(a) - np.asarray(b)))
    if d == 0.0:
        raise DegenerateGeometry(f"coincident nodes at {np.asarray(a).tolist()}")
    return d


# --- channels ----------------------------------------------------------------


@dataclass(frozen=True)
class ChannelSet:
    """``h[i, j]`` is user i -> RIS j (length K), ``G[j]`` is RIS j -> BS (M x K),
    ``h_direct[i]`` is user i -> BS (length M)."""

    h: np.ndarray
    G: np.ndarray
    h_direct: np.ndarray

    @property
    def n_users(self) -> int:
        return self.h.shape[0]

    @property
    def n_antennas(self) -> int:
        return self.G.shape[1]

    @property
    def n_elements(self) -> int:
        return self.h.shape[2]

    def cascade(self, i: int, j: int) -> np.ndarray:
        """``G_j diag(h_{i,j})``: maps RIS j's phase vector to user i's signal at the BS."""
        return self.G[j] * self.h[i, j][None, :]


def _cn(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def synthesize_channels(s: Scenario) -> ChannelSet:
    N, M, K = s.n_users, s.n_bs_antennas, s.n_ris_elements
    side = s.ris_side
    d_ur = np.array([[_distance(s.user_pos[i], s.ris_pos[j]) for j in range(N)] for i in range(N)])
    d_rb = np.array([_distance(s.ris_pos[j], s.bs_pos) for j in range(N)])
    d_ub = np.array([_distance(s.user_pos[i], s.bs_pos) for i in range(N)])
    amp_ur = d_ur ** (-s.alpha_ris)
    amp_rb = d_rb ** (-s.alpha_ris)
    amp_ub = d_ub ** (-s.alpha_direct)

    if s.channel_kind == "rayleigh":
        rng = np.random.default_rng(s.seed)
        h = amp_ur[:, :, None] * _cn(rng, (N, N, K))
        G = amp_rb[:, None, None] * _cn(rng, (N, M, K))
        h_direct = amp_ub[:, None] * _cn(rng, (N, M))
        return ChannelSet(h=h, G=G, h_direct=h_direct)

    h = np.empty((N, N, K), dtype=complex)
    for i in range(N):
        for j in range(N):
            az, el = angles(s.user_pos[i], s.ris_pos[j])
            h[i, j] = amp_ur[i, j] * steering_vector(az, el, side, side)
    G = np.empty((N, M, K), dtype=complex)
    for j in range(N):
        az_bs, _ = angles(s.ris_pos[j], s.bs_pos)
        az_ris, el_ris = angles(s.bs_pos, s.ris_pos[j])
        a_bs = ula_steering(az_bs, M)
        a_ris = steering_vector(az_ris, el_ris, side, side)
        G[j] = amp_rb[j] * np.outer(a_bs, a_ris.conj())
    h_direct = np.empty((N, M), dtype=complex)
    for i in range(N):
        az, _ = angles(s.user_pos[i], s.bs_pos)
        h_direct[i] = amp_ub[i] * ula_steering(az, M)
    return ChannelSet(h=h, G=G, h_direct=h_direct)


# --- config file -----------------------------------------------------------

_SCALAR_KEYS = {
    "n_users": int,
    "n_bs_antennas": int,
    "n_ris_elements": int,
    "noise_power": float,
    "alpha_ris": float,
    "alpha_direct": float,
    "channel_kind": str,
    "seed": int,
}


def _parse_xyz(key: str, value: str) -> np.ndarray:
    try:
        xyz = np.array([float(v) for v in value.split(",")])
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc
    if xyz.shape != (3,):
        raise ConfigError(f"{key}: expected three comma-separated coordinates")
    return xyz


def parse_config(text: str) -> Scenario:
    """Build a Scenario from ``key=value`` lines. ``#`` starts a comment."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    kwargs: dict = {}
    user_over: dict[int, np.ndarray] = {}
    ris_over: dict[int, np.ndarray] = {}
    target = None
    for key, value in raw.items():
        try:
            if key in _SCALAR_KEYS:
                kwargs[key] = _SCALAR_KEYS[key](value)
            elif key == "sinr_target_db":
                if target is not None:
                    raise ConfigError("give only one of sinr_target_db / sinr_target_linear")
                target = float(db_to_linear(float(value)))
            elif key == "sinr_target_linear":
                if target is not None:
                    raise ConfigError("give only one of sinr_target_db / sinr_target_linear")
                target = float(value)
            elif key == "bs_xyz":
                kwargs["bs_pos"] = _parse_xyz(key, value)
            elif key.startswith(("user_", "ris_")) and key.endswith("_xyz"):
                kind, idx = key[: -len("_xyz")].split("_", 1)
                (user_over if kind == "user" else ris_over)[int(idx)] = _parse_xyz(key, value)
            else:
                raise ConfigError(f"unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{key}: {exc}") from exc

    n = kwargs.get("n_users", Scenario.n_users)
    if n < 1:
        raise ConfigError("n_users must be >= 1")
    kwargs["sinr_targets"] = np.full(n, 3.5 if target is None else target)
    bs = kwargs.get("bs_pos", np.array([0.0, 0.0, BS_HEIGHT]))
    for over in (user_over, ris_over):
        if any(not 0 <= k < n for k in over):
            raise ConfigError("position override index out of range")
    users = default_user_positions(n)
    for k, xyz in user_over.items():
        users[k] = xyz
    ris = ris_positions_ahead(users, bs[:2])
    for k, xyz in ris_over.items():
        ris[k] = xyz
    return Scenario(user_pos=users, ris_pos=ris, **kwargs)


def load_config(path: str | Path) -> Scenario:
    return parse_config(Path(path).read_text())


def format_config(s: Scenario) -> str:
    """Serialise a Scenario with explicit positions; ``parse_config`` inverts it."""
    targets = np.unique(s.sinr_targets)
    if targets.size != 1:
        raise ConfigError("config format holds a single common SINR target")
    lines = [
        f"n_users={s.n_users}",
        f"n_bs_antennas={s.n_bs_antennas}",
        f"n_ris_elements={s.n_ris_elements}",
        f"sinr_target_linear={float(targets[0])!r}",
        f"noise_power={float(s.noise_power)!r}",
        f"alpha_ris={float(s.alpha_ris)!r}",
        f"alpha_direct={float(s.alpha_direct)!r}",
        f"channel_kind={s.channel_kind}",
        f"seed={s.seed}",
        "bs_xyz=" + ",".join(repr(float(v)) for v in s.bs_pos),
    ]
    for i in range(s.n_users):
        lines.append(f"user_{i}_xyz=" + ",".join(repr(float(v)) for v in s.user_pos[i]))
        lines.append(f"ris_{i}_xyz=" + ",".join(repr(float(v)) for v in s.ris_pos[i]))
    return "\n".join(lines) + "\n"
