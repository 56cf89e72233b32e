"""One-ring correlation model for a uniform linear array and block-fading
channel sampling.

Each group of users sees scatterers spread uniformly over an angular interval
``[theta_min, theta_max]``. The correlation root of a group is the Toeplitz
matrix

    [R~]_{m,n} = 1/(theta_max - theta_min) * integral exp(j 2 pi omega (m-n) sin(theta)) dtheta

and the channel of user ``k`` in group ``g`` is ``h_k = R~_g nu_k`` with
``nu_k ~ CN(0, I_N)``, so that ``R_g = R~_g R~_g^H``.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import toeplitz

from .errors import DimensionError, ParameterError
from .linalg import EigPair, hermitian_eig

DEFAULT_QUAD_POINTS = 512


@dataclass(frozen=True)
class GroupGeometry:
    """Angular support and array spacing for one user group."""

    group_index: int
    theta_min: float
    theta_max: float
    omega: float = 0.5

    def __post_init__(self):
        if not self.theta_max > self.theta_min:
            raise ParameterError("theta_max must exceed theta_min")
        if self.omega < 0:
            raise ParameterError("omega must be non-negative")

    @property
    def delta(self) -> float:
        return 0.5 * (self.theta_max - self.theta_min)

    @classmethod
    def for_group(cls, g: int, n_groups: int, delta: float, omega: float = 0.5):
        lo, hi = group_angle_bounds(g, n_groups, delta)
        return cls(group_index=g, theta_min=lo, theta_max=hi, omega=omega)


@dataclass(frozen=True)
class CorrelationSet:
    """Per-group correlation roots, correlation matrices and their
    eigendecompositions. Index 0 holds group 1."""

    roots: tuple[np.ndarray, ...]
    matrices: tuple[np.ndarray, ...]
    eigs: tuple[EigPair, ...]

    @property
    def n_groups(self) -> int:
        return len(self.roots)

    @property
    def n_antennas(self) -> int:
        return self.roots[0].shape[0]

    @classmethod
    def from_roots(cls, roots) -> "CorrelationSet":
        roots = tuple(np.asarray(r, dtype=complex) for r in roots)
        if not roots:
            raise ParameterError("at least one group is required")
        n = roots[0].shape[0]
        for r in roots:
            if r.shape != (n, n):
                raise DimensionError("all correlation roots must be N x N")
        mats = tuple(r @ r.conj().T for r in roots)
        mats = tuple(0.5 * (m + m.conj().T) for m in mats)
        return cls(roots=roots, matrices=mats, eigs=tuple(hermitian_eig(m) for m in mats))

    @classmethod
    def one_ring(
        cls,
        n_antennas: int,
        n_groups: int,
        delta: float,
        omega: float = 0.5,
        quad_points: int = DEFAULT_QUAD_POINTS,
        literal_eq2: bool = False,
    ) -> "CorrelationSet":
        roots = [
            correlation_root(
                GroupGeometry.for_group(g, n_groups, delta, omega),
                n_antennas,
                quad_points,
                literal_eq2=literal_eq2,
            )
            for g in range(1, n_groups + 1)
        ]
        return cls.from_roots(roots)


@dataclass(frozen=True)
class ChannelRealization:
    """``H`` is ``N x K`` with columns ordered group-major."""

    H: np.ndarray
    users_per_group: int

    def group(self, g: int) -> np.ndarray:
        """Channel block of group ``g`` (one-based)."""
        kb = self.users_per_group
        return self.H[:, (g - 1) * kb : g * kb]

    def digest(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.H).tobytes()).hexdigest()


def group_angle_bounds(g: int, n_groups: int, delta: float) -> tuple[float, float]:
    """Angular interval ``(theta_min, theta_max)`` of group ``g`` in radians.

    Groups start evenly around the circle at ``-pi + 2 pi (g-1)/G`` and each
    spans ``2 * delta``.
    """
    if n_groups < 1 or not 1 <= g <= n_groups:
        raise ParameterError(f"group index {g} outside 1..{n_groups}")
    if not delta > 0:
        raise ParameterError("angular spread must be positive")
    lo = -math.pi + 2.0 * math.pi * (g - 1) / n_groups
    return lo, lo + 2.0 * delta


def correlation_root(
    geom: GroupGeometry,
    n_antennas: int,
    quad_points: int = DEFAULT_QUAD_POINTS,
    *,
    literal_eq2: bool = False,
) -> np.ndarray:
    """Toeplitz correlation root of one group by fixed-node Gauss-Legendre
    quadrature over the angular interval.

    With ``literal_eq2=True`` the exponent omits the ``sin(theta)`` factor,
    which makes every entry equal to one (rank-one root); kept only for
    comparison runs.
    """
    if quad_points < 64:
        raise ParameterError("quad_points must be at least 64")
    if n_antennas < 1:
        raise ParameterError("n_antennas must be positive")
    nodes, weights = _gauss_legendre(quad_points)
    # map [-1, 1] onto the interval; weights then average over it
    theta = geom.theta_min + 0.5 * (nodes + 1.0) * (geom.theta_max - geom.theta_min)
    weights = 0.5 * weights
    steer = np.ones_like(theta) if literal_eq2 else np.sin(theta)
    lags = np.arange(n_antennas)
    phase = 2.0 * np.pi * geom.omega * np.outer(lags, steer)
    first_col = np.exp(1j * phase) @ weights
    first_col[0] = 1.0
    # [R~]_{m,n} depends on m - n; column 0 holds lags m - 0 >= 0
    return toeplitz(first_col, first_col.conj())


@lru_cache(maxsize=16)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def standard_complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Circularly symmetric CN(0, 1) draws (real/imag variance 1/2 each)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def sample_channel(
    corr: CorrelationSet, users_per_group: int, rng: np.random.Generator
) -> ChannelRealization:
    """Draw ``H = [R~_1 V_1, ..., R~_G V_G]`` with i.i.d. ``CN(0, 1)`` ``V_g``.

    All groups' innovations are drawn in one call, so the realization depends
    only on the generator state.
    """
    if users_per_group < 1:
        raise ParameterError("users_per_group must be positive")
    n = corr.n_antennas
    nu = standard_complex_normal(rng, (corr.n_groups, n, users_per_group))
    blocks = [root @ nu[i] for i, root in enumerate(corr.roots)]
    return ChannelRealization(H=np.concatenate(blocks, axis=1), users_per_group=users_per_group)
