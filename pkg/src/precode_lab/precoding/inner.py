"""Statistical inner precoder that approximately block-diagonalizes the
downlink channel across user groups.

For group ``g`` the dominant eigenvectors of every *other* group's
correlation matrix are stacked into ``Psi_g``; the orthogonal complement of
their span, ``E0_g``, is where group ``g`` may transmit without (statistically)
leaking into the others. Inside that subspace the ``K_bar`` strongest
directions of the projected covariance ``E0_g^H R_g E0_g`` form ``A1_g`` and
the inner precoder is ``W_g = E0_g A1_g``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..channel import CorrelationSet
from ..errors import FeasibilityError, ParameterError
from ..linalg import hermitian_eig

DEFAULT_EIG_THRESHOLD = 1e-3


@dataclass(frozen=True)
class LgPolicy:
    """How many dominant eigenvectors each group contributes to the others'
    nulling constraints.

    Exactly one of ``fixed`` and ``per_group`` may be given. With neither,
    every group uses the same ``L`` equal to the largest count of eigenvalues
    at or above ``threshold * lambda_max`` across groups, reduced until all
    groups are feasible.
    """

    fixed: int | None = None
    per_group: tuple[int, ...] | None = None
    threshold: float = DEFAULT_EIG_THRESHOLD

    def __post_init__(self):
        if self.fixed is not None and self.per_group is not None:
            raise ParameterError("give either a fixed L or per-group values, not both")
        if self.fixed is not None and self.fixed < 0:
            raise ParameterError("L must be non-negative")
        if self.per_group is not None and any(v < 0 for v in self.per_group):
            raise ParameterError("L values must be non-negative")
        if not 0 < self.threshold < 1:
            raise ParameterError("threshold must lie in (0, 1)")

    @classmethod
    def parse(cls, text: str) -> "LgPolicy":
        """Parse ``auto``, ``auto:<threshold>``, ``fixed:<L>`` or ``L1,L2,...``."""
        text = text.strip().lower()
        if text == "auto":
            return cls()
        if text.startswith("auto:"):
            return cls(threshold=float(text[5:]))
        if text.startswith("fixed:"):
            return cls(fixed=int(text[6:]))
        try:
            return cls(per_group=tuple(int(v) for v in text.split(",")))
        except ValueError:
            raise ParameterError(f"unrecognized L policy {text!r}") from None

    def __str__(self) -> str:
        if self.fixed is not None:
            return f"fixed:{self.fixed}"
        if self.per_group is not None:
            return ",".join(str(v) for v in self.per_group)
        return "auto" if self.threshold == DEFAULT_EIG_THRESHOLD else f"auto:{self.threshold:g}"

    def resolve(self, corr: CorrelationSet, users_per_group: int) -> tuple[int, ...]:
        n_groups, n = corr.n_groups, corr.n_antennas
        if self.per_group is not None:
            if len(self.per_group) != n_groups:
                raise ParameterError(
                    f"{len(self.per_group)} L values given for {n_groups} groups"
                )
            return self.per_group
        if self.fixed is not None:
            return (self.fixed,) * n_groups
        if n_groups == 1:
            return (0,)
        counts = []
        for eig in corr.eigs:
            lam = eig.values
            counts.append(int(np.count_nonzero(lam >= self.threshold * lam[0])))
        cap = (n - users_per_group) // (n_groups - 1)
        return (max(0, min(max(counts), cap)),) * n_groups


@dataclass(frozen=True)
class InnerPrecoder:
    """Per-group inner precoders. Index 0 is group 1.

    ``W[g]`` is ``N x K_bar`` with orthonormal columns; ``E0[g]`` spans the
    orthogonal complement of the other groups' dominant eigenspaces.
    """

    W: tuple[np.ndarray, ...]
    L: tuple[int, ...]
    E0: tuple[np.ndarray, ...]
    A1: tuple[np.ndarray, ...]

    @property
    def n_groups(self) -> int:
        return len(self.W)

    @property
    def users_per_group(self) -> int:
        return self.W[0].shape[1]

    @property
    def n_antennas(self) -> int:
        return self.W[0].shape[0]

    @classmethod
    def from_blocks(cls, blocks: Sequence[np.ndarray]) -> "InnerPrecoder":
        """Wrap explicit ``W_g`` blocks (no nulling structure recorded)."""
        W = tuple(np.asarray(b, dtype=complex) for b in blocks)
        eye = tuple(np.eye(w.shape[0], dtype=complex) for w in W)
        return cls(W=W, L=(0,) * len(W), E0=eye, A1=W)


def check_feasible(L: Sequence[int], n_antennas: int, users_per_group: int) -> None:
    total = sum(L)
    for g, lg in enumerate(L, start=1):
        available = n_antennas - (total - lg)
        if available < users_per_group:
            raise FeasibilityError(g, available, users_per_group)


def build_inner(
    corr: CorrelationSet, users_per_group: int, policy: LgPolicy | None = None
) -> InnerPrecoder:
    """Construct the block-diagonalizing inner precoder from statistics only."""
    policy = policy or LgPolicy()
    if users_per_group < 1:
        raise ParameterError("users_per_group must be positive")
    n = corr.n_antennas
    L = policy.resolve(corr, users_per_group)
    check_feasible(L, n, users_per_group)

    W, E0s, A1s = [], [], []
    for g in range(corr.n_groups):
        others = [corr.eigs[h].dominant(L[h]) for h in range(corr.n_groups) if h != g]
        width = sum(L) - L[g]
        if width:
            psi = np.concatenate(others, axis=1)
            u, _, _ = np.linalg.svd(psi, full_matrices=True)
            e0 = u[:, width:]
        else:
            e0 = np.eye(n, dtype=complex)
        projected = e0.conj().T @ corr.matrices[g] @ e0
        projected = 0.5 * (projected + projected.conj().T)
        a1 = hermitian_eig(projected).dominant(users_per_group)
        E0s.append(e0)
        A1s.append(a1)
        W.append(e0 @ a1)
    return InnerPrecoder(W=tuple(W), L=tuple(L), E0=tuple(E0s), A1=tuple(A1s))


def leakage_ratio(inner: InnerPrecoder, H: np.ndarray) -> np.ndarray:
    """Per group: inter-group leakage energy over intended-group energy,
    ``sum_{g' != g} ||H_g'^H W_g||^2 / ||W_g^H H_g||^2``."""
    kb = inner.users_per_group
    out = np.empty(inner.n_groups)
    for g, w in enumerate(inner.W):
        cross = H.conj().T @ w
        own = cross[g * kb : (g + 1) * kb]
        total = np.sum(np.abs(cross) ** 2)
        own_e = np.sum(np.abs(own) ** 2)
        out[g] = (total - own_e) / own_e
    return out
