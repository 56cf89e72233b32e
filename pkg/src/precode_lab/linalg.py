"""Complex dense linear-algebra kernels with pinned conventions.

Matrices are plain 2-D ``numpy`` arrays of complex dtype. The wrappers here
fix the conventions the precoders depend on: descending eigenvalue order with
round-off clamping, and QR factors whose ``r`` has a real positive diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError, SingularFactorError

HERMITIAN_TOL = 1e-10
CLAMP_TOL = 1e-10
RANK_TOL = 1e-12


@dataclass(frozen=True)
class EigPair:
    """Eigenvectors (as columns) and non-negative eigenvalues, descending."""

    vectors: np.ndarray
    values: np.ndarray

    def dominant(self, count: int) -> np.ndarray:
        return self.vectors[:, :count]


@dataclass(frozen=True)
class QrPair:
    """Thin QR factors: ``q`` has orthonormal columns, ``r`` is upper
    triangular with a real, strictly positive diagonal."""

    q: np.ndarray
    r: np.ndarray


def as_cmatrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} has non-finite entries")
    return arr


def hermitian_eig(a) -> EigPair:
    """Eigendecomposition of a Hermitian positive semi-definite matrix.

    Eigenvalues are returned in descending order. Values in
    ``[-1e-10 * lambda_max, 0)`` are clamped to zero; anything more negative
    means the input was not PSD and is reported as a symmetry error.

    Raises
    ------
    DimensionError
        If ``a`` is not square or not Hermitian to ``1e-10`` (relative to its
        largest entry).
    """
    a = as_cmatrix(a)
    n, m = a.shape
    if n != m:
        raise DimensionError(f"expected a square matrix, got {a.shape}")
    scale = max(np.max(np.abs(a)), 1.0) if a.size else 1.0
    if np.max(np.abs(a - a.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
        raise DimensionError("matrix is not Hermitian")
    values, vectors = np.linalg.eigh(a)
    values = values[::-1].copy()
    vectors = vectors[:, ::-1].copy()
    lam_max = max(values[0], 0.0) if n else 0.0
    floor = -CLAMP_TOL * lam_max
    if n and values[-1] < floor and values[-1] < -CLAMP_TOL:
        raise DimensionError(
            f"matrix is not positive semi-definite (eigenvalue {values[-1]:.3e})"
        )
    values[values < 0] = 0.0
    return EigPair(vectors=vectors, values=values)


def qr_decompose(a) -> QrPair:
    """Thin QR decomposition with a positive real diagonal on ``r``.

    The Householder factors from LAPACK are rephased by unit phasors so that
    ``diag(r) > 0``; this makes the factorization unique for full-rank input.

    Raises
    ------
    DimensionError
        If ``a`` is wide (more columns than rows).
    SingularFactorError
        If some ``|r[k, k]| <= 1e-12 * max |r[j, j]|``; the exception carries
        the first such column index.
    """
    a = as_cmatrix(a)
    n, k = a.shape
    if k > n:
        raise DimensionError(f"QR needs a square or tall matrix, got {a.shape}")
    q, r = np.linalg.qr(a, mode="reduced")
    diag = np.diag(r)
    mags = np.abs(diag)
    largest = mags.max(initial=0.0)
    bad = np.flatnonzero(mags <= RANK_TOL * largest) if largest > 0 else np.arange(k)
    if bad.size:
        raise SingularFactorError(int(bad[0]))
    phase = diag / mags
    q = q * phase[np.newaxis, :]
    r = r * phase.conj()[:, np.newaxis]
    # exact real diagonal after rephasing
    r[np.diag_indices(k)] = mags
    return QrPair(q=q, r=r)


def regularized_gram_inverse(h, alpha: float) -> np.ndarray:
    """Return ``(h^H h + alpha I)^{-1}`` for ``alpha > 0``.

    Solved through a Cholesky factorization of the (Hermitian positive
    definite) regularized Gram matrix and symmetrized on exit.
    """
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    h = as_cmatrix(h, "h")
    k = h.shape[1]
    gram = h.conj().T @ h + alpha * np.eye(k)
    chol = np.linalg.cholesky(gram)
    eye = np.eye(k, dtype=complex)
    half = np.linalg.solve(chol, eye)
    inv = half.conj().T @ half
    return 0.5 * (inv + inv.conj().T)
