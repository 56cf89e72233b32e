"""Regularized zero-forcing precoders: full-channel RZF and per-group RZF
behind the statistical inner precoder (PGP-RZF)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import modem
from ..errors import ParameterError, SingularFactorError
from ..linalg import as_cmatrix, regularized_gram_inverse
from .inner import InnerPrecoder


@dataclass(frozen=True)
class LinearPrecoderState:
    """Precoding matrix ``V`` (N x K) plus what the receivers need.

    ``zeta`` holds one normalization factor for RZF and one per group for
    PGP-RZF. ``effective_gains[k] = [H^H V]_{k,k}``.
    """

    V: np.ndarray
    zeta: np.ndarray
    effective_gains: np.ndarray
    M: int = 16
    degenerate: bool = False

    def encode(self, d: np.ndarray) -> np.ndarray:
        return self.V @ d

    def receive(self, r: np.ndarray) -> np.ndarray:
        return receive_linear(self, r)


def _gram_inverse(h: np.ndarray, alpha: float) -> np.ndarray:
    if alpha > 0:
        return regularized_gram_inverse(h, alpha)
    # noiseless limit: plain zero forcing
    gram = h.conj().T @ h
    try:
        return np.linalg.inv(gram)
    except np.linalg.LinAlgError:
        raise SingularFactorError(0, detail="Gram matrix is singular") from None


def _rzf_block(h: np.ndarray, alpha: float, power: float):
    v = h @ _gram_inverse(h, alpha)
    trace = np.real(np.vdot(v, v))
    if trace <= 0 or not np.isfinite(trace):
        return np.zeros_like(v), 0.0, True
    zeta = np.sqrt(power / trace)
    return zeta * v, zeta, False


def _check_noise(sigma_z2: float, p_tx: float) -> None:
    if sigma_z2 < 0:
        raise ParameterError("noise variance must be non-negative")
    if not p_tx > 0:
        raise ParameterError("transmit power must be positive")


def build_rzf(H, sigma_z2: float, p_tx: float, M: int = 16) -> LinearPrecoderState:
    """``V = zeta H (H^H H + K sigma_z^2 / P_TX I)^{-1}`` with ``tr(V V^H) = K``.

    A zero channel gives a zero precoder and ``degenerate=True``.
    """
    H = as_cmatrix(H, "H")
    _check_noise(sigma_z2, p_tx)
    k = H.shape[1]
    V, zeta, degenerate = _rzf_block(H, k * sigma_z2 / p_tx, float(k))
    gains = np.einsum("nk,nk->k", H.conj(), V)
    return LinearPrecoderState(
        V=V, zeta=np.array([zeta]), effective_gains=gains, M=M, degenerate=degenerate
    )


def build_pgp_rzf(
    inner: InnerPrecoder, H, sigma_z2: float, p_tx: float, M: int = 16
) -> LinearPrecoderState:
    """Per-group RZF on the effective channels ``W_g^H H_g``.

    Group ``g`` gets ``W_g P_g`` with ``tr(W_g P_g P_g^H W_g^H) = K_bar``; the
    regularizer uses ``K_bar sigma_z^2 / P_TX``.
    """
    H = as_cmatrix(H, "H")
    _check_noise(sigma_z2, p_tx)
    kb = inner.users_per_group
    if H.shape != (inner.n_antennas, kb * inner.n_groups):
        raise ParameterError(
            f"channel shape {H.shape} does not match the inner precoder"
        )
    alpha = kb * sigma_z2 / p_tx
    blocks, zetas, degenerate = [], [], False
    for g, w in enumerate(inner.W):
        h_eff = w.conj().T @ H[:, g * kb : (g + 1) * kb]
        p, zeta, flag = _rzf_block(h_eff, alpha, float(kb))
        blocks.append(w @ p)
        zetas.append(zeta)
        degenerate |= flag
    V = np.concatenate(blocks, axis=1)
    gains = np.einsum("nk,nk->k", H.conj(), V)
    return LinearPrecoderState(
        V=V, zeta=np.array(zetas), effective_gains=gains, M=M, degenerate=degenerate
    )


def receive_linear(state: LinearPrecoderState, r: np.ndarray) -> np.ndarray:
    """Scale each user's sample by its real effective gain, then slice."""
    gain = np.real(state.effective_gains)
    gain = np.where(gain == 0, 1.0, gain)
    r = np.asarray(r, dtype=complex)
    scaled = r / (gain[:, None] if r.ndim == 2 else gain)
    return modem.decide(scaled, state.M)
