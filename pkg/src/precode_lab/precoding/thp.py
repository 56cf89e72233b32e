"""Tomlinson-Harashima precoding: the conventional full-channel THP and the
hybrid scheme that runs one small THP per user group behind the statistical
inner precoder."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import modem
from ..errors import ParameterError, SingularFactorError
from ..linalg import as_cmatrix, qr_decompose
from .inner import InnerPrecoder


def modulo_tx_scale(M: int) -> float:
    """``sqrt((M-1)/M)``: rescales the modulo output (variance ``2M/3``) to the
    QAM symbol variance ``2(M-1)/3``."""
    return math.sqrt((M - 1) / M)


def feedback_filter(B: np.ndarray, d: np.ndarray, M: int) -> np.ndarray:
    """Successive pre-subtraction with modulo folding.

    ``x_k = Mod_M(d_k - sum_{l<k} [B - I]_{k,l} x_l)`` for ``k = 1..K``, applied
    independently to every column of ``d`` (shape ``(K,)`` or ``(K, T)``).
    """
    d = np.asarray(d, dtype=complex)
    x = np.empty_like(d)
    for k in range(d.shape[0]):
        x[k] = modem.mod_reduce(d[k] - B[k, :k] @ x[:k], M)
    return x


def _thp_factors(h: np.ndarray):
    qr = qr_decompose(h)
    diag = np.real(np.diag(qr.r))
    xi = 1.0 / diag
    B = xi[:, None] * qr.r.conj().T
    B[np.diag_indices_from(B)] = 1.0
    return qr.q, B, xi


def _receive_modulo(r: np.ndarray, xi: np.ndarray, tx_scale: float, M: int) -> np.ndarray:
    r = np.asarray(r, dtype=complex)
    w = xi / tx_scale
    y = r * (w[:, None] if r.ndim == 2 else w)
    return modem.decide(modem.mod_reduce(y, M), M)


@dataclass(frozen=True)
class ThpState:
    """``H = F Bc`` (thin QR), ``B = Xi Bc^H`` with unit diagonal."""

    F: np.ndarray
    B: np.ndarray
    Xi: np.ndarray
    tx_scale: float
    M: int = 16

    def encode(self, d: np.ndarray) -> np.ndarray:
        return thp_encode(self, d)

    def receive(self, r: np.ndarray) -> np.ndarray:
        return _receive_modulo(r, self.Xi, self.tx_scale, self.M)


def build_thp(H, M: int = 16) -> ThpState:
    """Conventional THP in natural user order.

    Raises
    ------
    SingularFactorError
        If ``H`` is (numerically) rank deficient.
    """
    H = as_cmatrix(H, "H")
    F, B, xi = _thp_factors(H)
    return ThpState(F=F, B=B, Xi=xi, tx_scale=modulo_tx_scale(M), M=M)


def thp_encode(state: ThpState, d) -> np.ndarray:
    x = feedback_filter(state.B, d, state.M)
    return state.tx_scale * (state.F @ x)


@dataclass(frozen=True)
class HlthpState:
    """Inner precoder plus one THP per group on ``W_g^H H_g = F_g Bc_g``.

    ``Xi`` concatenates the per-group receiver scalings in user order and
    ``combined_tx[g] = W_g F_g``.
    """

    inner: InnerPrecoder
    F: tuple[np.ndarray, ...]
    B: tuple[np.ndarray, ...]
    Xi: np.ndarray
    combined_tx: tuple[np.ndarray, ...]
    tx_scale: float
    M: int = 16

    def encode(self, d: np.ndarray) -> np.ndarray:
        return hlthp_encode(self, d)

    def feedback_outputs(self, d) -> list[np.ndarray]:
        kb = self.inner.users_per_group
        d = np.asarray(d, dtype=complex)
        return [
            feedback_filter(b, d[g * kb : (g + 1) * kb], self.M)
            for g, b in enumerate(self.B)
        ]

    def receive(self, r: np.ndarray) -> np.ndarray:
        return _receive_modulo(r, self.Xi, self.tx_scale, self.M)


def build_hlthp(inner: InnerPrecoder, H, M: int = 16) -> HlthpState:
    """Per-group QR of the effective channels after the inner precoder.

    Raises
    ------
    SingularFactorError
        With ``group`` set when an effective group channel is rank deficient.
    """
    H = as_cmatrix(H, "H")
    kb = inner.users_per_group
    if H.shape != (inner.n_antennas, kb * inner.n_groups):
        raise ParameterError(f"channel shape {H.shape} does not match the inner precoder")
    Fs, Bs, xis, combined = [], [], [], []
    for g, w in enumerate(inner.W):
        h_eff = w.conj().T @ H[:, g * kb : (g + 1) * kb]
        try:
            F, B, xi = _thp_factors(h_eff)
        except SingularFactorError as exc:
            raise SingularFactorError(exc.column, group=g + 1) from None
        Fs.append(F)
        Bs.append(B)
        xis.append(xi)
        combined.append(w @ F)
    return HlthpState(
        inner=inner,
        F=tuple(Fs),
        B=tuple(Bs),
        Xi=np.concatenate(xis),
        combined_tx=tuple(combined),
        tx_scale=modulo_tx_scale(M),
        M=M,
    )


def hlthp_encode(state: HlthpState, d) -> np.ndarray:
    """``s = tx_scale * sum_g W_g F_g x_g`` with per-group feedback outputs."""
    xs = state.feedback_outputs(d)
    s = sum(c @ x for c, x in zip(state.combined_tx, xs))
    return state.tx_scale * s
