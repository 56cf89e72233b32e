"""Builders, encoders and receivers for the four downlink precoders.

Every state object exposes ``encode(d)`` (symbols of shape ``(K,)`` or
``(K, T)`` to transmit vectors) and ``receive(r)`` (received samples to
alphabet decisions).
"""

from __future__ import annotations

import numpy as np

from ..errors import ParameterError

from .inner import InnerPrecoder, LgPolicy, build_inner, check_feasible, leakage_ratio
from .linear import LinearPrecoderState, build_pgp_rzf, build_rzf
from .thp import (
    HlthpState,
    ThpState,
    build_hlthp,
    build_thp,
    feedback_filter,
    hlthp_encode,
    modulo_tx_scale,
    thp_encode,
)

SCHEMES = ("rzf", "pgp-rzf", "thp", "hl-thp")

PrecoderState = LinearPrecoderState | ThpState | HlthpState


def receive(state: PrecoderState, r) -> np.ndarray:
    """Receiver-side decisions for any precoder state."""
    return state.receive(r)


def build_scheme(
    scheme: str,
    H: np.ndarray,
    *,
    inner: InnerPrecoder | None = None,
    sigma_z2: float = 0.0,
    p_tx: float = 1.0,
    M: int = 16,
) -> PrecoderState:
    """Dispatch on a scheme name from ``SCHEMES``."""
    if scheme == "rzf":
        return build_rzf(H, sigma_z2, p_tx, M)
    if scheme == "thp":
        return build_thp(H, M)
    if inner is None:
        raise ParameterError(f"{scheme} needs an inner precoder")
    if scheme == "pgp-rzf":
        return build_pgp_rzf(inner, H, sigma_z2, p_tx, M)
    if scheme == "hl-thp":
        return build_hlthp(inner, H, M)
    raise ParameterError(f"unknown scheme {scheme!r}")


__all__ = [
    "SCHEMES",
    "HlthpState",
    "InnerPrecoder",
    "LgPolicy",
    "LinearPrecoderState",
    "PrecoderState",
    "ThpState",
    "build_hlthp",
    "build_inner",
    "build_pgp_rzf",
    "build_rzf",
    "build_scheme",
    "build_thp",
    "check_feasible",
    "feedback_filter",
    "hlthp_encode",
    "leakage_ratio",
    "modulo_tx_scale",
    "receive",
    "thp_encode",
]
