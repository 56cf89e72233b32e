"""Closed-form FLOP counts for producing ``T`` precoded vectors per coherence
interval, under the convention of 6 FLOPs per complex multiplication and 2 per
complex addition.

Each scheme has two equivalent closed forms: the per-operation derivation
(in terms of the group size ``K_bar = K/G``) and the compact summary written
directly in ``K`` and ``G``. Both are evaluated so they can be cross-checked.
Counts are real numbers because the QR term ``8NK^2 - 8K^3/3`` is an
asymptotic operation count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParameterError

SCHEMES = ("thp", "rzf", "hl-thp", "pgp-rzf")
GROUPED = frozenset({"pgp-rzf", "hl-thp"})


@dataclass(frozen=True)
class CostQuery:
    scheme: str
    K: int
    N: int
    T: int = 100
    G: int = 1

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ParameterError(f"unknown scheme {self.scheme!r}")
        if self.K < 1 or self.N < 1 or self.G < 1:
            raise ParameterError("K, N and G must be positive")
        if self.T < 0:
            raise ParameterError("T must be non-negative")
        if self.scheme in GROUPED and self.K % self.G:
            raise ParameterError(f"G={self.G} does not divide K={self.K}")

    @property
    def Kb(self) -> int:
        return self.K // self.G


@dataclass(frozen=True)
class CostResult:
    query: CostQuery
    breakdown: dict[str, float] = field(default_factory=dict)

    @property
    def flops(self) -> float:
        return sum(self.breakdown.values())


def _rzf_terms(q: CostQuery) -> dict[str, float]:
    K, N, T = q.K, q.N, q.T
    return {
        "gram": K * (K + 1) * (4 * N - 1),
        "regularize": K,
        "invert": 4 * K**3 + 8 * K**2 + 6 * K,
        "multiply": 2 * N * K * (4 * K - 1),
        "per_symbol": 2 * N * T * (4 * K - 1),
    }


def _pgp_terms(q: CostQuery) -> dict[str, float]:
    K, N, T, G, Kb = q.K, q.N, q.T, q.G, q.Kb
    return {
        "effective_channel": 2 * G * Kb**2 * (4 * N - 1),
        "gram": G * Kb * (Kb + 1) * (4 * Kb - 1),
        "regularize": G * Kb,
        "invert": G * (4 * Kb**3 + 8 * Kb**2 + 6 * Kb),
        "multiply": G * 2 * Kb * Kb * (4 * Kb - 1),
        "combine_inner": G * 2 * N * Kb * (4 * Kb - 1),
        "per_symbol": 2 * N * T * (4 * K - 1),
    }


def _thp_terms(q: CostQuery) -> dict[str, float]:
    K, N, T = q.K, q.N, q.T
    return {
        "qr": 8 * N * K**2 - 8 * K**3 / 3,
        "feedback_matrix": 8 * K**3 - 2 * K**2 + 2 * K,
        # the stated operation counts sum to 2K less than the stated total
        "total_reconciliation": 2 * K,
        "per_symbol_feedback": 4 * T * (K**2 + K - 2),
        "per_symbol": 2 * T * N * (4 * K - 1),
    }


def _hlthp_terms(q: CostQuery) -> dict[str, float]:
    K, N, T, G, Kb = q.K, q.N, q.T, q.G, q.Kb
    return {
        "effective_channel": 2 * G * Kb**2 * (4 * N - 1),
        "qr": 16 * G * Kb**3 / 3,
        "feedback_matrix": 2 * G * Kb * (4 * Kb**2 - Kb + 1),
        "combine_inner": 2 * N * G * Kb * (4 * Kb - 1),
        "per_symbol_feedback": 4 * T * G * (Kb**2 + Kb - 2),
        "per_symbol": 2 * T * N * (4 * K - 1),
    }


_TERMS = {
    "rzf": _rzf_terms,
    "pgp-rzf": _pgp_terms,
    "thp": _thp_terms,
    "hl-thp": _hlthp_terms,
}


def flops(q: CostQuery) -> CostResult:
    """FLOP count of ``q.scheme`` with a labelled per-operation breakdown."""
    return CostResult(query=q, breakdown={k: float(v) for k, v in _TERMS[q.scheme](q).items()})


def closed_form(q: CostQuery) -> float:
    """Per-scheme total as a single expression in ``K_bar``."""
    K, N, T, G = q.K, q.N, q.T, q.G
    Kb = q.Kb
    if q.scheme == "rzf":
        return (4 * K**3 + 2 * K * N * (4 * K - 1) + K * (4 * N - 1) * (K + 1)
                + 8 * K**2 + 7 * K + 2 * N * T * (4 * K - 1))
    if q.scheme == "pgp-rzf":
        return G * Kb * (16 * Kb * N + 16 * Kb**2 + 7 * Kb + 6 - 2 * N) + 2 * N * T * (4 * K - 1)
    if q.scheme == "thp":
        return (16 * K**3 / 3 + 8 * K**2 * N - 2 * K**2 + 4 * K
                + 2 * T * (2 * K + 2 * K**2 + N * (4 * K - 1) - 4))
    return (40 * G * Kb**3 / 3 - 4 * G * Kb**2 + 2 * G * Kb - 2 * G * Kb * N
            + 16 * G * Kb**2 * N + T * (4 * G * Kb**2 + 4 * G * Kb + 8 * K * N - 8 * G - 2 * N))


def summary_form(q: CostQuery) -> float:
    """The same totals written in ``K`` and ``G`` only."""
    K, N, T, G = q.K, q.N, q.T, q.G
    if q.scheme == "rzf":
        return (4 * K**3 + 2 * K * N * (4 * K - 1) + K * (4 * N - 1) * (K + 1)
                + 2 * N * T * (4 * K - 1) + 8 * K**2 + 7 * K)
    if q.scheme == "pgp-rzf":
        return 2 * N * T * (4 * K - 1) + 6 * K - 2 * K * N + (16 * N + 16 * K / G + 7) * K**2 / G
    if q.scheme == "thp":
        return 16 * K**3 / 3 + 2 * K * (4 * K * N - K + 2) + 2 * T * (2 * K + 2 * K**2 + N * (4 * K - 1) - 4)
    return (2 * K * (3 * G**2 - 3 * G**2 * N + 20 * K**2 - 6 * G * K + 24 * G * K * N) / (3 * G**2)
            + 2 * T * (2 * K**2 - 4 * G**2 + 2 * G * K - G * N + 4 * G * K * N) / G)


def check_table1_consistency(K: int, N: int, G: int, T: int) -> float:
    """Largest relative disagreement between the breakdown sum, the per-scheme
    closed form and the compact summary, over all four schemes."""
    worst = 0.0
    for scheme in SCHEMES:
        q = CostQuery(scheme, K=K, N=N, T=T, G=G)
        values = (flops(q).flops, closed_form(q), summary_form(q))
        ref = max(abs(v) for v in values) or 1.0
        worst = max(worst, (max(values) - min(values)) / ref)
    return worst


def complexity_ordering(K_values, N: int, G: int, T: int) -> dict[int, list[str]]:
    """Schemes sorted by descending FLOP count for each ``K``."""
    out = {}
    for K in K_values:
        costs = {s: flops(CostQuery(s, K=K, N=N, T=T, G=G)).flops for s in SCHEMES}
        out[K] = sorted(costs, key=costs.__getitem__, reverse=True)
    return out
