from fractions import Fraction

import pytest

from precode_lab.complexity import (
    SCHEMES,
    CostQuery,
    check_table1_consistency,
    closed_form,
    complexity_ordering,
    flops,
    summary_form,
)
from precode_lab.errors import ParameterError


def rzf_by_hand(K, N, T):
    # Gram, regularize, invert, multiply, per-symbol
    return K * (K + 1) * (4 * N - 1) + K + (4 * K**3 + 8 * K**2 + 6 * K) + 2 * N * K * (4 * K - 1) + 2 * N * T * (4 * K - 1)


def test_rzf_spot_value():
    assert 16384 + 64512 + 34544 + 2048 + 112 + 403200 == 520_800
    assert rzf_by_hand(16, 32, 100) == 520_800
    assert flops(CostQuery("rzf", K=16, N=32, T=100)).flops == 520_800


def test_rzf_tiny_literal_substitution():
    # 4 + 2*1*1*3 + 1*3*2 + 8 + 7 + 0
    assert flops(CostQuery("rzf", K=1, N=1, T=0)).flops == 4 + 6 + 6 + 8 + 7


@pytest.mark.parametrize("K,N,T", [(1, 1, 1), (4, 32, 100), (16, 64, 7), (32, 32, 1)])
def test_thp_only_qr_term_fractional(K, N, T):
    value = Fraction(flops(CostQuery("thp", K=K, N=N, T=T)).flops).limit_denominator(3)
    rest = value - Fraction(16 * K**3, 3)
    assert rest.denominator == 1


def test_breakdown_sums_to_total():
    for scheme in SCHEMES:
        res = flops(CostQuery(scheme, K=16, N=32, T=100, G=4))
        assert sum(res.breakdown.values()) == res.flops
        assert res.flops > 0
        assert res.flops == pytest.approx(closed_form(res.query), rel=1e-12)


def test_breakdown_labels():
    labels = {s: set(flops(CostQuery(s, K=8, N=32, T=10, G=4)).breakdown) for s in SCHEMES}
    assert {"gram", "regularize", "invert", "multiply", "per_symbol"} <= labels["rzf"]
    assert {"effective_channel", "gram", "invert", "combine_inner", "per_symbol"} <= labels["pgp-rzf"]
    assert {"qr", "feedback_matrix", "per_symbol_feedback", "per_symbol"} <= labels["thp"]
    assert {"effective_channel", "qr", "feedback_matrix", "combine_inner"} <= labels["hl-thp"]


@pytest.mark.parametrize("K", [4, 8, 16, 32])
@pytest.mark.parametrize("N", [32, 64])
@pytest.mark.parametrize("G", [2, 4])
@pytest.mark.parametrize("T", [1, 100])
def test_two_closed_forms_agree(K, N, G, T):
    for scheme in SCHEMES:
        q = CostQuery(scheme, K=K, N=N, T=T, G=G)
        assert summary_form(q) == pytest.approx(closed_form(q), rel=1e-6)
    assert check_table1_consistency(K, N, G, T) <= 1e-6


@pytest.mark.parametrize("K,N,G,T,tol", [(16, 32, 4, 100, 1e-6), (4, 1, 4, 1, 1e-9), (32, 32, 4, 100, 1e-6)])
def test_consistency_examples(K, N, G, T, tol):
    assert check_table1_consistency(K, N, G, T) <= tol


@pytest.mark.parametrize("scheme", SCHEMES)
def test_monotone_in_T(scheme):
    costs = [flops(CostQuery(scheme, K=16, N=32, T=t, G=4)).flops for t in range(0, 50, 5)]
    assert costs == sorted(costs)


def test_ordering_fig5():
    order = complexity_ordering([16, 32], N=32, G=4, T=100)
    assert order[16] == ["thp", "rzf", "hl-thp", "pgp-rzf"]
    assert order[32] == ["thp", "rzf", "hl-thp", "pgp-rzf"]


def test_ordering_one_user_per_group():
    order = complexity_ordering([4], N=32, G=4, T=100)
    assert sorted(order[4]) == sorted(SCHEMES)


def test_group_must_divide():
    with pytest.raises(ParameterError):
        CostQuery("hl-thp", K=10, N=32, G=4)
    CostQuery("rzf", K=10, N=32, G=4)
