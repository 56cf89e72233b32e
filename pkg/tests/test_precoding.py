import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import block_corr, crandn
from precode_lab import modem
from precode_lab.channel import CorrelationSet, sample_channel
from precode_lab.errors import FeasibilityError, SingularFactorError
from precode_lab.precoding import (
    InnerPrecoder,
    LgPolicy,
    ThpState,
    build_hlthp,
    build_inner,
    build_pgp_rzf,
    build_rzf,
    build_thp,
    feedback_filter,
    hlthp_encode,
    leakage_ratio,
    modulo_tx_scale,
    receive,
    thp_encode,
)

# mean leakage ratio over 100 realizations (seed 2016) for the N=32, G=4,
# K=16 geometry under the default L policy, recorded from an oracle run
LEAKAGE_REFERENCE = 4.313e-4


def fro(a):
    return np.linalg.norm(a, "fro")


def symbols(rng, shape, m=16):
    return modem.random_symbols(rng, shape, m)


class TestRzf:
    def test_scalar_channel(self):
        state = build_rzf(np.array([[2.0]]), 0.3, 5.0)
        np.testing.assert_allclose(state.V, [[1.0]])

    def test_scalar_phase_follows_channel(self):
        h = np.array([[2.0 * np.exp(0.7j)]])
        state = build_rzf(h, 0.1, 1.0)
        np.testing.assert_allclose(state.V, [[np.exp(0.7j)]])

    def test_zero_channel_is_flagged(self):
        state = build_rzf(np.zeros((4, 2)), 1.0, 2.0)
        assert state.degenerate
        assert np.all(state.V == 0)

    def test_power_constraint(self, rng):
        for _ in range(20):
            state = build_rzf(crandn(rng, 8, 4), 0.2, 40.0)
            assert np.trace(state.V @ state.V.conj().T).real == pytest.approx(4, rel=1e-8)

    def test_noiseless_well_conditioned_recovers(self, rng):
        H = crandn(rng, 32, 4)
        state = build_rzf(H, 1e-6, 40.0)
        d = symbols(rng, (4, 200))
        assert np.array_equal(receive(state, H.conj().T @ state.encode(d)), d)


class TestInner:
    def test_single_group_uses_dominant_eigenvectors(self):
        corr = CorrelationSet.one_ring(16, 1, np.deg2rad(10))
        inner = build_inner(corr, 3)
        assert inner.E0[0].shape == (16, 16)
        dominant = corr.eigs[0].dominant(3)
        # equal subspaces: compare projectors
        p1 = inner.W[0] @ inner.W[0].conj().T
        p2 = dominant @ dominant.conj().T
        assert fro(p1 - p2) <= 1e-9

    def test_disjoint_blocks_are_exactly_separated(self, rng):
        corr = block_corr(16, 2, 3, rng)
        inner = build_inner(corr, 2, LgPolicy(fixed=3))
        H = sample_channel(corr, 2, rng).H
        assert np.max(np.abs(H[:, 2:].conj().T @ inner.W[0])) <= 1e-9
        assert np.max(np.abs(H[:, :2].conj().T @ inner.W[1])) <= 1e-9

    def test_orthonormal_for_four_ring_groups(self, ring_corr):
        inner = build_inner(ring_corr, 4)
        for w in inner.W:
            assert fro(w.conj().T @ w - np.eye(4)) <= 1e-9
        assert inner.L == (7, 7, 7, 7)

    def test_infeasible_allocation_names_group(self, ring_corr):
        with pytest.raises(FeasibilityError) as info:
            build_inner(ring_corr, 4, LgPolicy(per_group=(9, 9, 10, 10)))
        assert info.value.group == 1

    def test_auto_policy_stays_feasible(self, ring_corr):
        inner = build_inner(ring_corr, 8)
        assert 32 - 3 * inner.L[0] >= 8

    def test_block_diagonalization_quality(self, ring_corr):
        inner = build_inner(ring_corr, 4)
        rng = np.random.default_rng(2016)
        ratios = [leakage_ratio(inner, sample_channel(ring_corr, 4, rng).H) for _ in range(100)]
        mean = float(np.mean(ratios))
        assert mean == pytest.approx(LEAKAGE_REFERENCE, rel=0.2)


class TestPgpRzf:
    def test_power_per_group(self, ring_corr, rng):
        inner = build_inner(ring_corr, 4)
        for _ in range(10):
            H = sample_channel(ring_corr, 4, rng).H
            state = build_pgp_rzf(inner, H, 0.25, 160.0)
            for g in range(4):
                v = state.V[:, 4 * g : 4 * g + 4]
                assert np.trace(v @ v.conj().T).real == pytest.approx(4, rel=1e-8)

    def test_single_group_equals_rzf_on_rotated_channel(self, rng):
        corr = CorrelationSet.one_ring(12, 1, np.deg2rad(30))
        inner = build_inner(corr, 4)
        H = sample_channel(corr, 4, rng).H
        pgp = build_pgp_rzf(inner, H, 0.3, 40.0)
        rot = build_rzf(inner.W[0].conj().T @ H, 0.3, 40.0)
        d = symbols(rng, (4,))
        assert np.max(np.abs(pgp.encode(d) - inner.W[0] @ rot.encode(d))) <= 1e-9

    def test_zero_effective_channel_flagged(self, rng):
        corr = block_corr(8, 2, 2, rng)
        inner = build_inner(corr, 2, LgPolicy(fixed=2))
        H = sample_channel(corr, 2, rng).H
        H[:, :2] = 0
        state = build_pgp_rzf(inner, H, 0.1, 1.0)
        assert state.degenerate
        assert np.all(state.V[:, :2] == 0)


class TestThp:
    def test_identity_channel(self):
        st_ = build_thp(np.eye(3))
        np.testing.assert_allclose(st_.F, np.eye(3))
        np.testing.assert_allclose(st_.B, np.eye(3))
        np.testing.assert_allclose(st_.Xi, np.ones(3))

    def test_scaled_identity(self):
        st_ = build_thp(2 * np.eye(3))
        np.testing.assert_allclose(st_.B, np.eye(3))
        np.testing.assert_allclose(st_.Xi, 0.5)

    def test_reconstruction(self, rng):
        H = crandn(rng, 8, 4)
        st_ = build_thp(H)
        recon = st_.F @ st_.B.conj().T @ np.diag(1 / st_.Xi)
        assert fro(recon - H) <= 1e-9 * fro(H)
        assert np.allclose(np.triu(st_.B, 1), 0)
        assert np.all(np.diag(st_.B) == 1)
        assert fro(st_.F.conj().T @ st_.F - np.eye(4)) <= 1e-9

    def test_rank_deficient(self, rng):
        H = crandn(rng, 6, 3)
        H[:, 1] = 0
        with pytest.raises(SingularFactorError):
            build_thp(H)

    def test_no_feedback_passthrough(self, rng):
        F = np.linalg.qr(crandn(rng, 5, 3))[0]
        state = ThpState(F=F, B=np.eye(3), Xi=np.ones(3), tx_scale=0.9)
        d = symbols(rng, (3,))
        np.testing.assert_allclose(thp_encode(state, d), 0.9 * F @ d)

    def test_feedback_examples(self):
        B = np.array([[1, 0], [0.5, 1]], dtype=complex)
        x = feedback_filter(B, np.array([1 + 1j, 3 + 3j]), 16)
        np.testing.assert_allclose(x, [1 + 1j, 2.5 + 2.5j])
        B = np.array([[1, 0], [2, 1]], dtype=complex)
        x = feedback_filter(B, np.array([3, 3], dtype=complex), 16)
        assert x[1] == -3

    def test_tx_scale_restores_symbol_power(self):
        rng = np.random.default_rng(0)
        x = modem.mod_reduce(50 * crandn(rng, 200_000), 16)
        power = modulo_tx_scale(16) ** 2 * np.mean(np.abs(x) ** 2)
        assert power == pytest.approx(10.0, rel=0.01)

    def test_noiseless_perfect_cancellation(self):
        rng = np.random.default_rng(4)
        errors = 0
        for _ in range(100):
            H = crandn(rng, 8, 4)
            state = build_thp(H)
            d = symbols(rng, (4, 50))
            errors += np.count_nonzero(receive(state, H.conj().T @ state.encode(d)) != d)
        assert errors == 0

    def test_zero_received_gives_tie_symbol(self):
        state = build_thp(np.eye(2))
        np.testing.assert_array_equal(receive(state, np.zeros(2)), [-1 - 1j, -1 - 1j])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.integers(2, 6), pos=st.integers(0, 5))
def test_feedback_is_causal(seed, k, pos):
    pos = pos % k
    rng = np.random.default_rng(seed)
    B = np.tril(crandn(rng, k, k), -1) + np.eye(k)
    d = symbols(rng, (k,))
    x = feedback_filter(B, d, 16)
    d2 = d.copy()
    d2[pos] = -d2[pos] + 2j
    x2 = feedback_filter(B, d2, 16)
    np.testing.assert_array_equal(x[:pos], x2[:pos])


class TestHlthp:
    def test_unit_inner_equals_thp(self, rng):
        H = crandn(rng, 4, 4)
        inner = InnerPrecoder.from_blocks([np.eye(4)])
        hl = build_hlthp(inner, H)
        thp = build_thp(H)
        np.testing.assert_allclose(hl.F[0], thp.F, atol=1e-12)
        np.testing.assert_allclose(hl.B[0], thp.B, atol=1e-12)
        np.testing.assert_allclose(hl.Xi, thp.Xi, atol=1e-12)
        d = symbols(rng, (4, 5))
        np.testing.assert_allclose(hl.encode(d), thp.encode(d), atol=1e-12)

    def test_single_group_equals_thp_on_effective_channel(self, rng):
        corr = CorrelationSet.one_ring(12, 1, np.deg2rad(30))
        inner = build_inner(corr, 4)
        H = sample_channel(corr, 4, rng).H
        hl = build_hlthp(inner, H)
        thp = build_thp(inner.W[0].conj().T @ H)
        d = symbols(rng, (4, 3))
        assert np.max(np.abs(hl.encode(d) - inner.W[0] @ thp.encode(d))) <= 1e-9

    def test_factorization_per_group(self, ring_corr, rng):
        inner = build_inner(ring_corr, 4)
        H = sample_channel(ring_corr, 4, rng).H
        hl = build_hlthp(inner, H)
        for g in range(4):
            F, B, xi = hl.F[g], hl.B[g], hl.Xi[4 * g : 4 * g + 4]
            assert fro(F.conj().T @ F - np.eye(4)) <= 1e-9
            assert np.all(np.diag(B) == 1)
            eff = inner.W[g].conj().T @ H[:, 4 * g : 4 * g + 4]
            recon = F @ B.conj().T @ np.diag(1 / xi)
            assert fro(recon - eff) <= 1e-9 * fro(eff)

    def test_no_feedback_sum(self, rng):
        corr = block_corr(8, 2, 2, rng)
        inner = build_inner(corr, 2, LgPolicy(fixed=2))
        H = sample_channel(corr, 2, rng).H
        hl = build_hlthp(inner, H)
        hl = type(hl)(**{**hl.__dict__, "B": tuple(np.eye(2) for _ in range(2))})
        d = symbols(rng, (4,))
        want = hl.tx_scale * sum(inner.W[g] @ hl.F[g] @ d[2 * g : 2 * g + 2] for g in range(2))
        np.testing.assert_allclose(hlthp_encode(hl, d), want, atol=1e-12)

    def test_transmit_norm_bounds(self, ring_corr, rng):
        inner = build_inner(ring_corr, 4)
        hl = build_hlthp(inner, sample_channel(ring_corr, 4, rng).H)
        d = symbols(rng, (16,))
        s = hl.encode(d)
        norms = [np.linalg.norm(x) for x in hl.feedback_outputs(d)]
        assert np.linalg.norm(s) <= hl.tx_scale * sum(norms) + 1e-9

    def test_transmit_norm_with_orthogonal_blocks(self, rng):
        corr = block_corr(8, 2, 2, rng)
        inner = build_inner(corr, 2, LgPolicy(fixed=2))
        hl = build_hlthp(inner, sample_channel(corr, 2, rng).H)
        d = symbols(rng, (4,))
        xs = hl.feedback_outputs(d)
        want = hl.tx_scale**2 * sum(np.vdot(x, x).real for x in xs)
        assert np.vdot(hl.encode(d), hl.encode(d)).real == pytest.approx(want, rel=1e-9)

    def test_noiseless_cancellation_on_separable_channels(self):
        rng = np.random.default_rng(11)
        errors = 0
        for trial in range(20):
            corr = block_corr(16, 4, 3, rng)
            inner = build_inner(corr, 3, LgPolicy(fixed=3))
            for _ in range(5):
                H = sample_channel(corr, 3, rng).H
                hl = build_hlthp(inner, H)
                d = symbols(rng, (12, 40))
                errors += np.count_nonzero(receive(hl, H.conj().T @ hl.encode(d)) != d)
        assert errors == 0

    def test_singular_group_reported(self, rng):
        corr = block_corr(8, 2, 2, rng)
        inner = build_inner(corr, 2, LgPolicy(fixed=2))
        H = sample_channel(corr, 2, rng).H
        H[:, 3] = H[:, 2]
        with pytest.raises(SingularFactorError) as info:
            build_hlthp(inner, H)
        assert info.value.group == 2
