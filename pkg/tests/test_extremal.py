from fractions import Fraction

import mpmath
import numpy as np
import pytest

from qdist.extremal import (
    ExtremalParams,
    corroborate_substate,
    part4_family,
    part4_gap_report,
    part4_truncation_witness,
    truncation_cut,
    truncation_r_grid,
)
from qdist.linalg import ValidationError
from qdist.measures import divergence_classical_bruteforce
from qdist.substate import substate_k_classical, verify_part6

SWEEP = [(a, k, n) for a in (2, 4, 16, 64) for k in (0.5, 1, 2) for n in (4, 6, 8)]


def exact_S(a, k, n):
    """Closed form with high-precision q_1: p_1 log2(p_1/q_1) + sum_i p_i k a^(i-1)."""
    mpmath.mp.dps = 60
    a, k = mpmath.mpf(a), mpmath.mpf(k)
    p = [(a - 1) / a] + [(a - 1) / a**i for i in range(2, n)] + [1 / a ** (n - 1)]
    q_tail = sum(p[i - 1] * mpmath.power(2, -k * a ** (i - 1)) for i in range(2, n + 1))
    q1 = 1 - q_tail
    S = p[0] * mpmath.log(p[0] / q1, 2) + sum(p[i - 1] * k * a ** (i - 1) for i in range(2, n + 1))
    return float(S)


class TestFamily:
    def test_a2_k1_n4_exact(self):
        P, Q = part4_family(ExtremalParams(2, 1, 4))
        assert [Fraction(x) for x in P.p] == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 8)]
        # q_2 = (1/4)/2^2, q_3 = (1/8)/2^4, q_4 = (1/8)/2^8, q_1 = 1 - rest
        assert [Fraction(x) for x in Q.p] == [
            Fraction(1903, 2048), Fraction(1, 16), Fraction(1, 128), Fraction(1, 2048)
        ]

    @pytest.mark.parametrize("a,k,n", SWEEP)
    def test_p_sums_to_one(self, a, k, n):
        P, Q = part4_family(ExtremalParams(a, k, n))
        assert abs(P.p.sum() - 1) < 1e-12
        assert abs(Q.p.sum() - 1) < 1e-12

    def test_a64_n8_feasible_and_positive(self):
        P, Q = part4_family(ExtremalParams(64, 1, 8))
        assert np.all(np.isfinite(Q.log2p))
        # the last mass is 2**-(64**7 + 42): positive, but only in log domain
        assert Q.log2p[-1] == pytest.approx(-(64**7) - 42)

    @pytest.mark.parametrize("a,k,n", [(1.01, 0.01, 8), (1.5, 0.001, 12), (2, 1e-6, 20)])
    def test_q1_dominates_p1(self, a, k, n):
        # q_i <= p_i for i >= 2 forces q_1 >= p_1, so every valid triple is feasible
        P, Q = part4_family(ExtremalParams(a, k, n))
        assert Q.p[0] >= P.p[0] - 1e-15

    @pytest.mark.parametrize("a,k,n", [(1.0, 1, 4), (2, 0, 4), (2, 1, 2)])
    def test_invalid_params(self, a, k, n):
        with pytest.raises(ValidationError):
            ExtremalParams(a, k, n)


class TestGapReport:
    def test_a2_k1_n4(self):
        rep = part4_gap_report(ExtremalParams(2, 1, 4))
        assert rep.finite_a_bound == 1.0
        assert rep.S > 1.0
        assert rep.S == pytest.approx(exact_S(2, 1, 4), abs=1e-12)

    def test_a2_k1_n4_divergence_bruteforce(self):
        P, Q = part4_family(ExtremalParams(2, 1, 4))
        rep = part4_gap_report(ExtremalParams(2, 1, 4))
        assert rep.D == pytest.approx(divergence_classical_bruteforce(P, Q, 2000), abs=1e-6)

    def test_a64_k1_n8(self):
        rep = part4_gap_report(ExtremalParams(64, 1, 8))
        assert rep.large_a_bound == 5.0
        assert rep.S > 5.0
        assert rep.S == pytest.approx(exact_S(64, 1, 8), abs=1e-9)
        assert rep.s_exceeds_tightness_rhs and rep.d_within_converse

    @pytest.mark.parametrize("a,k,n", SWEEP)
    def test_sweep(self, a, k, n):
        rep = part4_gap_report(ExtremalParams(a, k, n))
        assert rep.s_exceeds_finite_a_bound
        assert rep.s_exceeds_tightness_rhs
        assert rep.d_within_converse
        assert rep.s_within_part2

    def test_ratio_increases_with_a(self):
        for k in (0.5, 1, 2):
            for n in (4, 6, 8):
                ratios = [part4_gap_report(ExtremalParams(a, k, n)).ratio for a in (2, 4, 16, 64)]
                assert ratios == sorted(ratios)


class TestTruncation:
    def test_no_truncation_for_large_r(self):
        params = ExtremalParams(2, 1, 4)
        t = part4_truncation_witness(params, 2.0**3)
        assert t.cut == 4
        assert t.distance == 0.0

    def test_a2_k1_n4_r4(self):
        t = part4_truncation_witness(ExtremalParams(2, 1, 4), 4.0)
        assert t.cut == 3
        np.testing.assert_allclose(t.P_tilde.p, np.array([4, 2, 1, 0]) / 7, atol=1e-15)
        assert t.distance == pytest.approx(0.25, abs=1e-15)
        assert t.certified

    def test_cut_index(self):
        params = ExtremalParams(4, 1, 6)
        assert truncation_cut(params, 1.5) == 1
        assert truncation_cut(params, 4.0) == 2
        assert truncation_cut(params, 1e9) == 6

    def test_rejects_r_at_most_one(self):
        with pytest.raises(ValidationError):
            part4_truncation_witness(ExtremalParams(2, 1, 4), 1.0)

    def test_grid_has_no_flags(self):
        params = ExtremalParams(2, 1, 4)
        grid = truncation_r_grid(params, 32)
        assert len(grid) == 32
        assert all(part4_truncation_witness(params, r).certified for r in grid)

    @pytest.mark.parametrize("a,k,n", SWEEP)
    def test_sweep_certified(self, a, k, n):
        params = ExtremalParams(a, k, n)
        assert all(part4_truncation_witness(params, r).certified for r in truncation_r_grid(params, 16))


class TestSubstateCorroboration:
    @pytest.mark.parametrize("a,k,n", SWEEP)
    def test_family_has_k_substate(self, a, k, n):
        assert corroborate_substate(ExtremalParams(a, k, n))

    @pytest.mark.parametrize("a,k,n", [(2, 1, 4), (4, 1, 6), (64, 1, 8), (16, 2, 8)])
    def test_feeds_part6(self, a, k, n):
        P, Q = part4_family(ExtremalParams(a, k, n))
        assert verify_part6(P, Q, k).passed
        ks = substate_k_classical(P, Q)
        assert ks <= k + 1e-4
        assert verify_part6(P, Q, ks).passed
