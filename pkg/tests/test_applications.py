import math
from fractions import Fraction as F

import numpy as np
import pytest

from ngtrace.applications import (
    PolynomialSpec,
    binomial_series,
    detect_entanglement,
    direct_pt_check,
    exp_series,
    gibbs_cost,
    k_alpha_distance,
    nonlinear_trace,
    pt_elementary,
    schatten_reference,
    verdicts_csv,
)
from ngtrace.exact import PowerSumSeries, Spectrum, power_sums
from ngtrace.linalg import (
    DenseHermitian,
    bell_state,
    hermitian_eigenvalues,
    partial_transpose,
    pt_moments,
    pt_moments_exact,
    random_density,
    werner_rows,
    werner_state,
)
from ngtrace.multistate import StatePair, exact_grid, run_algorithm3
from ngtrace.scenarios import random_spectrum

SIXTHS = Spectrum([F(1, 2), F(1, 3), F(1, 6)])


def eigenwise_gibbs(s, q):
    return sum(sum((p - 1) ** i * p for p in s.eigenvalues) for i in range(1, q + 1))


class TestPolynomial:
    def test_degree_and_l1(self):
        p = PolynomialSpec([1, -2, 0, F(1, 2), 0])
        assert p.degree == 3 and p.coeff_l1 == F(7, 2)
        assert p(F(2)) == 1 - 4 + 4

    def test_binomial_series(self):
        assert binomial_series(F(1, 2), 3).coeffs == (1, F(1, 2), F(-1, 8), F(1, 16))
        assert binomial_series(2, 5).coeffs == (1, 2, 1)


class TestNonlinearTrace:
    def test_purity_pure(self):
        assert nonlinear_trace(PolynomialSpec([0, 0, 1]), power_sums(Spectrum([1]), 2), 1) == 1

    def test_purity_mixed(self):
        assert nonlinear_trace(PolynomialSpec([0, 0, 1]), power_sums(Spectrum.uniform(2), 2), 2) == F(1, 2)

    def test_truncated_exp(self):
        f = exp_series(1, 8)
        got = nonlinear_trace(f, power_sums(SIXTHS, 8), 3)
        assert got == sum(f(p) for p in SIXTHS.eigenvalues)

    def test_constant_counts_dimension(self):
        f = PolynomialSpec([3, 1])
        assert nonlinear_trace(f, power_sums(SIXTHS, 1), 5) == 3 * 5 + 1

    def test_short_series(self):
        with pytest.raises(ValueError):
            nonlinear_trace(exp_series(1, 5), power_sums(SIXTHS, 3), 3)


class TestGibbs:
    def test_pure_zero(self):
        for q in (1, 4, 9):
            assert gibbs_cost(power_sums(Spectrum([1]), q + 1), q) == 0

    def test_half_half(self):
        assert gibbs_cost(power_sums(Spectrum.uniform(2), 2), 1) == F(-1, 2)

    def test_sixths(self):
        assert gibbs_cost(power_sums(SIXTHS, 4), 3) == eigenwise_gibbs(SIXTHS, 3)

    def test_short_series(self):
        with pytest.raises(ValueError):
            gibbs_cost(power_sums(SIXTHS, 3), 3)


class TestKAlpha:
    def identity_pair(self, s):
        return StatePair(s, s, [[F(int(i == j)) for j in range(s.rank)] for i in range(s.rank)])

    def test_alpha_one(self):
        pair = self.identity_pair(SIXTHS)
        grid = exact_grid(pair, 2, 2)
        assert k_alpha_distance(grid, PolynomialSpec([1, 1]), PolynomialSpec([1])) == pair.dim + 1

    def test_same_state_half(self):
        pair = self.identity_pair(SIXTHS)
        a = b = binomial_series(F(1, 2), 6)
        grid = run_algorithm3(pair, 6, 6, t=3)
        got = k_alpha_distance(grid, a, b)
        assert got == sum(a(p) * b(p) for p in SIXTHS.eigenvalues)
        # (1+p)^(1/2) squared is 1+p; the gap is the truncation remainder
        assert abs(float(got) - 4) < 1e-3

    def test_symmetric_for_mixed_pair(self):
        s = Spectrum.uniform(2)
        pair = self.identity_pair(s)
        a, b = binomial_series(F(1, 2), 8), binomial_series(F(1, 2), 8)
        g = exact_grid(pair, 8, 8)
        assert k_alpha_distance(g, a, b) == k_alpha_distance(g.transpose(), b, a)

    def test_needs_marginals(self, rng):
        from ngtrace.multistate import CrossTraceGrid

        g = CrossTraceGrid([[F(1)]])
        with pytest.raises(ValueError):
            k_alpha_distance(g, PolynomialSpec([1, 1]), PolynomialSpec([1]))


class TestEntanglement:
    def test_bell_exact(self):
        pt = pt_moments_exact(werner_rows(F(1)), 2, 2, 4)
        assert pt[:3] == [1, 1, F(1, 4)]
        v = detect_entanglement(pt, 4)
        assert v.entangled and v.index == 3 and v.esp[3] == F(-1, 4)
        assert v.esp[:3] == [1, 1, 0]

    def test_bell_float(self):
        v = detect_entanglement(pt_moments(bell_state(), 2, 2, 4), 4)
        assert v.entangled and v.index == 3
        assert direct_pt_check(hermitian_eigenvalues(partial_transpose(bell_state(), 2, 2))) == 3

    def test_product_state_inconclusive(self, rng):
        a, b = random_density(2, rng), random_density(2, rng)
        m = DenseHermitian(np.kron(a.matrix, b.matrix))
        v = detect_entanglement(pt_moments(m, 2, 2, 4), 4)
        assert not v.entangled and v.label == "inconclusive"

    def test_maximally_mixed(self):
        v = detect_entanglement(pt_moments(DenseHermitian(np.eye(4) / 4), 2, 2, 4), 4)
        assert not v.entangled

    def test_insufficient(self):
        with pytest.raises(ValueError):
            detect_entanglement([1, 1], 4)

    def test_extension_path_for_nonnegative_pt(self):
        rows = werner_rows(F(1, 5))
        full = pt_moments_exact(rows, 2, 2, 4)
        v = detect_entanglement(full[:2], 4, extend=True)
        assert not v.entangled

    @pytest.mark.parametrize("w", [F(1, 3) - F(1, 10**6), F(1, 3)])
    def test_werner_exact_separable_side(self, w):
        assert not detect_entanglement(pt_moments_exact(werner_rows(w), 2, 2, 4), 4).entangled

    def test_werner_exact_entangled_side(self):
        v = detect_entanglement(pt_moments_exact(werner_rows(F(1, 3) + F(1, 10**6)), 2, 2, 4), 4)
        assert v.entangled and v.index == 4

    def test_pt_elementary_matches_spectrum(self):
        e = pt_elementary([1.0, 1.0, 0.25, 0.25], 4)
        assert np.allclose(e, [1, 1, 0, -0.25, -1 / 16])

    def test_csv(self):
        v = detect_entanglement(pt_moments(bell_state(), 2, 2, 4), 4)
        assert verdicts_csv([("bell", v)]).splitlines() == ["state,verdict,index", "bell,entangled,3"]


class TestSchatten:
    def test_equal(self):
        assert schatten_reference(bell_state(), bell_state(), 2) == pytest.approx(0, abs=1e-12)

    def test_orthogonal(self):
        a, b = DenseHermitian(np.diag([1.0, 0.0])), DenseHermitian(np.diag([0.0, 1.0]))
        assert schatten_reference(a, b, 1) == pytest.approx(2)

    def test_half(self):
        a, b = DenseHermitian(np.diag([1.0, 0.0])), DenseHermitian(np.diag([0.5, 0.5]))
        assert schatten_reference(a, b, 2) == pytest.approx(math.sqrt(0.5))
