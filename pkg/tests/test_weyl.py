from math import comb, factorial

import numpy as np
import pytest

from heisenspec.errors import ExcludedIndexError, NonPositiveSpectrumError, PreconditionError
from heisenspec.levi import GeometryParams, condition_Xpq, condition_Y
from heisenspec.mehler import heat_kernel_origin
from heisenspec.weyl import (WeylRecord, alpha, alpha_terms, beta, form_record, gamma,
                             gover_graham_constant, gover_graham_factors, nu, nu_argument_scan,
                             nu_with_error, predict, predict_eigenvalue, sublaplacian_weyl)

# 30-digit mpmath quadrature of the defining integral
NU_FROZEN = {
    (1, 0.5): 0.125, (1, 0.75): 0.4267766952966368811,
    (2, 0.0): 0.0022104853207207685523, (2, 0.5): 0.0028462452576579446474,
    (2, 1.75): 0.34579535548647953671, (3, 0.0): 0.000070265040269548586369,
    (3, 0.5): 0.0000818447401111961501, (3, 2.75): 0.32871798932670644014,
    (2, 1.0): 0.006631455962162305657, (3, 2.0): 0.0013723483736028819197,
}


class TestNu:
    def test_one_sixteenth(self):
        assert abs(nu(1, 0.0) - 1 / 16) < 1e-10

    @pytest.mark.parametrize("key", sorted(NU_FROZEN))
    def test_frozen(self, key):
        assert nu(*key) == pytest.approx(NU_FROZEN[key], rel=1e-10)

    def test_n1_closed_form(self):
        # int x exp(-mu x)/sinh x = pi^2 / (2 cos^2(pi mu / 2))
        for mu in np.linspace(-0.95, 0.95, 9):
            expect = 1 / (16 * np.cos(np.pi * mu / 2) ** 2)
            assert nu(1, mu) == pytest.approx(expect, rel=1e-10)

    def test_even(self):
        for n in (1, 2, 3, 4):
            for mu in np.linspace(0, n - 0.05, 7):
                assert abs(nu(n, mu) - nu(n, -mu)) <= 1e-12 * nu(n, mu)

    def test_heat_kernel_identity(self):
        for n, mu in [(1, 0.2), (2, -1.5), (3, 2.0)]:
            assert nu(n, mu) == pytest.approx(heat_kernel_origin(n, mu) / factorial(n + 1), rel=1e-8)

    def test_error_estimate(self):
        assert nu_with_error(2, 1.9)[1] < 1e-10

    @pytest.mark.parametrize("n,mu", [(1, 1.0), (2, -2.0), (1, 3.0)])
    def test_domain(self, n, mu):
        with pytest.raises(PreconditionError):
            nu(n, mu)


class TestFormConstants:
    def test_alpha_examples(self):
        assert alpha(2, 0, 0, 1) == pytest.approx(nu(2, 0), rel=1e-14)
        with pytest.raises(PreconditionError):
            alpha(3, 1, 0, 1)

    def test_alpha_kappa0_collapse(self):
        for n in range(1, 6):
            for p in range(n + 1):
                for q in range(1, n):
                    expect = 0.5 * comb(n, p) * comb(n, q) * nu(n, n - 2 * q)
                    assert abs(alpha(n, 0, p, q) - expect) <= 1e-12 * expect

    def test_alpha_intro_form(self):
        # n + 2q - 2 kappa - 4k = n - 2(kappa - q + 2k)
        for n in range(1, 6):
            for kappa in range(n + 1):
                for q in range(n + 1):
                    for _, arg in alpha_terms(n, kappa, 0, q):
                        k = (n + 2 * q - 2 * kappa - arg) // 4
                        assert arg == n - 2 * (kappa - q + 2 * k)

    def test_beta_symmetry(self):
        for n in range(1, 5):
            for kappa in range(n + 1):
                g = GeometryParams(n, kappa)
                for p in range(n + 1):
                    for q in range(n + 1):
                        if condition_Xpq(g, p, q):
                            a, b = beta(n, kappa, p, q), beta(n, kappa, q, p)
                            assert abs(a - b) <= 1e-12 * a

    def test_beta_examples(self):
        assert beta(1, 0, 0, 0) == pytest.approx(1 / 8, rel=1e-10)
        for n in range(1, 5):
            for p in range(n + 1):
                for q in range(n + 1):
                    if (p, q) in ((0, n), (n, 0)):
                        continue
                    expect = 2 ** n * comb(n, p) * comb(n, q) * nu(n, p - q)
                    assert abs(beta(n, 0, p, q) - expect) <= 1e-12 * expect

    def test_gamma_is_sum_of_beta(self):
        for n in range(1, 5):
            for k in range(2 * n + 1):
                if k != n:
                    s = sum(beta(n, 0, p, k - p) for p in range(max(0, k - n), min(k, n) + 1))
                    assert abs(gamma(n, k) - s) <= 1e-12 * s

    def test_gamma_palindrome_and_exclusion(self):
        assert gamma(1, 0) == pytest.approx(1 / 8, rel=1e-10)
        for n in range(1, 6):
            for k in range(2 * n + 1):
                if k != n:
                    assert abs(gamma(n, k) - gamma(n, 2 * n - k)) <= 1e-12 * gamma(n, k)
            with pytest.raises(ExcludedIndexError):
                gamma(n, n)

    def test_domain_scan(self):
        scan = nu_argument_scan(6)
        assert scan and all(-p[0] < a < p[0] for _, p, a in scan)

    def test_positive(self):
        for n in range(1, 6):
            for kappa in range(n + 1):
                g = GeometryParams(n, kappa)
                for p in range(n + 1):
                    for q in range(n + 1):
                        if condition_Y(g, q):
                            assert alpha(n, kappa, p, q) > 0
                        if condition_Xpq(g, p, q):
                            assert beta(n, kappa, p, q) > 0

    def test_minus_n_branch(self):
        assert gamma(2, 0, "minus_n") == pytest.approx(gamma(2, 0) / 16, rel=1e-14)
        assert alpha(2, 0, 0, 1, "minus_n") == pytest.approx(4 * alpha(2, 0, 0, 1), rel=1e-14)
        rec = form_record("beta", {"n": 2, "kappa": 1, "p": 0, "q": 0})
        assert rec.alternatives["plus_n"] == pytest.approx(16 * rec.alternatives["minus_n"])


class TestSublaplacianWeyl:
    def test_haar_n1(self):
        rec = sublaplacian_weyl(1, 0.0, 1, 1.0, "haar")
        assert rec.constant == pytest.approx(1 / 16, rel=1e-10) and rec.exponent == 2

    def test_both_candidates(self):
        rec = sublaplacian_weyl(2, 0.5, 3, 2.0)
        base = nu(2, 0.5) * 3 * 2.0
        assert rec.alternatives == pytest.approx({"plus_n": 4 * base, "minus_n": base / 4})
        assert rec.constant == rec.alternatives["minus_n"]
        assert "prefactor: minus_n" in rec.provenance

    def test_rank_linear(self):
        a = sublaplacian_weyl(2, 0.5, 1).constant
        assert sublaplacian_weyl(2, 0.5, 4).constant == pytest.approx(4 * a, rel=1e-14)

    def test_blows_up_near_edge(self):
        vals = [sublaplacian_weyl(1, mu).constant for mu in (0.9, 0.99, 0.999)]
        assert vals[0] < vals[1] < vals[2] and vals[2] > 1e4 * vals[0] / 100

    def test_domain(self):
        with pytest.raises(PreconditionError):
            sublaplacian_weyl(1, 1.0)


class TestGoverGraham:
    @pytest.mark.parametrize("n", [1, 2])
    def test_k1_consistency(self, n):
        rec = gover_graham_constant(n, 1)
        target = sublaplacian_weyl(n, 0.0, 1, 1.0).constant
        assert rec.constant == pytest.approx(target, rel=1e-6)
        assert rec.exponent == n + 1
        # a Gamma argument of 1 + (2n+2)/k would not reduce to the sublaplacian constant
        assert abs(rec.alternatives["plus_n_gamma_2n+2"] / sublaplacian_weyl(n, 0.0, 1, 1.0, prefactor="plus_n").constant - 1) > 0.5

    def test_factors(self):
        assert gover_graham_factors(4, 3) == (2.0, 0.0, -2.0)
        for n in range(1, 6):
            for k in range(1, n + 1):
                assert all(abs(m) < n for m in gover_graham_factors(n, k))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_k_equals_n_plus_one(self, n):
        with pytest.raises(PreconditionError) as exc:
            gover_graham_constant(n, n + 1)
        msg = str(exc.value)
        assert f"Delta + i{n}X_0" in msg and f"Delta - i{n}X_0" in msg

    def test_beyond_n_plus_one_not_positive(self):
        with pytest.raises(NonPositiveSpectrumError):
            gover_graham_constant(1, 3)

    def test_exponent(self):
        assert gover_graham_constant(3, 2).exponent == 2.0


class TestPredict:
    def test_round_trip(self):
        rec = WeylRecord(0.37, 2.5, "haar", ())
        for k in (1, 10, 12345):
            assert predict(rec, predict_eigenvalue(rec, k)) == pytest.approx(k, rel=1e-12)

    def test_simple(self):
        rec = WeylRecord(1 / 16, 2.0, "haar", ())
        assert predict(rec, 4.0) == 1.0
        assert predict(WeylRecord(1 / 8, 2.0, "haar", ()), 4.0) == 2 * predict(rec, 4.0)

    def test_invalid_record(self):
        with pytest.raises(ValueError):
            WeylRecord(0.0, 2.0, "haar", ())
        with pytest.raises(ValueError):
            WeylRecord(1.0, 2.0, "riemannian", ())
