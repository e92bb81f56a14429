from math import pi

import numpy as np
import pytest

from heisenspec.errors import NonPositiveSpectrumError, PreconditionError
from heisenspec.levi import LeviForm, sublaplacian_condition
from heisenspec.mehler import heat_kernel_origin
from heisenspec.plancherel import (ModelOperatorSpec, heat_value_at_origin, plancherel_constant,
                                   rep_eigenvalues, rockland_scan)


class TestRepEigenvalues:
    def test_multiplicities(self):
        assert [m for _, m in rep_eigenvalues(2, 0.0, 1.0, 5)] == [1, 2, 3, 4, 5, 6]
        assert [m for _, m in rep_eigenvalues(3, 0.0, 1.0, 3)] == [1, 3, 6, 10]

    def test_sign_flip(self):
        a = rep_eigenvalues(2, 0.7, -1.3, 6)
        b = rep_eigenvalues(2, -0.7, 1.3, 6)
        assert a == b

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_singular_set_is_ladder(self, n):
        # some e_m vanishes exactly when mu lies on +-(n + 2N)
        for mu in np.arange(-3 * n - 4, 3 * n + 5, 0.5):
            vals = [e for lam in (1.0, -1.0) for e, _ in rep_eigenvalues(n, mu, lam, 20)]
            on_ladder = abs(mu) >= n and (abs(mu) - n) % 2 == 0
            assert (min(abs(v) for v in vals) == 0) == on_ladder

    def test_examples(self):
        assert min(e for lam in (1, -1) for e, _ in rep_eigenvalues(1, 1.0, lam, 3)) == 0
        assert min(e for lam in (1, -1) for e, _ in rep_eigenvalues(1, 0.5, lam, 3)) == pytest.approx(0.5)

    def test_positive_at_mu_zero(self):
        assert all(e > 0 for e, _ in rep_eigenvalues(3, 0.0, 0.01, 50))

    def test_zero_parameter(self):
        with pytest.raises(PreconditionError):
            rep_eigenvalues(1, 0.0, 0.0, 3)


class TestHeatValue:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_constant_is_pi_power(self, n):
        assert plancherel_constant(n) == pytest.approx(pi ** -(n + 1), rel=1e-12)

    def test_single_factor_n1(self):
        assert heat_value_at_origin(ModelOperatorSpec(1, (0.0,))).value == pytest.approx(1 / 8, rel=1e-6)

    @pytest.mark.parametrize("n,mu", [(1, 0.5), (2, -1.2), (3, 2.5), (2, 0.3 + 0.4j)])
    def test_matches_mehler(self, n, mu):
        a = heat_value_at_origin(ModelOperatorSpec(n, (mu,))).value
        b = heat_kernel_origin(n, mu)
        assert abs(a - b) <= 1e-10 * abs(b)

    def test_numeric_level_integrals(self):
        for spec in (ModelOperatorSpec(2, (0.7,)), ModelOperatorSpec(1, (0.0, 0.0))):
            a = heat_value_at_origin(spec, numeric=True).value
            b = heat_value_at_origin(spec).value
            assert a == pytest.approx(b, rel=1e-12)

    def test_scaling(self):
        rng = np.random.default_rng(0)
        for factors in [(0.5,), (1.0, -1.0), (2.0, 0.0, -2.0)]:
            spec = ModelOperatorSpec(3, factors)
            k = len(factors)
            base = heat_value_at_origin(spec, 1.0).value
            for s in rng.uniform(0.2, 5.0, 3):
                v = heat_value_at_origin(spec, s).value
                assert v == pytest.approx(s ** (-(3 + 1) / k) * base, rel=1e-10)

    def test_two_factor_symmetric(self):
        a = heat_value_at_origin(ModelOperatorSpec(2, (1.0, -1.0))).value
        b = heat_value_at_origin(ModelOperatorSpec(2, (-1.0, 1.0))).value
        assert a > 0 and a == b

    def test_truncation_within_estimate(self):
        spec = ModelOperatorSpec(2, (1.0, -1.0))
        a = heat_value_at_origin(spec, m_max=50)
        b = heat_value_at_origin(spec, m_max=100)
        assert abs(a.value - b.value) <= max(a.error, b.error)

    def test_non_positive_spectrum_reports_level(self):
        with pytest.raises(NonPositiveSpectrumError) as exc:
            heat_value_at_origin(ModelOperatorSpec(1, (1.5,)))
        assert exc.value.witness == {"m": 0, "sign": -1, "product": "(-0.5+0j)"}


class TestRockland:
    def test_examples(self):
        assert not rockland_scan(np.zeros((2, 2)), [[0.0]]).holds
        assert rockland_scan([[0, -2], [2, 0]], [[0.0]]).holds
        r = rockland_scan(LeviForm.normal_form([1, 2], 4), np.diag([0.5, -5.0]))
        # lam is sorted descending (2, 1): 1*(2*1+1) + 2*(2*0+1) = 5
        assert not r.holds and r.witness["alpha"] == (0, 1) and r.witness["sign"] == 1

    def test_agrees_with_levi_core(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            d = int(rng.integers(1, 7))
            n = int(rng.integers(0, d // 2 + 1))
            lam = rng.integers(1, 4, n).astype(float)
            L = LeviForm.normal_form(lam, d) if n else LeviForm.from_matrix(np.zeros((d, d)))
            r = int(rng.integers(1, 4))
            ev = rng.integers(-10, 11, r) * 0.5
            mu = np.diag(ev) + np.triu(rng.standard_normal((r, r)), 1)
            assert rockland_scan(L, mu).holds == sublaplacian_condition(L, mu)

    def test_monotone_in_mu(self):
        for L in (LeviForm.normal_form([1.0], 3), LeviForm.normal_form([2.0, 1.0], 5)):
            seen_false = False
            for mu in np.linspace(0, 6, 121):
                ok = rockland_scan(L, [[mu]]).holds
                assert not (seen_false and ok)
                seen_false |= not ok
