from itertools import product

import numpy as np
import pytest
from scipy.stats import ortho_group

from heisenspec.errors import PreconditionError
from heisenspec.levi import (GeometryParams, LeviForm, condition_X, condition_Xpq, condition_Y,
                             horizontal_mu_spectrum, kohn_mu_spectrum, membership, singular_set,
                             sublaplacian_condition, sublaplacian_report, symplectic_spectrum)


def random_levi(rng, d, n):
    lam = np.sort(rng.uniform(0.5, 3.0, n))[::-1]
    Q = ortho_group.rvs(d, random_state=rng)
    return lam, Q @ LeviForm.normal_form(lam, d).entries @ Q.T


class TestLeviForm:
    def test_symmetrises_small_noise(self):
        L = np.array([[0, 1], [-1 + 1e-14, 0]])
        assert LeviForm.from_matrix(L).entries[1, 0] == pytest.approx(-1.0)

    def test_rejects_asymmetry(self):
        with pytest.raises(ValueError):
            LeviForm.from_matrix([[0, 1], [-0.9, 0]])

    @pytest.mark.parametrize("bad", [[[0, np.nan], [np.nan, 0]], [[0, 1, 2]], []])
    def test_rejects_bad_input(self, bad):
        with pytest.raises(ValueError):
            LeviForm.from_matrix(bad)


class TestSymplecticSpectrum:
    def test_canonical_block(self):
        assert symplectic_spectrum([[0, 1], [-1, 0]]) == ((1.0,), 2)

    @pytest.mark.parametrize("d", [1, 3, 4])
    def test_zero(self, d):
        assert symplectic_spectrum(np.zeros((d, d))) == ((), 0)

    def test_orthogonal_invariance(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            d = int(rng.integers(2, 8))
            n = int(rng.integers(1, d // 2 + 1))
            lam, L = random_levi(rng, d, n)
            Q = ortho_group.rvs(d, random_state=rng)
            a, ra = symplectic_spectrum(L)
            b, rb = symplectic_spectrum(Q.T @ L @ Q)
            assert ra == rb == 2 * n
            np.testing.assert_allclose(a, b, atol=1e-10)
            np.testing.assert_allclose(a, lam, atol=1e-10)

    def test_half_trace_matches(self):
        rng = np.random.default_rng(2)
        for _ in range(1000):
            d = int(rng.integers(1, 7))
            A = rng.standard_normal((d, d))
            L = A - A.T
            lam, _ = symplectic_spectrum(L)
            S = singular_set(L)
            assert abs(S.half_trace - sum(lam)) <= 1e-12 * max(1, sum(lam))
            # half the trace of |L| = sqrt(-L^2)
            w = np.linalg.eigvalsh(-L @ L)
            w = np.where(w > 1e-12 * max(1.0, w.max()), w, 0.0)
            assert S.half_trace == pytest.approx(0.5 * np.sum(np.sqrt(w)), abs=1e-9)


class TestSingularSet:
    def test_half_lines(self):
        S = singular_set(LeviForm.normal_form([2], 3))
        assert S.variant == "half_lines"
        assert not membership(S, 1) and membership(S, 2) and membership(S, -7.5)

    def test_ladder(self):
        S = singular_set(LeviForm.normal_form([1, 2], 4))
        assert S.variant == "ladder"
        assert [membership(S, z) for z in (3, 4, 5, 7, -9, 2)] == [True, False, True, True, True, False]

    @pytest.mark.parametrize("L", [LeviForm.normal_form([1, 2], 4), LeviForm.normal_form([2], 3)])
    def test_complex_never_member(self, L):
        assert not membership(singular_set(L), 3 + 0.5j)

    def test_ladder_generic(self):
        S = singular_set(LeviForm.normal_form([1.0, np.sqrt(2)], 4))
        c = 1 + np.sqrt(2)
        assert membership(S, c + 2 * (2 + 3 * np.sqrt(2)))
        assert not membership(S, c + 1)

    def test_tolerance(self):
        S = singular_set(LeviForm.normal_form([1, 2], 4))
        assert membership(S, 5 + 5e-10)
        assert not membership(S, 5 + 1e-6)


class TestSublaplacianCondition:
    def test_examples(self):
        assert sublaplacian_condition(LeviForm.normal_form([2], 3), [[0]])
        assert not sublaplacian_condition(LeviForm.normal_form([1, 2], 4), np.diag([1, 3]))

    def test_margin_reported(self):
        rep = sublaplacian_report(LeviForm.normal_form([2], 3), [[1.5]])
        assert rep.holds and rep.margin == pytest.approx(0.5)
        rep = sublaplacian_report(LeviForm.normal_form([1, 2], 4), [[4.0]])
        assert rep.holds and rep.margin == pytest.approx(1.0)

    def test_complex_spectrum_flagged(self):
        rep = sublaplacian_report(LeviForm.normal_form([1], 2), [[0, -1], [1, 0]])
        assert rep.holds and rep.complex_spectrum

    def test_non_diagonalisable(self):
        # Jordan block with eigenvalue 3 sits on the ladder
        assert not sublaplacian_condition(LeviForm.normal_form([1, 2], 4), [[3, 1], [0, 3]])

    def test_brute_force_and_transpose(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            d = int(rng.integers(2, 6))
            n = int(rng.integers(1, d // 2 + 1))
            lam = rng.integers(1, 4, n).astype(float)
            L = LeviForm.normal_form(lam, d)
            r = int(rng.integers(1, 4))
            Q = ortho_group.rvs(r, random_state=rng) if r > 1 else np.eye(1)
            ev = rng.integers(-8, 9, r).astype(float)
            mu = Q @ np.diag(ev) @ Q.T
            S = singular_set(L)
            expect = not any(membership(S, e) for e in ev)
            assert sublaplacian_condition(L, mu) == expect
            assert sublaplacian_condition(L, mu.T) == expect

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            sublaplacian_condition(LeviForm.normal_form([1], 2), np.ones((2, 3)))


class TestConditions:
    def test_Y_example(self):
        g = GeometryParams(3, 1, 3)
        assert [condition_Y(g, q) for q in range(4)] == [True, False, False, True]

    @pytest.mark.parametrize("n", range(1, 6))
    def test_Y_nondegenerate_kappa0(self, n):
        g = GeometryParams(n, 0, n)
        assert [q for q in range(n + 1) if not condition_Y(g, q)] == [0, n]

    @pytest.mark.parametrize("n", range(0, 5))
    def test_Y_rank_zero(self, n):
        g = GeometryParams(n, 0, 0)
        assert not any(condition_Y(g, q) for q in range(n + 1))

    def test_Y_range(self):
        with pytest.raises(PreconditionError):
            condition_Y(GeometryParams(2), 3)

    @pytest.mark.parametrize("n", range(1, 5))
    def test_X_contact(self, n):
        assert [k for k in range(2 * n + 1) if not condition_X(2 * n, n, k)] == [n]

    def test_X_small(self):
        assert not any(condition_X(4, 0, k) for k in range(5))
        assert [condition_X(5, 1, k) for k in range(6)] == [True, False, False, False, False, True]
        with pytest.raises(PreconditionError):
            condition_X(3, 2, 1)

    @pytest.mark.parametrize("n,kappa", [(n, k) for n in range(1, 5) for k in range(n + 1)])
    def test_Xpq_nondegenerate(self, n, kappa):
        g = GeometryParams(n, kappa, n)
        bad = {(p, q) for p in range(n + 1) for q in range(n + 1) if not condition_Xpq(g, p, q)}
        assert bad == {(kappa, n - kappa), (n - kappa, kappa)}

    def test_Xpq_degenerate_example(self):
        g = GeometryParams(2, 0, 1)
        bad = {(p, q) for p in range(3) for q in range(3) if not condition_Xpq(g, p, q)}
        forbidden = {(0, 1), (0, 2), (1, 1), (1, 2)}
        assert bad == forbidden | {(q, p) for p, q in forbidden}
        assert not condition_Xpq(g, 2, 0)

    def test_Xpq_symmetric(self):
        for n in range(1, 5):
            for kappa, r in product(range(n + 1), range(n + 1)):
                if kappa > r:
                    continue
                g = GeometryParams(n, kappa, r)
                for p, q in product(range(n + 1), repeat=2):
                    assert condition_Xpq(g, p, q) == condition_Xpq(g, q, p)

    def test_geometry_validation(self):
        with pytest.raises(ValueError):
            GeometryParams(2, 3)
        assert GeometryParams(3, 1).epsilons == (1, 1, -1)


class TestHorizontalSpectrum:
    def test_example(self):
        vals = horizontal_mu_spectrum([1, 2], 4, 1)
        assert sorted(set(vals)) == [-2, -1, 1, 2]

    def test_degree_zero(self):
        np.testing.assert_array_equal(horizontal_mu_spectrum([1, 2], 5, 0), [0.0])

    def test_total_count_is_form_dimension(self):
        from math import comb

        for d, n, k in [(5, 2, 2), (6, 1, 3), (4, 2, 4), (7, 3, 3)]:
            vals = horizontal_mu_spectrum(list(range(1, n + 1)), d, k)
            assert vals.size == comb(d, k)

    def test_bounds_and_extremes(self):
        lam = [1.0, 2.0, 4.0]
        for d in range(6, 9):
            for k in range(d + 1):
                v = horizontal_mu_spectrum(lam, d, k)
                assert np.all(np.abs(v) <= 7 + 1e-12)
                assert (np.max(np.abs(v)) == 7) == (3 <= k <= d - 3)


class TestKohnSpectrum:
    def test_examples(self):
        np.testing.assert_array_equal(kohn_mu_spectrum(GeometryParams(2, 0), 1).values, [0, 0])
        ks = kohn_mu_spectrum(GeometryParams(3, 1), 1)
        assert [(v, m) for _, v, m in ks.reduced] == [(3, 1), (-1, 2)]

    def test_reduced_form_is_negated_direct(self):
        for n in range(1, 6):
            for kappa in range(n + 1):
                for q in range(n + 1):
                    ks = kohn_mu_spectrum(GeometryParams(n, kappa), q)
                    expanded = sorted(-v for _, v, m in ks.reduced for _ in range(m))
                    assert expanded == sorted(ks.values)

    def test_bounds(self):
        for n in range(1, 6):
            for kappa in range(n + 1):
                g = GeometryParams(n, kappa)
                for q in range(n + 1):
                    v = kohn_mu_spectrum(g, q).values
                    assert np.all(np.abs(v) <= n)
                    assert (np.max(np.abs(v)) == n) == (q in (kappa, n - kappa))

    def test_needs_full_rank(self):
        with pytest.raises(PreconditionError):
            kohn_mu_spectrum(GeometryParams(2, 0, 1), 1)
