"""Representation-theoretic spectra of model sublaplacians and heat values at the origin.

In the Schroedinger representation with parameter ``lam != 0`` the operator
``L_mu = -1/2 sum X_j^2 - i mu X_0`` becomes a harmonic oscillator; level ``m``
(multiplicity ``binom(m+n-1, n-1)``) has eigenvalue

    e_m(lam; mu) = 2 lam^2 (m + n/2 + (mu/2) sgn lam).

A product of ``k`` such factors has heat kernel at the origin

    K(0, t) = C_n sum_m mult(m) int_R |lam|^{2n+1} exp(-t prod_j e_m(lam; mu_j)) dlam.
"""
from dataclasses import dataclass
from functools import lru_cache
from math import comb, exp, gamma, lgamma
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import NonPositiveSpectrumError, PreconditionError
from .levi import MEMBERSHIP_TOL, _as_levi, _mu_eigenvalues, symplectic_spectrum
from .quadrature import integrate_panels

DEFAULT_LEVELS = 200
TRUNCATION_TOL = 1e-14


@dataclass(frozen=True)
class ModelOperatorSpec:
    """Product ``prod_j L_{mu_j}`` of Folland-Stein sublaplacians on ``H^{2n+1}``."""

    n: int
    factors: Tuple[complex, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        f = tuple(complex(m) for m in self.factors)
        if not f:
            raise ValueError("at least one factor is required")
        object.__setattr__(self, "factors", f)

    @property
    def order(self) -> int:
        return 2 * len(self.factors)


def rep_eigenvalues(n: int, mu: complex, lam: float, m_max: int):
    """``[(e_m(lam; mu), multiplicity)]`` for ``m = 0..m_max``."""
    if lam == 0:
        raise PreconditionError("representation parameter must be nonzero", {"lam": lam})
    sgn = 1.0 if lam > 0 else -1.0
    mu = complex(mu)
    out = []
    for m in range(m_max + 1):
        e = 2.0 * lam * lam * (m + n / 2.0 + 0.5 * mu * sgn)
        out.append((e if mu.imag else e.real, comb(m + n - 1, n - 1)))
    return out


def level_products(spec: ModelOperatorSpec, m: np.ndarray, sgn: float) -> np.ndarray:
    """``prod_j (2m + n + mu_j sgn)``: the ``lam^{2k}`` coefficient of the product eigenvalue."""
    m = np.asarray(m, dtype=float)
    out = np.ones(m.shape, dtype=complex)
    for mu in spec.factors:
        out = out * (2.0 * m + spec.n + mu * sgn)
    return out


def check_positive(spec: ModelOperatorSpec, m_max: int):
    """Raise with the first ``(m, sign)`` whose product eigenvalue has non-positive real part."""
    for sgn in (1.0, -1.0):
        # each factor's real part is increasing in m, so a sign change can only
        # happen below the largest |Re mu|
        top = min(m_max, int(max(abs(f.real) for f in spec.factors)) + 2)
        P = level_products(spec, np.arange(top + 1), sgn)
        bad = np.nonzero(P.real <= 0)[0]
        if bad.size:
            m = int(bad[0])
            raise NonPositiveSpectrumError(
                f"representation eigenvalue at level m={m}, sign {int(sgn):+d} has non-positive real part"
                f" ({P[m].real:.6g}); the model operator is not positive",
                {"m": m, "sign": int(sgn), "product": str(P[m])},
            )


@dataclass(frozen=True)
class HeatValue:
    value: float
    error: float
    m_max: int


def _level_integral_closed(n, k, tP):
    # int_0^inf lam^{2n+1} exp(-tP lam^{2k}) dlam
    a = (n + 1) / k
    return gamma(a) / (2 * k) * tP ** (-a)


def _level_integral_numeric(n, k, tP, rtol=1e-13):
    # substitute lam = (tP)^{-1/(2k)} s so the peak sits at s ~ 1
    s_hi = 1.0
    while s_hi ** (2 * n + 1) * np.exp(-s_hi ** (2 * k)) > 1e-18:
        s_hi *= 1.2
    f = lambda s: s ** (2 * n + 1) * np.exp(-(s ** (2 * k)))
    val, err = integrate_panels(f, 0.0, s_hi, s_hi / 16, rtol=rtol)
    c = tP ** (-(2 * n + 2) / (2 * k))
    return val * c, err * abs(c)


@lru_cache(maxsize=None)
def plancherel_constant(n: int) -> float:
    """``C_n`` fixed by matching the ``mu = 0`` single factor against the Mehler kernel.

    The value agrees with ``pi^{-(n+1)}``; that identity is tested, not used.
    """
    from .mehler import heat_kernel_origin

    raw = _raw_sum(ModelOperatorSpec(n, (0.0,)), 1.0, DEFAULT_LEVELS, numeric=False)[0]
    return float(heat_kernel_origin(n, 0.0, 1.0) / raw.real)


def _raw_sum(spec: ModelOperatorSpec, t: float, M: int, numeric: bool):
    n, k = spec.n, len(spec.factors)
    total = 0.0 + 0.0j
    err = 0.0
    for sgn in (1.0, -1.0):
        ms = np.arange(M)
        P = level_products(spec, ms, sgn)
        mult = np.array([comb(int(m) + n - 1, n - 1) for m in ms], dtype=float)
        if numeric:
            parts = [_level_integral_numeric(n, k, t * p) for p in P.real] if not np.any(P.imag) else None
            if parts is None:
                raise NotImplementedError("numeric level integrals need real products")
            vals = np.array([v for v, _ in parts])
            err += float(np.dot(mult, [e for _, e in parts]))
        else:
            vals = np.array([_level_integral_closed(n, k, t * p) for p in P])
        total += np.dot(mult, vals)
        tail, tail_err = _euler_maclaurin_tail(spec, t, M, sgn)
        total += tail
        err += tail_err
    return total, err


def _level_term(spec, t, m, sgn):
    n, k = spec.n, len(spec.factors)
    P = complex(level_products(spec, np.array([m]), sgn)[0])
    mult = exp(lgamma(m + n) - lgamma(m + 1) - lgamma(n))  # binom(m+n-1, n-1) for real m
    return mult * _level_integral_closed(n, k, t * P)


def _euler_maclaurin_tail(spec, t, M, sgn):
    """``sum_{m >= M} f(m)`` for the smooth level function ``f`` via Euler-Maclaurin.

    ``f(m) ~ m^{n-1} m^{-(n+1)}`` decays like ``m^-2``, so the integral is done
    in the variable ``s = 1/m`` on ``(0, 1/M]``.
    """
    f = lambda m: _level_term(spec, t, m, sgn)
    from scipy import integrate

    def g(s, part):
        s = max(s, 1e-30)
        v = f(1.0 / s) / (s * s)
        return v.real if part == 0 else v.imag

    integ = 0.0 + 0.0j
    for part in (0, 1):
        v, _ = integrate.quad(g, 0.0, 1.0 / M, args=(part,), epsabs=0.0, epsrel=1e-13, limit=200)
        integ += v if part == 0 else 1j * v
    h = 1e-3 * M
    d1 = (f(M + h) - f(M - h)) / (2 * h)
    d3 = (f(M + 2 * h) - 2 * f(M + h) + 2 * f(M - h) - f(M - 2 * h)) / (2 * h ** 3)
    tail = integ + 0.5 * f(M) - d1 / 12.0
    # next Euler-Maclaurin term bounds the remainder
    return complex(tail), float(abs(d3) / 720.0 + 1e-16 * abs(tail))


def heat_value_at_origin(spec: ModelOperatorSpec, t: float = 1.0, m_max: Optional[int] = None,
                         numeric: bool = False) -> HeatValue:
    """Plancherel evaluation of the product operator's heat kernel at ``(0, t)``.

    ``m_max`` levels are summed exactly (per-level ``lam``-integrals either in
    closed Gamma form or, with ``numeric=True``, by Gauss-Legendre); the rest is
    added by Euler-Maclaurin. ``error`` combines the quadrature and tail bounds.
    """
    if not t > 0:
        raise PreconditionError(f"t must be positive, got {t}", {"t": t})
    M = DEFAULT_LEVELS if m_max is None else int(m_max)
    check_positive(spec, max(M, 1))
    C = plancherel_constant(spec.n)
    raw, err = _raw_sum(spec, t, M, numeric)
    value = C * complex(raw)
    # floor for rounding in the level sum
    error = C * float(err) + 1e-13 * abs(value)
    if abs(value.imag) <= 1e-12 * abs(value):
        value = float(value.real)
    return HeatValue(value, error, M)


@dataclass(frozen=True)
class RocklandResult:
    holds: bool
    witness: Optional[dict] = None


def _oscillator_hits(lam: Sequence[float], target: float, tol: float):
    """Multi-index ``alpha`` with ``sum lam_j (2 alpha_j + 1) = target``, or None."""
    base = sum(lam)
    rest = (target - base) / 2.0
    if rest < -tol:
        return None
    # enumerate sum alpha_j lam_j <= rest and keep the index for the witness
    gens = list(lam)

    def rec(i, acc, alpha):
        if i == len(gens):
            return tuple(alpha) if abs(acc - rest) <= tol else None
        v, a = acc, 0
        while v <= rest + tol:
            hit = rec(i + 1, v, alpha + [a])
            if hit is not None:
                return hit
            v += gens[i]
            a += 1
        return None

    return rec(0, 0.0, [])


def rockland_scan(L, mu, m_max: Optional[int] = None, lam_samples=None) -> RocklandResult:
    """Injectivity of ``-sum X_j^2 - i mu X_0`` in every nontrivial irreducible representation.

    In the representation with Levi eigenvalues ``lam_j`` and, when the Levi
    form is degenerate, a transverse frequency ``eta >= 0``, the eigenvalues are
    ``sum lam_j (2 alpha_j + 1) + s (eta + nu)`` for each eigenvalue ``nu`` of
    ``mu`` and ``s = +-1``. The scan searches exactly for a vanishing one.
    The representations trivial on the centre are injective unless the
    operator has no horizontal part at all, which needs ``d = 0``.
    ``m_max`` and ``lam_samples`` are accepted for interface compatibility; the
    search does not sample.
    """
    lev = _as_levi(L)
    lam, rank = symplectic_spectrum(lev)
    full = rank == lev.dim_h
    for nu in _mu_eigenvalues(mu):
        if abs(nu.imag) > MEMBERSHIP_TOL:
            continue
        for s in (1, -1):
            target = -s * nu.real
            if full:
                alpha = _oscillator_hits(lam, target, MEMBERSHIP_TOL)
                if alpha is not None:
                    return RocklandResult(False, {"eigenvalue": complex(nu), "m": int(sum(alpha)),
                                                  "alpha": alpha, "sign": s})
            else:
                eta = target - sum(lam)
                if eta >= -MEMBERSHIP_TOL:
                    return RocklandResult(False, {"eigenvalue": complex(nu), "m": 0, "sign": s,
                                                  "eta": max(eta, 0.0)})
    return RocklandResult(True, None)
