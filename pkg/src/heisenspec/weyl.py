"""Weyl-law constants for sublaplacians, Kohn/horizontal Laplacians on forms and products.

Every constant is returned as a :class:`WeylRecord` carrying the convention
branches used, so tables can be audited.

Prefactor conventions (see :mod:`heisenspec.conventions`):

``"plus_n"``
    the ``2^n nu(mu)`` counting constant per pseudohermitian volume, together
    with the form-degree constants in the same normalisation.
``"minus_n"``
    ``2^-n nu(mu)`` per pseudohermitian volume, i.e. ``nu(mu)`` per unit of the
    coordinate (Haar) volume in which the model is normalised. This is the
    branch selected by the nilmanifold grid experiment.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial, gamma as gamma_fn
from typing import Dict, List, Tuple

import numpy as np
from scipy import integrate

from .errors import ExcludedIndexError, PreconditionError
from .levi import GeometryParams, condition_Xpq, condition_Y, y_witness_band
from .special import log_x_over_sinh

CONVENTIONS = ("plus_n", "minus_n")
VOLUME_CONVENTIONS = ("pseudohermitian", "contact", "haar")


@dataclass(frozen=True)
class WeylRecord:
    """``N(lam) ~ constant * lam**exponent`` for a given volume normalisation.

    ``alternatives`` maps competing convention names to the constant they
    would give; ``params`` holds the geometry parameters.
    """

    constant: float
    exponent: float
    volume_convention: str
    provenance: Tuple[str, ...]
    params: Dict[str, object] = field(default_factory=dict)
    alternatives: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not (np.isfinite(self.constant) and self.constant > 0):
            raise ValueError(f"Weyl constant must be positive, got {self.constant}")
        if not self.exponent > 0:
            raise ValueError(f"Weyl exponent must be positive, got {self.exponent}")
        if self.volume_convention not in VOLUME_CONVENTIONS:
            raise ValueError(f"unknown volume convention {self.volume_convention!r}")
        object.__setattr__(self, "provenance", tuple(self.provenance))


def _check_nu_domain(n: int, mu: float):
    if not abs(mu) < n:
        raise PreconditionError(f"nu({n}, {mu}) diverges: need |mu| < n", {"n": n, "mu": mu})


@lru_cache(maxsize=4096)
def nu_with_error(n: int, mu: float) -> Tuple[float, float]:
    """``nu(mu)`` and an estimate of its relative error.

    ``nu(mu) = (2 pi)^{-(n+1)} / (n+1)! * int_R exp(-mu x) (x / sinh x)^n dx``,
    integrated on the half line as ``2 cosh(mu x) (x/sinh x)^n``.
    """
    n = int(n)
    mu = float(mu)
    if n < 1:
        raise PreconditionError(f"n must be >= 1, got {n}", {"n": n})
    _check_nu_domain(n, mu)
    a = abs(mu)

    def f(x):
        base = n * log_x_over_sinh(x)
        return np.exp(base + a * x) + np.exp(base - a * x)

    # the integrand decays like x^n exp(-(n - |mu|) x); split where it is ~1e-17
    rate = n - a
    T = 1.0
    while n * np.log(2 * T) - rate * T > np.log(1e-17):
        T *= 1.25
    breaks = np.linspace(0.0, T, 9)
    total, err = 0.0, 0.0
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        v, e = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-13, limit=200)
        total += v
        err += e
    v, e = integrate.quad(f, T, np.inf, epsabs=0.0, epsrel=1e-10, limit=200)
    total += v
    err += e
    scale = (2 * np.pi) ** -(n + 1) / factorial(n + 1)
    return total * scale, err / total


def nu(n: int, mu: float) -> float:
    return nu_with_error(n, mu)[0]


def _prefactor(n: int, convention: str) -> float:
    if convention == "plus_n":
        return 2.0 ** n
    if convention == "minus_n":
        return 2.0 ** -n
    raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


def alpha_terms(n: int, kappa: int, p: int, q: int) -> List[Tuple[int, int]]:
    """``(weight, nu argument)`` pairs of the Kohn constant, before the prefactor."""
    return [
        (comb(n, p) * comb(n - kappa, k) * comb(kappa, q - k), n + 2 * q - 2 * kappa - 4 * k)
        for k in range(max(0, q - kappa), min(q, n - kappa) + 1)
    ]


def beta_terms(n: int, kappa: int, p: int, q: int) -> List[Tuple[int, int]]:
    """``(weight, nu argument)`` pairs of the horizontal-sublaplacian constant on (p,q)-forms.

    The argument is ``(q - p) + 2(l - k)`` where ``l`` (``k``) counts the
    holomorphic (antiholomorphic) factors taken from the positive Levi block.
    """
    out = []
    for l in range(max(0, p - kappa), min(p, n - kappa) + 1):
        for k in range(max(0, q - kappa), min(q, n - kappa) + 1):
            w = comb(n - kappa, l) * comb(kappa, p - l) * comb(n - kappa, k) * comb(kappa, q - k)
            out.append((w, (q - p) + 2 * (l - k)))
    return out


def gamma_terms(n: int, k: int) -> List[Tuple[int, int]]:
    return [(comb(n, p) * comb(n, k - p), p - (k - p)) for p in range(max(0, k - n), min(k, n) + 1)]


def _sum_terms(n, terms):
    for _, arg in terms:
        if not -n < arg < n:
            raise AssertionError(f"nu argument {arg} outside (-{n}, {n})")
    return sum(w * nu(n, arg) for w, arg in terms)


def alpha(n: int, kappa: int, p: int, q: int, convention: str = "plus_n") -> float:
    """Counting constant of the Kohn Laplacian on (p,q)-forms per pseudohermitian volume."""
    g = GeometryParams(n, kappa, n)
    if not 0 <= p <= n:
        raise PreconditionError(f"p={p} outside [0, {n}]", {"p": p})
    band = y_witness_band(g, q)
    if band is not None:
        raise PreconditionError(
            f"condition Y({q}) fails (band {list(band)}): the Kohn Laplacian is not hypoelliptic",
            {"q": q, "band": list(band)},
        )
    # "plus_n" keeps the weight 1/2. Twice the Kohn Laplacian is a
    # sublaplacian, so halving the operator multiplies counts by 2^{n+1}:
    # 2^{n+1} * 2^{-n} = 2 in the "minus_n" branch.
    factors = {"plus_n": 0.5, "minus_n": 2.0}
    if convention not in factors:
        raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")
    return factors[convention] * _sum_terms(n, alpha_terms(n, kappa, p, q))


def beta(n: int, kappa: int, p: int, q: int, convention: str = "plus_n") -> float:
    """Counting constant of the horizontal sublaplacian on (p,q)-forms per pseudohermitian volume."""
    g = GeometryParams(n, kappa, n)
    if not condition_Xpq(g, p, q):
        raise PreconditionError(
            f"condition X({p},{q}) fails for n={n}, kappa={kappa}", {"p": p, "q": q, "kappa": kappa}
        )
    return _prefactor(n, convention) * _sum_terms(n, beta_terms(n, kappa, p, q))


def gamma(n: int, k: int, convention: str = "plus_n") -> float:
    """Counting constant of the horizontal sublaplacian on contact k-forms."""
    if not 0 <= k <= 2 * n:
        raise PreconditionError(f"k={k} outside [0, {2 * n}]", {"k": k})
    if k == n:
        raise ExcludedIndexError(f"k = n = {n} is excluded: the operator is not hypoelliptic", {"k": k})
    return _prefactor(n, convention) * _sum_terms(n, gamma_terms(n, k))


def _provenance(convention: str) -> List[str]:
    return [
        "nu: body normalisation with 1/(n+1)!",
        "heat kernel: 1/(2 pi) in the central Fourier inversion",
        f"prefactor: {convention}",
    ]


def _record(value_by_conv, exponent, volume_convention, adopted, params, extra=()):
    prov = _provenance(adopted) + list(extra)
    return WeylRecord(
        float(value_by_conv[adopted]), float(exponent), volume_convention, tuple(prov), dict(params),
        {k: float(v) for k, v in value_by_conv.items()},
    )


def sublaplacian_weyl(n: int, mu: float, rank_E: int = 1, volume: float = 1.0,
                      convention: str = "pseudohermitian", prefactor: str = "minus_n") -> WeylRecord:
    """Counting constant of a sublaplacian ``-sum X_j^2 - i mu X_0`` (Folland-Stein scaling).

    ``convention`` names the volume that ``volume`` measures. For the ``haar``
    convention the constant is ``nu(mu) rk vol``; for a pseudohermitian or
    contact volume both the ``2^n`` and ``2^-n`` branches are returned and
    ``prefactor`` selects which one is reported as ``constant``.
    """
    _check_nu_domain(n, mu)
    if rank_E < 1 or not volume > 0:
        raise PreconditionError("rank must be >= 1 and volume positive", {"rank_E": rank_E, "volume": volume})
    base = nu(n, mu) * rank_E * volume
    params = {"n": n, "mu": mu, "rank_E": rank_E, "volume": volume}
    if convention == "haar":
        return WeylRecord(base, n + 1.0, "haar",
                          ("nu: body normalisation with 1/(n+1)!",
                           "heat kernel: 1/(2 pi) in the central Fourier inversion",
                           "volume: Haar, no 2^n factor"), params, {"haar": base})
    values = {c: _prefactor(n, c) * base for c in CONVENTIONS}
    return _record(values, n + 1.0, convention, prefactor, params)


def gover_graham_factors(n: int, k: int) -> Tuple[float, ...]:
    if k < 1:
        raise PreconditionError(f"k must be >= 1, got {k}", {"k": k})
    if k == n + 1:
        raise PreconditionError(
            f"k = n + 1 = {k}: the product contains the non-invertible factors Delta + i{n}X_0 and Delta - i{n}X_0",
            {"k": k, "singular_factors": [f"Delta+i{n}X0", f"Delta-i{n}X0"]},
        )
    return tuple(float(k - 1 - 2 * j) for j in range(k))


def gover_graham_constant(n: int, k: int, prefactor: str = "minus_n") -> WeylRecord:
    """Counting constant per pseudohermitian volume of the product of ``k`` sublaplacians.

    ``K = K(0, 1)`` is the model heat kernel at the origin; the reported
    candidates are ``2^{-n} K / Gamma(1 + (n+1)/k)`` (adopted), the same with
    ``2^n`` and ``2^n K / Gamma(1 + (2n+2)/k)``, whose Gamma argument fails the k = 1 check.
    """
    from .plancherel import ModelOperatorSpec, heat_value_at_origin

    factors = gover_graham_factors(n, k)
    K = heat_value_at_origin(ModelOperatorSpec(n, factors), 1.0).value
    e = (n + 1) / k
    values = {
        "minus_n": 2.0 ** -n * K / gamma_fn(1 + e),
        "plus_n": 2.0 ** n * K / gamma_fn(1 + e),
        "plus_n_gamma_2n+2": 2.0 ** n * K / gamma_fn(1 + 2 * e),
    }
    return _record(values, e, "pseudohermitian", prefactor,
                   {"n": n, "k": k, "K": K, "factors": list(factors)},
                   extra=("gamma argument: 1 + (n+1)/k",))


def predict(record: WeylRecord, lam: float) -> float:
    return record.constant * lam ** record.exponent


def predict_eigenvalue(record: WeylRecord, k: int) -> float:
    if k < 1:
        raise ValueError("eigenvalue index starts at 1")
    return (k / record.constant) ** (1.0 / record.exponent)


def nu_argument_scan(n_max: int = 6):
    """Every ``(family, params, argument)`` generated by the admissible alpha/beta/gamma sums."""
    out = []
    for n in range(1, n_max + 1):
        for kappa in range(n + 1):
            g = GeometryParams(n, kappa, n)
            for p in range(n + 1):
                for q in range(n + 1):
                    if condition_Y(g, q):
                        out += [("alpha", (n, kappa, p, q), a) for _, a in alpha_terms(n, kappa, p, q)]
                    if condition_Xpq(g, p, q):
                        out += [("beta", (n, kappa, p, q), a) for _, a in beta_terms(n, kappa, p, q)]
        for k in range(2 * n + 1):
            if k != n:
                out += [("gamma", (n, k), a) for _, a in gamma_terms(n, k)]
    return out


_FORM_FAMILIES = {"alpha": alpha, "beta": beta, "gamma": gamma}


def form_record(family: str, params: Dict[str, int], convention: str = "plus_n") -> WeylRecord:
    """Wrap an alpha/beta/gamma constant in a record; both conventions go into ``alternatives``."""
    fn = _FORM_FAMILIES[family]
    values = {c: fn(**params, convention=c) for c in CONVENTIONS}
    return _record(values, params["n"] + 1.0, "pseudohermitian", convention, params,
                   extra=(f"family: {family}",))
