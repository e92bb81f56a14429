"""Model heat kernels on the Heisenberg group and the symbol inverse of a sublaplacian.

The Folland-Stein operator is ``-1/2 sum (X_j)^2 - i mu X_0`` on ``H^{2n+1}``
with ``[X_j, X_{n+j}] = -2 X_0``. Its heat kernel is an oscillatory integral
over the frequency dual to ``x0``; after substituting ``u = t xi0`` it reads

    k(x0, x', t) = (2 pi)^-1 (2 pi t)^-n t^-1
                   * int exp(i (x0/t) u - mu u) (u/sinh u)^n exp(-|x'|^2/(2t) * u/tanh u) du.
"""
from dataclasses import dataclass, field
from math import pi

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, PreconditionError
from .levi import LeviForm, _as_levi
from .quadrature import integrate_panels
from .special import log_cosh, log_x_over_sinh, tanh_over_x, x_over_tanh

TAIL_TOL = 1e-16


@dataclass(frozen=True)
class CovectorPoint:
    xi0: float
    xiprime: np.ndarray = field(repr=False)

    def __post_init__(self):
        xp = np.array(self.xiprime, dtype=float).reshape(-1)
        if not (np.isfinite(self.xi0) and np.all(np.isfinite(xp))):
            raise ValueError("covector has non-finite entries")
        xp.setflags(write=False)
        object.__setattr__(self, "xi0", float(self.xi0))
        object.__setattr__(self, "xiprime", xp)

    def scaled(self, s: float) -> "CovectorPoint":
        """Parabolic scaling ``(s^2 xi0, s xi')``."""
        return CovectorPoint(s * s * self.xi0, s * self.xiprime)


@dataclass(frozen=True)
class HeatQuery:
    n: int
    mu: complex
    x0: float
    xprime: np.ndarray = field(repr=False)
    t: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError(f"n must be >= 1, got {self.n}", {"n": self.n})
        mu = complex(self.mu)
        if not abs(mu.real) < self.n:
            raise PreconditionError(
                f"|Re mu| = {abs(mu.real)} must be below n = {self.n}", {"mu": str(mu), "n": self.n}
            )
        if not self.t > 0:
            raise PreconditionError(f"t must be positive, got {self.t}", {"t": self.t})
        xp = np.zeros(2 * self.n) if self.xprime is None else np.array(self.xprime, dtype=float).reshape(-1)
        if xp.size != 2 * self.n:
            raise ValueError(f"x' must have length 2n = {2 * self.n}, got {xp.size}")
        xp.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "xprime", xp)


def _levi_modes(lam_or_L, d):
    """Eigenpairs of |L| as (sigma, V) with V orthonormal columns."""
    if isinstance(lam_or_L, LeviForm) or np.ndim(lam_or_L) == 2:
        a = _as_levi(lam_or_L).entries
        w, V = np.linalg.eigh(-a @ a)
        return np.sqrt(np.clip(w, 0.0, None)), V
    lam = np.asarray(lam_or_L, dtype=float).reshape(-1)
    if d is None:
        d = 2 * lam.size
    if np.any(lam <= 0) or d < 2 * lam.size:
        raise ValueError("need positive lam and d >= 2 len(lam)")
    sig = np.concatenate([lam, lam, np.zeros(d - 2 * lam.size)])
    return sig, np.eye(d)


def mehler_G(lam, d, xi: CovectorPoint, t: float) -> float:
    """``det^{-1/2} cosh(t|xi0||L|) * exp(-t <tanh(t|xi0||L|)/(t|xi0||L|) xi', xi'>)``.

    ``lam`` is either the symplectic spectrum (normal-form coordinates) or a
    full Levi matrix; ``d`` is ignored for a matrix.
    """
    if t < 0:
        raise PreconditionError(f"t must be non-negative, got {t}", {"t": t})
    sig, V = _levi_modes(lam, d)
    xp = np.asarray(xi.xiprime, dtype=float)
    if xp.size != sig.size:
        raise ValueError(f"xi' must have length {sig.size}, got {xp.size}")
    s = t * abs(xi.xi0) * sig
    eta = V.T @ xp
    log_g = -0.5 * np.sum(log_cosh(s)) - t * np.sum(tanh_over_x(s) * eta * eta)
    return float(np.exp(log_g))


def symbol_inverse_q(lam, d, mu: complex, xi: CovectorPoint, rtol: float = 1e-10) -> complex:
    """Laplace transform ``int_0^inf exp(-t mu xi0) G(xi, t) dt`` inside the strip ``|Re mu| < sum lam``."""
    sig, V = _levi_modes(lam, d)
    half_trace = 0.5 * float(np.sum(sig))
    mu = complex(mu)
    if not abs(mu.real) < half_trace:
        raise PreconditionError(
            f"|Re mu| = {abs(mu.real)} outside the strip of width {half_trace}",
            {"mu": str(mu), "half_trace": half_trace},
        )
    xp = np.asarray(xi.xiprime, dtype=float)
    if xi.xi0 == 0 and not np.any(xp):
        raise PreconditionError("symbol inverse is undefined at xi = 0", {"xi": 0})
    eta2 = (V.T @ xp) ** 2
    a0 = abs(xi.xi0)

    def log_integrand(t):
        s = t * a0 * sig
        return -mu.real * t * xi.xi0 - 0.5 * np.sum(log_cosh(s)) - t * np.sum(tanh_over_x(s) * eta2)

    # exponential decay rate of the integrand for large t
    rate = (half_trace - abs(mu.real)) * a0 if a0 > 0 else float(np.sum(eta2))
    scale = 1.0 / rate

    def re(t):
        return np.exp(log_integrand(t)) * np.cos(mu.imag * t * xi.xi0)

    def im(t):
        return -np.exp(log_integrand(t)) * np.sin(mu.imag * t * xi.xi0)

    out = []
    for f in (re, im):
        if f is im and mu.imag * xi.xi0 == 0:
            out.append(0.0)
            continue
        head, e1 = integrate.quad(f, 0.0, 40 * scale, epsabs=0.0, epsrel=rtol, limit=400)
        tail, e2 = integrate.quad(f, 40 * scale, np.inf, epsabs=1e-300, epsrel=rtol, limit=200)
        out.append(head + tail)
    return complex(out[0], out[1])


def _cutoff(n: int, mu_re: float, a: float) -> float:
    """Smallest T with (2T)^n exp(-(n - |mu_re| + a) T) below TAIL_TOL."""
    rate = n - abs(mu_re) + a
    T = 1.0
    while n * np.log(2 * T) - rate * T > np.log(TAIL_TOL):
        T *= 1.25
    return T


def heat_integrand(n: int, mu: complex, x0: float, xprime, t: float):
    """The ``u``-integrand of the heat kernel as a vectorised callable (without prefactor)."""
    r2 = float(np.dot(xprime, xprime))
    a = r2 / (2.0 * t)
    w = x0 / t
    mu = complex(mu)

    def f(u):
        base = n * log_x_over_sinh(u) - a * x_over_tanh(u)
        return np.exp(base + (1j * w - mu) * u)

    return f


def heat_kernel_fs(q: HeatQuery, rtol: float = 1e-13):
    """Value of the heat kernel at ``(x0, x', t)``; real for real integrals, otherwise complex.

    Returns the value only; see :func:`heat_kernel_fs_with_error` for the
    quadrature error estimate.
    """
    return heat_kernel_fs_with_error(q, rtol)[0]


def heat_kernel_fs_with_error(q: HeatQuery, rtol: float = 1e-13):
    n, mu, t = q.n, q.mu, q.t
    r2 = float(q.xprime @ q.xprime)
    a = r2 / (2.0 * t)
    w = q.x0 / t
    T = _cutoff(n, mu.real, a)
    f = heat_integrand(n, mu, q.x0, q.xprime, t)

    def folded(u):
        # integrand at u and -u; the non-oscillatory part is even in u
        return f(u) + f(-u)

    width = min(2.0, 2.0 / (1.0 + abs(w) + abs(mu.imag)))
    try:
        val, err = integrate_panels(folded, 0.0, T, width, rtol=rtol, atol=1e-300)
    except ConvergenceError as exc:
        raise ConvergenceError(f"heat kernel quadrature failed at {q}: {exc}") from exc
    pref = (2 * pi) ** -1 * (2 * pi * t) ** -n / t
    val = complex(val) * pref
    err = err * pref
    if abs(val.imag) <= 1e-14 * abs(val) + 1e-300 or (mu.imag == 0 and q.x0 == 0):
        return float(val.real), float(err)
    return val, float(err)


def heat_kernel_origin(n: int, mu: complex = 0.0, t: float = 1.0) -> float:
    """``k_mu(0, 0, t)``, real for real ``mu``."""
    return heat_kernel_fs(HeatQuery(n, mu, 0.0, None, t))

