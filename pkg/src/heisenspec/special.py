"""Cancellation-free evaluation of the hyperbolic ratios that appear in Mehler-type kernels.

All functions accept scalars or numpy arrays (real or complex where noted) and
return arrays of the same shape. Near the origin a Taylor series is used; for
large arguments the exponentials are rewritten in terms of ``exp(-2|x|)`` so
that nothing overflows.
"""
import numpy as np

SERIES_CUTOFF = 1e-4


def _as_float(x):
    return np.asarray(x, dtype=float)


def x_over_sinh(x):
    """Return ``x / sinh(x)`` (equal to 1 at the origin)."""
    x = _as_float(x)
    a = np.abs(x)
    small = a < SERIES_CUTOFF
    safe = np.where(small, 1.0, a)
    big = 2.0 * safe * np.exp(-safe) / (-np.expm1(-2.0 * safe))
    x2 = x * x
    series = 1.0 - x2 / 6.0 + 7.0 * x2 * x2 / 360.0
    return np.where(small, series, big)


def log_x_over_sinh(x):
    """Return ``log(x / sinh(x))``, accurate for every real ``x``."""
    x = _as_float(x)
    a = np.abs(x)
    small = a < SERIES_CUTOFF
    safe = np.where(small, 1.0, a)
    big = np.log(2.0 * safe) - safe - np.log(-np.expm1(-2.0 * safe))
    x2 = x * x
    series = -x2 / 6.0 + x2 * x2 / 180.0
    return np.where(small, series, big)


def x_over_tanh(x):
    """Return ``x / tanh(x)`` (equal to 1 at the origin)."""
    x = _as_float(x)
    a = np.abs(x)
    small = a < SERIES_CUTOFF
    safe = np.where(small, 1.0, a)
    e = np.exp(-2.0 * safe)
    big = safe * (1.0 + e) / (-np.expm1(-2.0 * safe))
    x2 = x * x
    series = 1.0 + x2 / 3.0 - x2 * x2 / 45.0
    return np.where(small, series, big)


def tanh_over_x(x):
    """Return ``tanh(x) / x`` (equal to 1 at the origin)."""
    x = _as_float(x)
    a = np.abs(x)
    small = a < SERIES_CUTOFF
    safe = np.where(small, 1.0, a)
    big = np.tanh(safe) / safe
    x2 = x * x
    series = 1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0
    return np.where(small, series, big)


def log_cosh(x):
    """Return ``log(cosh(x))`` without overflow."""
    a = np.abs(_as_float(x))
    return a + np.log1p(np.exp(-2.0 * a)) - np.log(2.0)
