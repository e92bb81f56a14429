"""Levi-form algebra, singular sets and the combinatorial invertibility conditions.

The structure constants of a Heisenberg model are stored as an antisymmetric
matrix ``L`` with ``[X_j, X_k] = L[j, k] X_0``. Everything here depends only on
the symplectic spectrum of ``L``.
"""
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from .errors import PreconditionError

ASYMMETRY_TOL = 1e-12
ZERO_REL_TOL = 1e-9
MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True)
class LeviForm:
    """Antisymmetric structure-constant matrix of a Heisenberg model.

    Construct with :meth:`from_matrix`, which checks antisymmetry and stores
    ``(L - L.T) / 2``.
    """

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"Levi form must be a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("Levi form has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(a))))
        if np.max(np.abs(a + a.T)) > ASYMMETRY_TOL * scale:
            raise ValueError("Levi form is not antisymmetric")
        a = 0.5 * (a - a.T)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def from_matrix(cls, L) -> "LeviForm":
        return cls(np.asarray(L, dtype=float))

    @classmethod
    def normal_form(cls, lam: Sequence[float], d: Optional[int] = None) -> "LeviForm":
        """Block form with ``L[j, n+j] = -lam_j``, ``L[n+j, j] = lam_j`` and zero padding up to ``d``.

        With ``lam = (2,)`` this is the standard Heisenberg frame
        ``X_1 = d_1 + x_2 d_0``, ``X_2 = d_2 - x_1 d_0``.
        """
        lam = [float(v) for v in lam]
        n = len(lam)
        d = 2 * n if d is None else int(d)
        if d < max(1, 2 * n):
            raise ValueError(f"d={d} too small for {n} symplectic pairs")
        a = np.zeros((d, d))
        for j, v in enumerate(lam):
            a[j, n + j] = -v
            a[n + j, j] = v
        return cls(a)

    @property
    def dim_h(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other):
        return isinstance(other, LeviForm) and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())


def _as_levi(L) -> LeviForm:
    return L if isinstance(L, LeviForm) else LeviForm.from_matrix(L)


def symplectic_spectrum(L) -> Tuple[Tuple[float, ...], int]:
    """Positive symplectic eigenvalues of ``L`` (descending) and its rank.

    The eigenvalues of an antisymmetric matrix are ``±i lam_j`` together with
    zeros; they are read off from the Hermitian matrix ``iL``.
    """
    L = _as_levi(L)
    a = L.entries
    ev = np.linalg.eigvalsh(1j * a)
    thresh = ZERO_REL_TOL * max(1.0, float(np.linalg.norm(a, 2)))
    lam = sorted((float(v) for v in ev if v > thresh), reverse=True)
    return tuple(lam), 2 * len(lam)


def ladder_points(generators: Sequence[float], limit: float) -> Iterator[float]:
    """Yield every ``sum(alpha_j * g_j)`` with ``alpha`` in N^n that is ``<= limit``.

    Values are produced once per multi-index, so coincidences repeat.
    """
    gens = [float(g) for g in generators]
    if any(g <= 0 for g in gens):
        raise ValueError("ladder generators must be positive")

    def rec(i, acc):
        if i == len(gens):
            yield acc
            return
        v = acc
        while v <= limit:
            yield from rec(i + 1, v)
            v += gens[i]

    if limit >= 0:
        yield from rec(0, 0.0)


@dataclass(frozen=True)
class SingularSet:
    """Real set of forbidden eigenvalues for a model sublaplacian.

    ``variant`` is ``"half_lines"`` for ``(-inf, -c] U [c, inf)`` or ``"ladder"``
    for ``{±(c + 2 sum alpha_j lam_j)}``.
    """

    half_trace: float
    variant: str
    generators: Tuple[float, ...] = ()

    def distance(self, z: complex) -> float:
        """Euclidean distance in the complex plane from ``z`` to the set."""
        z = complex(z)
        x, y = abs(z.real), abs(z.imag)
        c = self.half_trace
        if self.variant == "half_lines":
            dx = max(0.0, c - x)
        else:
            # nearest ladder point: the enumeration only needs to go a bit past x
            best = abs(x - c)
            reach = x - c + 2 * max(self.generators)
            for s in ladder_points(self.generators, max(0.0, reach) / 2.0):
                best = min(best, abs(x - (c + 2.0 * s)))
            dx = best
        return float(np.hypot(dx, y))

    def contains(self, z: complex, tol: float = MEMBERSHIP_TOL) -> bool:
        z = complex(z)
        if abs(z.imag) > tol:
            return False
        x = abs(z.real)
        c = self.half_trace
        if self.variant == "half_lines":
            return x >= c - tol
        if x < c - tol:
            return False
        target = (x - c) / 2.0
        return any(abs(target - s) <= tol for s in ladder_points(self.generators, target + tol))


def singular_set(L) -> SingularSet:
    lam, rank = symplectic_spectrum(L)
    c = float(sum(lam))
    if rank < _as_levi(L).dim_h:
        return SingularSet(c, "half_lines")
    return SingularSet(c, "ladder", lam)


def membership(S: SingularSet, z: complex) -> bool:
    return S.contains(z)


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the sublaplacian invertibility test.

    ``margin`` is the smallest distance from an eigenvalue of ``mu`` to the
    singular set; ``complex_spectrum`` flags a ``mu`` with non-real eigenvalues,
    for which the intersection test is vacuous on those eigenvalues.
    """

    holds: bool
    margin: float
    eigenvalues: Tuple[complex, ...]
    offending: Tuple[complex, ...]
    complex_spectrum: bool


def _mu_eigenvalues(mu) -> np.ndarray:
    m = np.atleast_2d(np.asarray(mu, dtype=complex))
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"mu must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("mu has non-finite entries")
    try:
        return np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ValueError(f"eigenvalue computation failed: {exc}") from exc


def sublaplacian_report(L, mu) -> ConditionReport:
    S = singular_set(L)
    ev = _mu_eigenvalues(mu)
    bad = tuple(complex(z) for z in ev if S.contains(z))
    margin = min((S.distance(z) for z in ev), default=float("inf"))
    cplx = bool(np.any(np.abs(ev.imag) > MEMBERSHIP_TOL))
    return ConditionReport(not bad, margin, tuple(complex(z) for z in ev), bad, cplx)


def sublaplacian_condition(L, mu) -> bool:
    """True iff no eigenvalue of ``mu`` lies in the singular set of ``L``."""
    return sublaplacian_report(L, mu).holds


@dataclass(frozen=True)
class GeometryParams:
    """Pointwise data of a CR-type structure.

    ``kappa`` negative Levi eigenvalues, ``r`` the rank of the Levi form and
    ``d`` the dimension of the horizontal bundle (``2n`` by default).
    """

    n: int
    kappa: int = 0
    r: Optional[int] = None
    d: Optional[int] = None

    def __post_init__(self):
        r = self.n if self.r is None else self.r
        d = 2 * self.n if self.d is None else self.d
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "d", d)
        if self.n < 0 or not (0 <= self.kappa <= r <= self.n):
            raise ValueError(f"need 0 <= kappa <= r <= n, got n={self.n}, kappa={self.kappa}, r={r}")
        if d < 2 * self.n:
            raise ValueError(f"d={d} must be at least 2n={2 * self.n}")

    @property
    def epsilons(self) -> Tuple[int, ...]:
        return tuple(1 if j < self.n - self.kappa else -1 for j in range(self.n))


def _check_range(name, v, lo, hi):
    if not (lo <= v <= hi):
        raise PreconditionError(f"{name}={v} outside [{lo}, {hi}]", {name: v})


def y_bands(g: GeometryParams) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    """The two forbidden degree bands ``[kappa, kappa+n-r]`` and ``[r-kappa, n-kappa]``."""
    return (g.kappa, g.kappa + g.n - g.r), (g.r - g.kappa, g.n - g.kappa)


def y_witness_band(g: GeometryParams, q: int) -> Optional[Tuple[int, int]]:
    """The forbidden band containing ``q``, or ``None`` when Y(q) holds."""
    _check_range("q", q, 0, g.n)
    for lo, hi in y_bands(g):
        if lo <= q <= hi:
            return lo, hi
    return None


def condition_Y(g: GeometryParams, q: int) -> bool:
    return y_witness_band(g, q) is None


def condition_X(d: int, n: int, k: int) -> bool:
    if n < 0 or 2 * n > d:
        raise PreconditionError(f"need 0 <= 2n <= d, got n={n}, d={d}", {"n": n, "d": d})
    _check_range("k", k, 0, d)
    return k < n or k > d - n


def xpq_forbidden(g: GeometryParams) -> set:
    span = range(g.n - g.r + 1)
    return {(g.kappa + j, g.r - g.kappa + k) for j in span for k in span}


def condition_Xpq(g: GeometryParams, p: int, q: int) -> bool:
    _check_range("p", p, 0, g.n)
    _check_range("q", q, 0, g.n)
    bad = xpq_forbidden(g)
    return (p, q) not in bad and (q, p) not in bad


def horizontal_mu_spectrum(lam: Sequence[float], d: int, k: int) -> np.ndarray:
    """Eigenvalues of ``mu`` for the horizontal sublaplacian on degree-``k`` forms.

    Every pair of disjoint-or-not subsets ``J, K`` of ``{1..n}`` contributes
    ``sum_J lam - sum_K lam`` repeated ``binom(d - 2n, k - |J| - |K|)`` times
    (the choices of the remaining form factors from the Levi kernel).
    Returned sorted ascending.
    """
    lam = [float(v) for v in lam]
    n = len(lam)
    if 2 * n > d:
        raise PreconditionError(f"d={d} too small for {n} symplectic pairs", {"n": n, "d": d})
    _check_range("k", k, 0, d)
    pad = d - 2 * n
    idx = range(n)
    out = []
    for a in range(n + 1):
        for J in combinations(idx, a):
            sj = sum(lam[j] for j in J)
            for b in range(n + 1):
                rest = k - a - b
                if rest < 0 or rest > pad:
                    continue
                mult = comb(pad, rest)
                for K in combinations(idx, b):
                    out.extend([sj - sum(lam[j] for j in K)] * mult)
    return np.sort(np.array(out, dtype=float))


@dataclass(frozen=True)
class KohnSpectrum:
    """``values``: every ``mu_K`` with ``|K| = q``; ``reduced``: (k, value, multiplicity) triples."""

    values: np.ndarray
    reduced: Tuple[Tuple[int, int, int], ...]


def kohn_mu_spectrum(g: GeometryParams, q: int) -> KohnSpectrum:
    if g.r != g.n:
        raise PreconditionError("Kohn spectrum needs a nondegenerate Levi form (r = n)", {"r": g.r, "n": g.n})
    _check_range("q", q, 0, g.n)
    eps = g.epsilons
    total = sum(eps)
    vals = [2 * sum(eps[j] for j in K) - total for K in combinations(range(g.n), q)]
    n, kap = g.n, g.kappa
    reduced = tuple(
        (k, n + 2 * q - 2 * kap - 4 * k, comb(n - kap, k) * comb(kap, q - k))
        for k in range(max(0, q - kap), min(q, n - kap) + 1)
    )
    return KohnSpectrum(np.sort(np.array(vals, dtype=float)), reduced)
