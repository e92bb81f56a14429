"""Tangent-group arithmetic, privileged/Heisenberg coordinates and model vector fields.

Points of the model group are ``(x0, x')`` with ``x' in R^d``; coordinate 0 is
the weight-two direction.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List

import numpy as np

from .levi import LeviForm, _as_levi


@dataclass(frozen=True)
class GroupPoint:
    x0: float
    xprime: np.ndarray = field(repr=False)

    def __post_init__(self):
        xp = np.array(self.xprime, dtype=float).reshape(-1)
        if not (np.isfinite(self.x0) and np.all(np.isfinite(xp))):
            raise ValueError("group point has non-finite coordinates")
        xp.setflags(write=False)
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "xprime", xp)

    @classmethod
    def from_array(cls, x) -> "GroupPoint":
        x = np.asarray(x, dtype=float)
        return cls(x[0], x[1:])

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.x0], self.xprime])

    @property
    def dim(self) -> int:
        return self.xprime.size


def group_multiply(L, x: GroupPoint, y: GroupPoint) -> GroupPoint:
    """``(x.y)_0 = x0 + y0 + 1/2 sum L_jk x_j y_k``, ``(x.y)' = x' + y'``."""
    a = _as_levi(L).entries
    if not (x.dim == y.dim == a.shape[0]):
        raise ValueError(f"dimension mismatch: L is {a.shape[0]}, points are {x.dim} and {y.dim}")
    # summing L_jk (x_j y_k - x_k y_j) over j < k makes x.x^-1 = 0 exact in floating point
    W = np.outer(x.xprime, y.xprime)
    iu = np.triu_indices(a.shape[0], 1)
    quad = float(np.sum(a[iu] * (W - W.T)[iu]))
    return GroupPoint(x.x0 + y.x0 + 0.5 * quad, x.xprime + y.xprime)


def group_inverse(x: GroupPoint) -> GroupPoint:
    return GroupPoint(-x.x0, -x.xprime)


def dilate(t: float, x: GroupPoint) -> GroupPoint:
    return GroupPoint(t * t * x.x0, t * x.xprime)


def homogeneous_norm(x: GroupPoint) -> float:
    r2 = float(x.xprime @ x.xprime)
    return (x.x0 ** 2 + r2 * r2) ** 0.25


def dilation_norm(t: float, x: GroupPoint):
    """Return ``(t.x, ||t.x||)``."""
    tx = dilate(t, x)
    return tx, homogeneous_norm(tx)


@dataclass(frozen=True)
class AffineVectorField:
    """Vector field ``sum_i (const[i] + sum_j lin[i][j] x_j) d_i`` on R^{d+1}.

    Coefficients are kept as given (``Fraction`` entries make all operations
    exact). Index 0 is the ``x0`` direction.
    """

    const: tuple
    lin: tuple

    @classmethod
    def make(cls, const, lin) -> "AffineVectorField":
        return cls(tuple(const), tuple(tuple(row) for row in lin))

    @property
    def dim(self) -> int:
        return len(self.const)

    def _arrays(self):
        return np.array(self.const, dtype=object), np.array(self.lin, dtype=object)

    def bracket(self, other: "AffineVectorField") -> "AffineVectorField":
        """Lie bracket ``[self, other]``; exact for exact coefficients.

        For ``X = c + Mx`` and ``Y = e + Nx`` the bracket is
        ``(N c - M e) + (N M - M N) x``.
        """
        c, M = self._arrays()
        e, N = other._arrays()
        return AffineVectorField.make(N.dot(c) - M.dot(e), (N.dot(M) - M.dot(N)).tolist())

    def scale(self, s) -> "AffineVectorField":
        return AffineVectorField.make([s * v for v in self.const], [[s * v for v in row] for row in self.lin])

    def evaluate(self, x) -> np.ndarray:
        c, M = self._arrays()
        return np.asarray(c + M.dot(np.asarray(x, dtype=object)), dtype=float)

    def __eq__(self, other):
        return (
            isinstance(other, AffineVectorField)
            and all(a == b for a, b in zip(self.const, other.const))
            and all(a == b for ra, rb in zip(self.lin, other.lin) for a, b in zip(ra, rb))
        )

    __hash__ = None


def _exact(v):
    return Fraction(v) if not isinstance(v, Fraction) else v


def model_fields(L, exact: bool = True) -> List[AffineVectorField]:
    """``X_0 = d_0`` and ``X_j = d_j - 1/2 sum_k L_jk x_k d_0`` for ``j = 1..d``.

    With ``exact=True`` float entries are converted to ``Fraction`` exactly,
    so brackets ``[X_j, X_k] = L_jk X_0`` hold without rounding.
    """
    if isinstance(L, LeviForm):
        rows = L.entries.tolist()
    else:
        rows = [list(r) for r in L]
        if any(rows[j][k] != -rows[k][j] for j in range(len(rows)) for k in range(len(rows))):
            raise ValueError("Levi form is not antisymmetric")
    if exact:
        rows = [[_exact(v) for v in r] for r in rows]
    else:
        rows = [[float(v) for v in r] for r in rows]
    d = len(rows)
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    half = Fraction(1, 2) if exact else 0.5

    def unit(i):
        return [one if j == i else zero for j in range(d + 1)]

    fields = [AffineVectorField.make(unit(0), [[zero] * (d + 1) for _ in range(d + 1)])]
    for j in range(d):
        lin = [[zero] * (d + 1) for _ in range(d + 1)]
        for k in range(d):
            lin[0][k + 1] = -half * rows[j][k]
        fields.append(AffineVectorField.make(unit(j + 1), lin))
    return fields


@dataclass(frozen=True)
class FrameJet:
    """First-order data of a Heisenberg frame ``X_0..X_d`` at a point.

    ``B[j, k]`` is the ``d_k`` coefficient of ``X_j`` at ``base`` and ``b[j, k]``
    the ``x_k``-derivative of the ``d_0`` coefficient of ``X_j`` in privileged
    coordinates (``j, k = 1..d``).
    """

    base: np.ndarray
    B: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float).reshape(-1)
        B = np.asarray(self.B, dtype=float)
        b = np.asarray(self.b, dtype=float)
        m = base.size
        if B.shape != (m, m) or b.shape != (m - 1, m - 1):
            raise ValueError(f"inconsistent jet shapes: base {base.shape}, B {B.shape}, b {b.shape}")
        if not (np.all(np.isfinite(B)) and np.all(np.isfinite(b))):
            raise ValueError("frame jet has non-finite entries")
        for name, v in (("base", base), ("B", B), ("b", b)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @property
    def condition_number(self) -> float:
        return float(np.linalg.cond(self.B))


def _checked_A(jet: FrameJet) -> np.ndarray:
    cond = jet.condition_number
    if not np.isfinite(cond) or cond > 1e12:
        raise ValueError(f"frame matrix is singular (condition number {cond:.3e})")
    return np.linalg.inv(jet.B.T)


@dataclass(frozen=True)
class CoordinateChange:
    """``x -> phi(A (x - base))`` where ``phi`` subtracts ``1/4 x'^T S x'`` from ``x0``.

    ``S = b + b^T`` (all zeros for a purely affine change).
    """

    A: np.ndarray
    base: np.ndarray
    S: np.ndarray

    def affine(self, x) -> np.ndarray:
        return self.A @ (np.asarray(x, dtype=float) - self.base)

    def quadratic(self, y) -> np.ndarray:
        y = np.array(y, dtype=float)
        yp = y[1:]
        y[0] = y[0] - 0.25 * yp @ self.S @ yp
        return y

    def __call__(self, x) -> np.ndarray:
        return self.quadratic(self.affine(x))

    def inverse(self, z) -> np.ndarray:
        z = np.array(z, dtype=float)
        zp = z[1:]
        z[0] = z[0] + 0.25 * zp @ self.S @ zp
        return np.linalg.solve(self.A, z) + self.base

    def jacobian(self, x) -> np.ndarray:
        y = self.affine(x)
        Jq = np.eye(y.size)
        Jq[0, 1:] = -0.5 * self.S @ y[1:]
        return Jq @ self.A

    @property
    def is_affine(self) -> bool:
        return not np.any(self.S)


def privileged_map(jet: FrameJet) -> CoordinateChange:
    """Affine change ``psi(x) = (B^T)^{-1} (x - u)`` sending ``X_j(u)`` to ``d_j``."""
    A = _checked_A(jet)
    d = jet.b.shape[0]
    return CoordinateChange(A, jet.base, np.zeros((d, d)))


def heisenberg_map(jet: FrameJet) -> CoordinateChange:
    """Privileged change followed by the quadratic correction removing ``sym(b)``."""
    A = _checked_A(jet)
    return CoordinateChange(A, jet.base, jet.b + jet.b.T)


def jet_levi_form(jet: FrameJet) -> LeviForm:
    """Structure constants of the model reached in Heisenberg coordinates: ``b^T - b``."""
    return LeviForm.from_matrix(jet.b.T - jet.b)


def pushforward_field(change: CoordinateChange, coeff: Callable[[np.ndarray], np.ndarray]) -> Callable:
    """Coefficients of the image of a vector field under ``change``.

    ``coeff(x)`` returns the components of a field at ``x`` in the source
    coordinates; the returned callable gives the components at ``z`` in the
    target coordinates.
    """

    def pushed(z):
        x = change.inverse(z)
        return change.jacobian(x) @ np.asarray(coeff(x), dtype=float)

    return pushed


def frame_jet_from_callback(frame: Callable[[np.ndarray], np.ndarray], u, scale: float = 1.0) -> FrameJet:
    """Build a :class:`FrameJet` by central differences (step ``1e-5 * scale``).

    ``frame(x)`` returns the ``(d+1) x (d+1)`` matrix whose row ``j`` holds the
    coefficients of ``X_j`` at ``x``. The ``d_0`` coefficients are differentiated
    in the privileged coordinates ``psi_u``.
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    B = np.asarray(frame(u), dtype=float)
    A = np.linalg.inv(B.T)
    Ainv = B.T
    m = u.size
    h = 1e-5 * scale

    def priv_coeffs(y):
        x = Ainv @ y + u
        return np.asarray(frame(x), dtype=float) @ A.T

    b = np.empty((m - 1, m - 1))
    for k in range(1, m):
        e = np.zeros(m)
        e[k] = h
        diff = (priv_coeffs(e) - priv_coeffs(-e)) / (2 * h)
        b[:, k - 1] = diff[1:, 0]
    return FrameJet(u, B, b)


def frame_field_at(frame: Callable, j: int) -> Callable:
    return lambda x: np.asarray(frame(x), dtype=float)[j]
