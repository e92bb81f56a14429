"""Grid eigensolver for the sublaplacian on the Heisenberg nilmanifold and Weyl-law fits.

The nilmanifold is the quotient of ``H^3`` with product
``x.y = (x0 + y0 + x2 y1 - x1 y2, x' + y')`` by the integer lattice; the
left-invariant fields are ``X1 = d1 + x2 d0`` and ``X2 = d2 - x1 d0``.

Functions are expanded in Fourier modes ``exp(2 pi i k x0)``, which the
operator preserves. In mode ``k`` the flow of ``X_j`` by a step ``h = 1/N`` is
a shift on an ``N x N`` grid in ``(x1, x2)`` times a phase, and the lattice
identifications become twisted-periodic wraparounds. The discrete operator is
``c * sum_j D_j^* D_j`` with ``D_j = (R_j - I)/h``, ``R_j`` the unitary step
along the flow, and ``c = 1/2`` with ``half_factor``.

Modes ``|k| >= N/2`` are not represented; their lowest level is about
``pi N`` (with ``half_factor``), which limits the trusted spectrum.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla
from scipy import stats

from .errors import ConvergenceError, PreconditionError

MIN_N = 16
RESIDUAL_TOL = 1e-8
TRUST_FRACTION = 0.9
MIN_FIT_POINTS = 20
# below this the lowest mode-1 levels and torus modes dominate the count
ASYMPTOTIC_ONSET = 10 * np.pi


@dataclass(frozen=True)
class NilGrid:
    N: int
    half_factor: bool = True

    def __post_init__(self):
        if int(self.N) != self.N or self.N < MIN_N:
            raise PreconditionError(f"grid size N={self.N} must be an integer >= {MIN_N}", {"N": self.N})
        if self.N % 2:
            raise PreconditionError(f"grid size N={self.N} must be even", {"N": self.N})

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def modes(self) -> range:
        return range(-self.N // 2, self.N // 2)

    @property
    def scale(self) -> float:
        return 0.5 if self.half_factor else 1.0

    @property
    def trust_cutoff(self) -> float:
        """Eigenvalues above this may be missing (unrepresented Fourier modes)."""
        return TRUST_FRACTION * 2 * np.pi * (self.N // 2) * (2 * self.scale)

    def step_phases(self, k: int):
        """Phases of the two flow steps in mode ``k`` on the ``(i, j)`` grid, wraparound included.

        Stepping ``x1`` by ``h`` at ``x2 = j h`` picks up ``exp(2 pi i k j h^2)``;
        crossing ``x1 = 1`` adds ``exp(2 pi i k j h)`` from the lattice
        identification. The ``x2`` step is analogous with the opposite sign.
        """
        N, h = self.N, self.h
        I, J = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
        ph1 = np.exp(2j * np.pi * k * J * h * h) * np.where(I == N - 1, np.exp(2j * np.pi * k * J * h), 1.0)
        ph2 = np.exp(-2j * np.pi * k * I * h * h) * np.where(J == N - 1, np.exp(-2j * np.pi * k * I * h), 1.0)
        return ph1, ph2


def sector_operator(grid: NilGrid, k: int) -> sp.csr_matrix:
    """Hermitian ``N^2 x N^2`` block of the operator on Fourier mode ``k``."""
    N = grid.N
    idx = np.arange(N * N).reshape(N, N)
    I, J = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    ph1, ph2 = grid.step_phases(k)
    shape = (N * N, N * N)
    R1 = sp.csr_matrix((ph1.ravel(), (idx.ravel(), idx[(I + 1) % N, J].ravel())), shape=shape)
    R2 = sp.csr_matrix((ph2.ravel(), (idx.ravel(), idx[I, (J + 1) % N].ravel())), shape=shape)
    A = 4.0 * sp.identity(N * N, format="csr") - R1 - R1.conj().T - R2 - R2.conj().T
    return (grid.scale / grid.h ** 2 * A).tocsr()


@dataclass
class NilOperator:
    """Block-diagonal operator: one Hermitian block per Fourier mode in ``x0``."""

    grid: NilGrid
    blocks: Dict[int, sp.csr_matrix] = field(repr=False)

    @property
    def dim(self) -> int:
        return self.grid.N ** 3

    def apply(self, f: np.ndarray) -> np.ndarray:
        """Apply to a grid function ``f[x0, x1, x2]`` of shape ``(N, N, N)``.

        The Nyquist x0 mode has no conjugate partner, so real input maps to
        real output only when that mode is absent. Its spectrum sits above
        the trust cutoff.
        """
        N = self.grid.N
        f = np.asarray(f)
        if f.shape != (N, N, N):
            raise ValueError(f"expected shape {(N, N, N)}, got {f.shape}")
        F = np.fft.fft(f, axis=0)
        G = np.empty_like(F, dtype=complex)
        freqs = np.fft.fftfreq(N, d=1.0 / N).astype(int)
        for row, k in enumerate(freqs):
            k = int(k)
            if k == N // 2:
                k = -N // 2
            G[row] = (self.blocks[k] @ F[row].ravel()).reshape(N, N)
        return np.fft.ifft(G, axis=0)

    def sparse(self) -> sp.csr_matrix:
        """The whole operator in the mode basis, modes in increasing order."""
        return sp.block_diag([self.blocks[k] for k in self.grid.modes], format="csr")


def build_operator(grid: NilGrid) -> NilOperator:
    return NilOperator(grid, {k: sector_operator(grid, k) for k in grid.modes})


@dataclass(frozen=True)
class SpectrumSample:
    """Sorted eigenvalues with solver diagnostics.

    ``trust_cutoff`` bounds the part of the spectrum that is complete.
    """

    eigenvalues: np.ndarray
    count_requested: int
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    iterations: int = 0
    trust_cutoff: float = np.inf
    source: str = "synthetic"

    def __post_init__(self):
        ev = np.sort(np.asarray(self.eigenvalues, dtype=float))
        object.__setattr__(self, "eigenvalues", ev)


def _sector_eigs(A: sp.csr_matrix, nreq: int, v0: np.ndarray):
    n = A.shape[0]
    nreq = min(nreq, n - 2)
    w, V = sla.eigsh(A.tocsc(), k=nreq, sigma=-1.0, which="LM", v0=v0)
    order = np.argsort(w)
    w, V = w[order], V[:, order]
    res = np.linalg.norm(A @ V - V * w, axis=0) / np.linalg.norm(V, axis=0)
    return w, res, nreq == n - 2


def _solve(op: NilOperator, stop, seed: int, start: int = 24):
    """Per-mode eigenvalues, enlarging each request until ``stop(w)`` says it is enough.

    Modes ``k`` and ``-k`` are complex conjugates and share a spectrum; only
    ``k >= 0`` and ``k = -N/2`` are solved.
    """
    N = op.grid.N
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(N * N) + 1j * rng.standard_normal(N * N)
    ev, res = [], []
    iterations = 0
    for k in op.grid.modes:
        if -N // 2 < k < 0:
            continue
        nreq = start
        while True:
            w, r, exhausted = _sector_eigs(op.blocks[k], nreq, v0)
            iterations += 1
            if exhausted or stop(w):
                break
            nreq *= 2
        copies = 2 if 0 < k < N // 2 else 1
        for _ in range(copies):
            ev.append(w)
            res.append(r)
    return np.concatenate(ev), np.concatenate(res), iterations


def eigenvalues_below(op: NilOperator, lam_max: float, seed: int = 0) -> SpectrumSample:
    """Every eigenvalue ``<= lam_max`` (all modes)."""
    w, r, it = _solve(op, lambda w: w[-1] > lam_max, seed)
    keep = w <= lam_max
    return _checked_sample(w[keep], r[keep], int(keep.sum()), it, op.grid)


def lowest_eigenvalues(op: NilOperator, count: int, seed: int = 0) -> SpectrumSample:
    """The ``count`` smallest eigenvalues of the whole operator."""
    if not 0 < count < op.dim // 4:
        raise PreconditionError(f"count={count} must be positive and well below dim={op.dim}", {"count": count})
    # grow a spectral threshold until it captures ``count`` eigenvalues
    lam = 8.0 * np.pi * op.grid.scale
    while True:
        sample = eigenvalues_below(op, lam, seed)
        if sample.eigenvalues.size >= count:
            break
        lam *= 1.5
    ev = sample.eigenvalues
    order = np.argsort(ev)[:count]
    return _checked_sample(ev[order], sample.residuals[order], count, sample.iterations, op.grid)


def _checked_sample(w, r, count, iterations, grid: NilGrid) -> SpectrumSample:
    bad = np.nonzero(r > RESIDUAL_TOL * np.maximum(1.0, np.abs(w)))[0]
    if bad.size:
        raise ConvergenceError(
            f"{bad.size} eigenpairs exceed the residual bound; worst {float(np.max(r)):.3e}"
        )
    if w.size and w.min() < -1e-8:
        raise ConvergenceError(f"negative eigenvalue {w.min():.3e} for a positive operator")
    order = np.argsort(w)
    return SpectrumSample(w[order], count, r[order], iterations, grid.trust_cutoff, f"grid N={grid.N}")


def torus_mode(grid: NilGrid, a: int, b: int) -> np.ndarray:
    """``exp(2 pi i (a x1 + b x2))`` on the grid, constant in ``x0``."""
    N = grid.N
    x = np.arange(N) / N
    m = np.exp(2j * np.pi * (a * x[:, None] + b * x[None, :]))
    return np.broadcast_to(m, (N, N, N)).copy()


def torus_eigenvalue(grid: NilGrid, a: int, b: int) -> float:
    """Exact discrete eigenvalue of :func:`torus_mode`; tends to ``scale * 4 pi^2 (a^2 + b^2)``."""
    h = grid.h
    return grid.scale * 4.0 / h ** 2 * (np.sin(np.pi * a * h) ** 2 + np.sin(np.pi * b * h) ** 2)


@dataclass(frozen=True)
class CountingFit:
    """Power-law fit ``N(lam) ~ constant * lam**exponent`` of a counting function.

    ``fixed_constant`` is the least-squares constant with the exponent pinned
    at ``fixed_exponent``.
    """

    exponent: float
    constant: float
    exponent_stderr: float
    constant_stderr: float
    fixed_exponent: float
    fixed_constant: float
    fixed_constant_stderr: float
    n_points: int
    window: Tuple[float, float]
    pre_asymptotic: bool


def fit_counting(s: SpectrumSample, window: Tuple[float, float], expected_exponent: float = 2.0) -> CountingFit:
    """Regress ``log N(lam)`` on ``log lam`` over eigenvalues inside ``window``.

    ``N`` at the ``i``-th eigenvalue (1-based, zero modes included) is ``i``.
    """
    lo, hi = float(window[0]), float(window[1])
    if not 0 < lo < hi:
        raise PreconditionError(f"window {window} must satisfy 0 < lo < hi", {"window": [lo, hi]})
    if hi > s.trust_cutoff:
        raise PreconditionError(
            f"window end {hi} above the resolved spectrum ({s.trust_cutoff:.4g})",
            {"window": [lo, hi], "trust_cutoff": s.trust_cutoff},
        )
    ev = s.eigenvalues
    counts = np.arange(1, ev.size + 1, dtype=float)
    sel = (ev >= lo) & (ev <= hi)
    if sel.sum() < MIN_FIT_POINTS:
        raise PreconditionError(
            f"only {int(sel.sum())} eigenvalues in window {window}; need {MIN_FIT_POINTS}",
            {"window": [lo, hi], "points": int(sel.sum())},
        )
    x, y = np.log(ev[sel]), np.log(counts[sel])
    reg = stats.linregress(x, y)
    constant = float(np.exp(reg.intercept))
    resid = y - expected_exponent * x
    fixed = float(np.exp(resid.mean()))
    fixed_se = float(fixed * resid.std(ddof=1) / np.sqrt(resid.size))
    pre = hi < ASYMPTOTIC_ONSET or abs(reg.slope - expected_exponent) > 0.1
    return CountingFit(
        float(reg.slope), constant, float(reg.stderr), float(constant * reg.intercept_stderr),
        float(expected_exponent), fixed, fixed_se, int(sel.sum()), (lo, hi), bool(pre),
    )


@dataclass(frozen=True)
class Extrapolation:
    """``c(N) = limit + slope / N**2`` fitted by least squares."""

    limit: float
    slope: float
    values: Tuple[float, ...]
    sizes: Tuple[int, ...]


def richardson(sizes: Sequence[int], values: Sequence[float]) -> Extrapolation:
    sizes = tuple(int(v) for v in sizes)
    values = tuple(float(v) for v in values)
    if len(sizes) < 2:
        raise PreconditionError("need at least two grid sizes", {"sizes": list(sizes)})
    X = np.vstack([np.ones(len(sizes)), 1.0 / np.asarray(sizes, dtype=float) ** 2]).T
    coef, *_ = np.linalg.lstsq(X, np.asarray(values), rcond=None)
    return Extrapolation(float(coef[0]), float(coef[1]), values, sizes)


def _run_grid(args):
    N, half, lam_max, seed = args
    op = build_operator(NilGrid(N, half))
    return eigenvalues_below(op, lam_max, seed)


@dataclass(frozen=True)
class NilcheckReport:
    sizes: Tuple[int, ...]
    counts: Tuple[int, ...]
    fits: Tuple[CountingFit, ...]
    free: Extrapolation
    fixed: Extrapolation
    candidates: Dict[str, float]
    deviations: Dict[str, float]
    adopted: Optional[str]
    samples: Tuple[SpectrumSample, ...] = field(repr=False, default=())

    def as_dict(self) -> dict:
        return {
            "sizes": list(self.sizes),
            "eigenvalue_counts": list(self.counts),
            "fits": [
                {"N": N, "exponent": f.exponent, "exponent_stderr": f.exponent_stderr,
                 "constant": f.constant, "fixed_constant": f.fixed_constant,
                 "points": f.n_points, "window": list(f.window), "pre_asymptotic": f.pre_asymptotic}
                for N, f in zip(self.sizes, self.fits)
            ],
            "extrapolated_constant": self.fixed.limit,
            "extrapolated_free_constant": self.free.limit,
            "candidates": dict(self.candidates),
            "relative_deviation": dict(self.deviations),
            "adopted": self.adopted,
        }


def adjudication_candidates() -> Dict[str, float]:
    """Predicted counting constant per unit Haar volume of the nilmanifold under each prefactor.

    The contact form annihilating ``X1, X2`` is ``dx0 - x2 dx1 + x1 dx2``, whose
    volume ``theta ^ d theta`` is twice the Haar volume.
    """
    from .weyl import sublaplacian_weyl

    rec = sublaplacian_weyl(1, 0.0, 1, 2.0, "pseudohermitian")
    return {k: rec.alternatives[k] for k in ("plus_n", "minus_n")}


def nilcheck(sizes: Iterable[int] = (24, 32, 48), window: Tuple[float, float] = (10.0, 65.0),
             seed: int = 0, workers: int = 1, tolerance: float = 0.10,
             lam_cap: float = 80.0) -> NilcheckReport:
    """Fit the Weyl law on several grids, extrapolate and compare with both prefactor branches.

    Each grid is solved up to ``min(trust cutoff, lam_cap)``; the fits use
    only ``window``. ``workers > 1`` solves the grids in separate processes.
    """
    sizes = tuple(sorted(int(N) for N in sizes))
    for N in sizes:
        cut = NilGrid(N).trust_cutoff
        if window[1] > cut:
            raise PreconditionError(
                f"window end {window[1]} above the trusted spectrum {cut:.4g} of N={N}",
                {"N": N, "trust_cutoff": cut},
            )
    jobs = [(N, True, max(float(window[1]), min(NilGrid(N).trust_cutoff, lam_cap)), seed) for N in sizes]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            samples = tuple(pool.map(_run_grid, jobs))
    else:
        samples = tuple(_run_grid(j) for j in jobs)
    fits = tuple(fit_counting(s, window) for s in samples)
    free = richardson(sizes, [f.constant for f in fits])
    fixed = richardson(sizes, [f.fixed_constant for f in fits])
    cands = adjudication_candidates()
    dev = {k: abs(fixed.limit - v) / v for k, v in cands.items()}
    best = min(dev, key=dev.get)
    adopted = best if dev[best] <= tolerance else None
    return NilcheckReport(sizes, tuple(s.eigenvalues.size for s in samples), fits, free, fixed,
                          cands, dev, adopted, samples)
