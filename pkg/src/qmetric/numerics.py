"""Shared numerical kernels: quadrature grids, symmetric eigensolvers,
least-squares fitting and Gaussian-Coulomb integrals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
import scipy.special

#: Dimension above which :func:`lowest_eigenpairs` switches to Lanczos.
DENSE_LIMIT = 1000


class ConvergenceError(RuntimeError):
    """An iterative solver stopped before meeting its tolerance."""

    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(f"{message} (iterations={iterations}, residual={residual:.3e})")
        self.iterations = iterations
        self.residual = residual


@dataclass(frozen=True)
class Grid1D:
    """Quadrature nodes and positive weights on a closed interval ``[a, b]``."""

    nodes: np.ndarray
    weights: np.ndarray
    a: float
    b: float

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise ValueError("nodes and weights must be 1-D arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if nodes.size and (nodes[0] < self.a or nodes[-1] > self.b):
            raise ValueError("nodes must lie inside [a, b]")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.size

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))

    def same_as(self, other: "Grid1D") -> bool:
        return (
            len(self) == len(other)
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )


def gauss_legendre(n: int, a: float, b: float) -> Grid1D:
    """n-point Gauss-Legendre rule on [a, b], exact to polynomial degree 2n-1."""
    if n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    if not a < b:
        raise ValueError(f"empty interval [{a}, {b}]")
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return Grid1D(half * x + 0.5 * (a + b), half * w, float(a), float(b))


def composite_gauss_legendre(breakpoints: Sequence[float], n_per_panel: int) -> Grid1D:
    """Gauss-Legendre rule applied panel-wise between consecutive breakpoints."""
    edges = np.asarray(breakpoints, dtype=float)
    if edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("breakpoints must be strictly increasing, at least two")
    panels = [gauss_legendre(n_per_panel, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])]
    return Grid1D(
        np.concatenate([p.nodes for p in panels]),
        np.concatenate([p.weights for p in panels]),
        float(edges[0]),
        float(edges[-1]),
    )


def radial_grid(r_max: float, r_first: float = 1e-3, n_per_panel: int = 24) -> Grid1D:
    """Composite rule on [0, r_max] with geometrically growing panels.

    Resolves structure on length scales from ``r_first`` up to ``r_max``,
    which lets one grid serve states whose sizes differ by orders of magnitude.
    """
    if not 0 < r_first < r_max:
        raise ValueError("need 0 < r_first < r_max")
    n_panels = int(math.ceil(math.log2(r_max / r_first)))
    edges = [0.0] + [r_first * 2.0**k for k in range(n_panels)] + [r_max]
    edges = sorted(set(e for e in edges if e <= r_max))
    return composite_gauss_legendre(edges, n_per_panel)


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray


def fix_sign(vector: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component positive (first one on ties)."""
    idx = int(np.argmax(np.abs(vector)))
    return -vector if vector[idx] < 0 else vector


def eigh_lowest(matrix, k: int = 1) -> list[EigenPair]:
    """The k algebraically smallest eigenpairs of a real symmetric matrix.

    ``matrix`` is either a dense square array or a ``(diagonal, off_diagonal)``
    pair describing a symmetric tridiagonal matrix.
    """
    if isinstance(matrix, tuple):
        diag, off = (np.asarray(m, dtype=float) for m in matrix)
        order = diag.size
        if off.size != order - 1:
            raise ValueError("off-diagonal must have length order-1")
        if not 1 <= k <= order:
            raise ValueError(f"k={k} outside [1, {order}]")
        values, vectors = scipy.linalg.eigh_tridiagonal(
            diag, off, select="i", select_range=(0, k - 1)
        )
    else:
        a = np.asarray(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix has non-finite entries")
        order = a.shape[0]
        if not 1 <= k <= order:
            raise ValueError(f"k={k} outside [1, {order}]")
        values, vectors = scipy.linalg.eigh(a, subset_by_index=(0, k - 1))
    return [EigenPair(float(values[j]), fix_sign(vectors[:, j])) for j in range(k)]


def _lanczos_single(apply, dim, start, locked, max_iter, tol):
    """Lowest Ritz pair of ``apply`` restricted to the complement of ``locked``."""

    def project(w):
        for _ in range(2):
            for u in locked:
                w = w - np.dot(u, w) * u
        return w

    v = project(start)
    v /= np.linalg.norm(v)
    basis = [v]
    alphas, betas = [], []
    w = apply(v)
    scale = 1.0
    residual = np.inf
    m = min(max_iter, dim - len(locked))
    theta, s = None, None
    for j in range(m):
        alpha = float(np.dot(basis[j], w))
        alphas.append(alpha)
        w = w - alpha * basis[j]
        if j > 0:
            w = w - betas[-1] * basis[j - 1]
        # full reorthogonalization, twice is enough
        Q = np.array(basis)
        for _ in range(2):
            w = w - Q.T @ (Q @ w)
        w = project(w)
        beta = float(np.linalg.norm(w))
        scale = max(scale, abs(alpha), beta)
        if j % 5 == 4 or j == m - 1 or beta < 1e-14 * scale:
            evals, evecs = scipy.linalg.eigh_tridiagonal(
                np.array(alphas), np.array(betas), select="i", select_range=(0, 0)
            )
            theta, s = float(evals[0]), evecs[:, 0]
            residual = abs(beta * s[-1])
            if residual <= tol * scale or beta < 1e-14 * scale:
                Q = np.array(basis)
                vec = Q.T @ s
                return theta, vec / np.linalg.norm(vec), j + 1, residual
        if j == m - 1:
            break
        betas.append(beta)
        v = w / beta
        basis.append(v)
        w = apply(v)
    raise ConvergenceError("Lanczos did not converge", len(alphas), residual)


def lanczos_lowest(
    apply: Callable[[np.ndarray], np.ndarray],
    dim: int,
    k: int = 1,
    seed: int = 0,
    max_iter: int = 500,
    tol: float = 1e-11,
) -> list[EigenPair]:
    """Lowest k eigenpairs of a symmetric operator given only its action.

    Each pair is found by a fully reorthogonalized Lanczos run inside the
    orthogonal complement of the pairs already locked, so degenerate
    eigenvalues are recovered with an orthonormal eigenbasis.
    """
    if not 1 <= k <= dim:
        raise ValueError(f"k={k} outside [1, {dim}]")
    rng = np.random.default_rng(seed)
    locked: list[np.ndarray] = []
    pairs: list[EigenPair] = []
    for _ in range(k):
        start = rng.standard_normal(dim)
        value, vector, _, _ = _lanczos_single(apply, dim, start, locked, max_iter, tol)
        locked.append(vector)
        pairs.append(EigenPair(value, vector))
    # a locked pair can converge onto a higher level first; reorder by value
    subspace = np.array([p.vector for p in pairs])
    projected = subspace @ np.array([apply(p.vector) for p in pairs]).T
    values, rot = np.linalg.eigh(0.5 * (projected + projected.T))
    vectors = rot.T @ subspace
    return [EigenPair(float(values[j]), fix_sign(vectors[j])) for j in range(k)]


def lowest_eigenpairs(matrix, k: int = 1, seed: int = 0) -> list[EigenPair]:
    """Dense solve for small matrices, Lanczos above :data:`DENSE_LIMIT`.

    ``matrix`` may be a dense array or a scipy sparse matrix.
    """
    dim = matrix.shape[0]
    if dim <= DENSE_LIMIT:
        dense = matrix.toarray() if hasattr(matrix, "toarray") else matrix
        return eigh_lowest(dense, k)
    return lanczos_lowest(matrix.dot, dim, k, seed=seed)


def linear_fit(points) -> tuple[float, float, float]:
    """Ordinary least squares line through (x, y) pairs.

    Returns ``(slope, intercept, r_squared)``; ``r_squared`` is clipped to
    [0, 1] and reported as 1 when the data have no y-variance.
    """
    xy = np.asarray(points, dtype=float)
    if xy.ndim != 2 or xy.shape[1] != 2 or xy.shape[0] < 2:
        raise ValueError("need at least two (x, y) pairs")
    x, y = xy[:, 0], xy[:, 1]
    dx = x - x.mean()
    sxx = float(np.dot(dx, dx))
    if sxx <= 1e-300 or np.ptp(x) == 0:
        raise ValueError("x values have no variance")
    slope = float(np.dot(dx, y - y.mean()) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(y - y.mean(), y - y.mean()))
    if ss_tot <= 1e-24 * float(np.dot(y, y)):
        return slope, intercept, 1.0
    r2 = 1.0 - ss_res / ss_tot
    return slope, intercept, float(min(1.0, max(0.0, r2)))


def gaussian_coulomb(alpha):
    """Integral of exp(-alpha r^2) / r over all of 3-D space, 2 pi / alpha."""
    arr = np.asarray(alpha, dtype=float)
    if not np.all(arr > 0):
        raise ValueError(f"alpha must be positive, got {alpha}")
    out = 2.0 * np.pi / arr
    return out if out.ndim else float(out)


def coulomb_expectation(beta):
    """<1/r> in the normalized 3-D Gaussian density proportional to exp(-beta r^2).

    Equal to gaussian_coulomb(beta) / (pi/beta)^(3/2) = 2 sqrt(beta/pi).
    """
    beta = np.asarray(beta, dtype=float)
    return gaussian_coulomb(beta) / (np.pi / beta) ** 1.5


def boys_f0(t):
    """Boys function F0(t) = int_0^1 exp(-t u^2) du = sqrt(pi/t) erf(sqrt t) / 2.

    This is the error-function kernel of two-center Gaussian Coulomb
    integrals; a Taylor series is used near t = 0.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("Boys function argument must be non-negative")
    out = np.empty_like(t)
    small = t < 1e-2
    ts = t[small]
    # sum_k (-t)^k / (k! (2k+1)); 10 terms reach 1e-16 for t < 1e-2
    series = np.zeros_like(ts)
    term = np.ones_like(ts)
    for k in range(10):
        series += term / (2 * k + 1)
        term = term * (-ts) / (k + 1)
    out[small] = series
    tl = t[~small]
    out[~small] = 0.5 * np.sqrt(np.pi / tl) * scipy.special.erf(np.sqrt(tl))
    return out if out.ndim else float(out)
