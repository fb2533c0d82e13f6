"""Helium-like ions with explicitly correlated Gaussians.

The singlet spatial wave function is expanded in symmetrized terms

    Phi_k = g_k(r1, r2) + g_k(r2, r1),  g_k = exp(-a_k r1^2 - b_k r2^2 - c_k r12^2),

i.e. g_k = exp(-x^T A_k x) with A_k = [[a+c, -c], [-c, b+c]] acting on the pair
(r1, r2). Every integral needed (overlap, kinetic, Coulomb, cross-basis
overlap, one-body density) has a closed form in terms of the 2x2 matrix
M = A_k + A_l:

    <g_k|g_l>         = pi^3 / det(M)^(3/2)
    <g_k|T|g_l>       = 3 tr(A_k M^-1 A_l) <g_k|g_l>
    <g_k|1/|w.x||g_l> = <g_k|g_l> * 2 sqrt(beta / pi),  beta = 1 / (w^T M^-1 w)

Hamiltonian (Hartree units): -1/2 grad_1^2 - 1/2 grad_2^2 - Z/r1 - Z/r2 + 1/r12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from . import numerics
from .metric import DensityProfile, OverlapValue

N_PARTICLES = 2
Z_MIN = 0.95
LINDEP_TOL = 1e-10
_SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])


class HeliumSolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class HeliumParams:
    Z: float = 2.0
    K: int = 32
    seed: int = 0
    #: number of stochastic refinement trials
    trials: int = 500
    repulsion: bool = True
    #: restrict to uncorrelated product terms (c = 0)
    correlated: bool = True

    def __post_init__(self):
        if not self.Z >= Z_MIN:
            raise ValueError(f"Z={self.Z} below the binding limit {Z_MIN}")
        if self.K < 1:
            raise ValueError("basis size must be at least 1")

    @property
    def n_particles(self) -> int:
        return N_PARTICLES


@dataclass(frozen=True)
class ECGBasis:
    """Exponent triples (a, b, c) of the unsymmetrized Gaussians."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a, b, c = (np.atleast_1d(np.asarray(x, dtype=float)) for x in (self.a, self.b, self.c))
        if not a.shape == b.shape == c.shape:
            raise ValueError("exponent arrays must have equal length")
        if np.any(a + c <= 0) or np.any(b + c <= 0) or np.any((a + c) * (b + c) <= c**2):
            raise ValueError("basis term is not positive definite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    def __len__(self):
        return self.a.size

    def matrices(self) -> np.ndarray:
        """A_k for every term, shape (K, 2, 2)."""
        out = np.empty((len(self), 2, 2))
        out[:, 0, 0] = self.a + self.c
        out[:, 1, 1] = self.b + self.c
        out[:, 0, 1] = out[:, 1, 0] = -self.c
        return out

    def swapped(self) -> "ECGBasis":
        return ECGBasis(self.b, self.a, self.c)

    def scaled(self, factor: float) -> "ECGBasis":
        return ECGBasis(self.a * factor, self.b * factor, self.c * factor)

    def prefix(self, k: int) -> "ECGBasis":
        return ECGBasis(self.a[:k], self.b[:k], self.c[:k])


@dataclass(frozen=True)
class MatrixElements:
    overlap: np.ndarray
    kinetic: np.ndarray
    nuclear: np.ndarray  # <1/r1 + 1/r2>, multiply by -Z
    repulsion: np.ndarray  # <1/r12>

    def hamiltonian(self, Z: float, repulsion: bool = True) -> np.ndarray:
        h = self.kinetic - Z * self.nuclear
        return h + self.repulsion if repulsion else h


def _pair_terms(A1: np.ndarray, A2: np.ndarray, with_operators: bool = True):
    """Primitive integrals for all pairs (k, l) of the two matrix stacks."""
    M = A1[:, None] + A2[None, :]
    det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] ** 2
    if np.any(det <= 0):
        raise ValueError("combined quadratic form is not positive definite")
    S = np.pi**3 / det**1.5
    if not with_operators:
        return S, None, None, None
    Minv = np.empty_like(M)
    Minv[..., 0, 0] = M[..., 1, 1] / det
    Minv[..., 1, 1] = M[..., 0, 0] / det
    Minv[..., 0, 1] = Minv[..., 1, 0] = -M[..., 0, 1] / det
    T = 3.0 * np.einsum("kij,kljm,lmi->kl", A1, Minv, A2) * S

    def coulomb(quad):
        return S * numerics.coulomb_expectation(1.0 / quad)

    V1 = coulomb(Minv[..., 0, 0]) + coulomb(Minv[..., 1, 1])
    V12 = coulomb(Minv[..., 0, 0] + Minv[..., 1, 1] - 2.0 * Minv[..., 0, 1])
    return S, T, V1, V12


def ecg_matrix_elements(bra: ECGBasis, ket: ECGBasis | None = None) -> MatrixElements:
    """Exchange-symmetrized matrix elements <Phi_k|O|Phi_l>.

    Since every operator commutes with particle exchange P, the four terms
    of <g_k + P g_k|O|g_l + P g_l> reduce to 2 (<g_k|O|g_l> + <g_k|O|P g_l>).
    """
    ket = bra if ket is None else ket
    A1, A2 = bra.matrices(), ket.matrices()
    direct = _pair_terms(A1, A2)
    exchange = _pair_terms(A1, _SWAP @ A2 @ _SWAP)
    return MatrixElements(*(2.0 * (d + e) for d, e in zip(direct, exchange)))


def cross_overlap(bra: ECGBasis, ket: ECGBasis) -> np.ndarray:
    A1, A2 = bra.matrices(), ket.matrices()
    return 2.0 * (_pair_terms(A1, A2, False)[0] + _pair_terms(A1, _SWAP @ A2 @ _SWAP, False)[0])


def generalized_lowest(H: np.ndarray, S: np.ndarray, tol: float = LINDEP_TOL):
    """Lowest root of H c = E S c after removing near-linear dependencies.

    The basis is first normalized, then S eigenvectors with eigenvalue below
    ``tol`` are dropped. Returns ``(E, c)`` with c^T S c = 1.
    """
    d = 1.0 / np.sqrt(np.diag(S))
    Sn = S * d[:, None] * d[None, :]
    Hn = H * d[:, None] * d[None, :]
    s, U = np.linalg.eigh(Sn)
    keep = s > tol
    if not np.any(keep):
        raise HeliumSolverError("basis collapse: every overlap eigenvector discarded")
    X = U[:, keep] / np.sqrt(s[keep])
    Hp = X.T @ Hn @ X
    e, y = scipy.linalg.eigh(0.5 * (Hp + Hp.T), subset_by_index=(0, 0))
    c = d * (X @ y[:, 0])
    return float(e[0]), c


@dataclass(frozen=True)
class HeliumState:
    params: HeliumParams
    basis: ECGBasis
    coefficients: np.ndarray
    energy: float
    kinetic: float
    potential: float

    @property
    def n_particles(self) -> int:
        return N_PARTICLES

    @property
    def virial_ratio(self) -> float:
        return self.potential / self.kinetic

    def prefix_energy(self, k: int) -> float:
        """Energy obtained from the first k basis terms alone."""
        sub = self.basis.prefix(k)
        me = ecg_matrix_elements(sub)
        return generalized_lowest(me.hamiltonian(self.params.Z, self.params.repulsion), me.overlap)[0]


def tempered_basis(Z: float, K: int, correlated: bool = True) -> ECGBasis:
    """Quasi-random tempered exponents; the first k terms of size K are the
    basis of size k.

    a and b run geometrically over [Z^2/100, 100 Z^2], c over [1/100, 10],
    with positions drawn from Kronecker sequences of irrational strides.
    """
    k = np.arange(1, K + 1)
    frac = lambda stride: np.mod(k * stride, 1.0)  # noqa: E731
    a = Z**2 * 10.0 ** (-2.0 + 4.0 * frac(math.sqrt(2.0)))
    b = Z**2 * 10.0 ** (-2.0 + 4.0 * frac(math.sqrt(3.0)))
    c = 10.0 ** (-2.0 + 3.0 * frac(math.sqrt(5.0))) if correlated else np.zeros(K)
    return ECGBasis(a, b, c)


def _solve_in_basis(basis: ECGBasis, params: HeliumParams):
    me = ecg_matrix_elements(basis)
    H = me.hamiltonian(params.Z, params.repulsion)
    E, c = generalized_lowest(H, me.overlap)
    return E, c, me


def _energy(basis: ECGBasis, params: HeliumParams) -> float:
    try:
        return _solve_in_basis(basis, params)[0]
    except (ValueError, HeliumSolverError, np.linalg.LinAlgError):
        return math.inf


def refine(basis: ECGBasis, params: HeliumParams) -> ECGBasis:
    """Seeded stochastic replacement of single terms, kept only if the
    energy strictly decreases."""
    rng = np.random.default_rng(params.seed)
    Z2 = params.Z**2
    a, b, c = basis.a.copy(), basis.b.copy(), basis.c.copy()
    best = _energy(basis, params)
    for _ in range(params.trials):
        j = rng.integers(len(a))
        x = rng.random(3)
        trial = (
            Z2 * 10.0 ** (-2.0 + 4.0 * x[0]),
            Z2 * 10.0 ** (-2.0 + 4.0 * x[1]),
            10.0 ** (-2.0 + 3.0 * x[2]) if params.correlated else 0.0,
        )
        old = (a[j], b[j], c[j])
        a[j], b[j], c[j] = trial
        e = _energy(ECGBasis(a, b, c), params)
        if e < best:
            best = e
        else:
            a[j], b[j], c[j] = old
    return ECGBasis(a, b, c)


def _expectations(me: MatrixElements, coeffs: np.ndarray, Z: float, repulsion: bool):
    T = float(coeffs @ me.kinetic @ coeffs)
    V = float(coeffs @ (-Z * me.nuclear) @ coeffs)
    if repulsion:
        V += float(coeffs @ me.repulsion @ coeffs)
    return T, V


def solve_helium(params: HeliumParams, scale_iterations: int = 3) -> HeliumState:
    """Variational ground state in a refined, virial-scaled ECG basis.

    After refinement the whole basis is rescaled by (V / 2T)^2, the optimal
    uniform scaling for a Coulomb Hamiltonian, and re-solved.
    """
    basis = refine(tempered_basis(params.Z, params.K, params.correlated), params)
    for _ in range(scale_iterations + 1):
        E, coeffs, me = _solve_in_basis(basis, params)
        T, V = _expectations(me, coeffs, params.Z, params.repulsion)
        eta = (V / (2.0 * T)) ** 2
        trial = basis.scaled(eta)
        if _energy(trial, params) >= E:
            break
        basis = trial
    E, coeffs, me = _solve_in_basis(basis, params)
    T, V = _expectations(me, coeffs, params.Z, params.repulsion)
    # psi(0, 0) = 2 sum_k c_k must be positive for a nodeless ground state
    if coeffs.sum() < 0:
        coeffs = -coeffs
    return HeliumState(params, basis, coeffs, E, T, V)


def helium_overlap(s1: HeliumState, s2: HeliumState) -> OverlapValue:
    if s1 is s2:
        return OverlapValue(1.0)
    value = float(s1.coefficients @ cross_overlap(s1.basis, s2.basis) @ s2.coefficients)
    if abs(value) > 1.0 and abs(value) - 1.0 < 1e-10:
        value = math.copysign(1.0, value)
    return OverlapValue.from_complex(value)


def helium_density(state: HeliumState, grid: numerics.Grid1D, norm_tol: float = 1e-8) -> DensityProfile:
    """rho(r) = 2 int |psi(r, r2)|^2 d^3 r2 in closed form.

    Integrating exp(-x^T M x) over r2 leaves (pi/m22)^(3/2) exp(-det(M)/m22 r^2).
    """
    A = state.basis.matrices()
    PAP = _SWAP @ A @ _SWAP
    r2 = grid.nodes**2
    c = state.coefficients
    rho = np.zeros_like(r2)
    for left in (A, PAP):
        for right in (A, PAP):
            M = left[:, None] + right[None, :]
            det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] ** 2
            m22 = M[..., 1, 1]
            amp = (c[:, None] * c[None, :] * (np.pi / m22) ** 1.5).ravel()
            rate = (det / m22).ravel()
            rho += np.exp(-np.outer(r2, rate)) @ amp
    rho *= N_PARTICLES
    rho = np.maximum(rho, 0.0)
    total = float(np.dot(4.0 * np.pi * grid.nodes**2 * grid.weights, rho))
    if abs(total - N_PARTICLES) > 1e-4:
        raise HeliumSolverError(f"density integrates to {total}, grid too coarse")
    return DensityProfile.on_radial_grid(N_PARTICLES, rho, grid, norm_tol=norm_tol)


def default_density_grid(charges) -> numerics.Grid1D:
    z = np.asarray(list(charges), dtype=float)
    return numerics.radial_grid(r_max=60.0 / max(float(z.min()) - 0.8, 0.15) ** 0.5, r_first=1e-3 / float(z.max()))


def with_seed(params: HeliumParams, seed: int) -> HeliumParams:
    return replace(params, seed=seed)
