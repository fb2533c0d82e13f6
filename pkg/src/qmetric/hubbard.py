"""Exact diagonalization of the open 1-D Hubbard chain in a parabolic trap.

    H = -t sum_{i,s} (c+_{i s} c_{i+1 s} + h.c.) + U sum_i n_{i up} n_{i dn}
        + sum_i v_i (n_{i up} + n_{i dn}),     v_i = omega (i - (L+1)/2)^2

Sites are numbered 1..L and stored as bits 0..L-1 of an occupation mask.
Basis states are (up mask, down mask) pairs in lexicographic order, so the
Hamiltonian factorizes as T_up (x) 1 + 1 (x) T_dn + diagonal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np
import scipy.sparse as sp

from . import numerics
from .metric import DensityProfile, OverlapValue

#: Relative energy gap below which the ground state is flagged degenerate.
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class HubbardParams:
    L: int = 8
    n_up: int = 1
    n_down: int = 1
    t: float = 1.0
    U: float = 0.0
    omega: float = 0.0

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("need at least two sites")
        if not (0 <= self.n_up <= self.L and 0 <= self.n_down <= self.L):
            raise ValueError(f"occupations ({self.n_up}, {self.n_down}) do not fit on {self.L} sites")
        if self.n_up + self.n_down < 1:
            raise ValueError("need at least one particle")
        if self.t < 0:
            raise ValueError("hopping t must be non-negative")
        if self.omega < 0:
            raise ValueError("trap frequency must be non-negative")

    @property
    def n_particles(self) -> int:
        return self.n_up + self.n_down

    @property
    def sector(self) -> tuple[int, int, int]:
        return (self.L, self.n_up, self.n_down)

    def trap(self) -> np.ndarray:
        i = np.arange(1, self.L + 1, dtype=float)
        return self.omega * (i - 0.5 * (self.L + 1)) ** 2


def _masks(L: int, n: int) -> np.ndarray:
    masks = [sum(1 << b for b in bits) for bits in itertools.combinations(range(L), n)]
    return np.array(sorted(masks), dtype=np.int64)


@dataclass(frozen=True)
class FockBasis:
    L: int
    up: np.ndarray
    down: np.ndarray

    @property
    def dim(self) -> int:
        return self.up.size * self.down.size

    def pairs(self) -> list[tuple[int, int]]:
        return [(int(u), int(d)) for u in self.up for d in self.down]

    def occupations(self, masks: np.ndarray) -> np.ndarray:
        """0/1 matrix of shape (len(masks), L)."""
        return ((masks[:, None] >> np.arange(self.L)) & 1).astype(float)


def enumerate_basis(L: int, n_up: int, n_down: int) -> FockBasis:
    if not (0 <= n_up <= L and 0 <= n_down <= L):
        raise ValueError(f"occupations ({n_up}, {n_down}) do not fit on {L} sites")
    basis = FockBasis(L, _masks(L, n_up), _masks(L, n_down))
    assert basis.dim == comb(L, n_up) * comb(L, n_down)
    return basis


def _hopping_block(L: int, masks: np.ndarray, t: float) -> sp.csr_matrix:
    """Nearest-neighbour hopping for one spin species with fermionic signs."""
    index = {int(m): k for k, m in enumerate(masks)}
    rows, cols, vals = [], [], []
    for k, m in enumerate(masks):
        m = int(m)
        for i in range(L - 1):
            j = i + 1
            if ((m >> i) & 1) == ((m >> j) & 1):
                continue
            new = m ^ ((1 << i) | (1 << j))
            # occupied orbitals strictly between i and j; zero for neighbours
            between = bin(m & (((1 << j) - 1) ^ ((1 << (i + 1)) - 1))).count("1")
            rows.append(index[new])
            cols.append(k)
            vals.append(-t * (-1) ** between)
    n = masks.size
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def build_hamiltonian(params: HubbardParams, basis: FockBasis | None = None) -> sp.csr_matrix:
    """Sparse real symmetric Hamiltonian of one (n_up, n_down) sector."""
    if basis is None:
        basis = enumerate_basis(*params.sector)
    nu, nd = basis.up.size, basis.down.size
    t_up = _hopping_block(params.L, basis.up, params.t)
    t_dn = _hopping_block(params.L, basis.down, params.t)
    hop = sp.kron(t_up, sp.identity(nd), format="csr") + sp.kron(sp.identity(nu), t_dn, format="csr")

    occ_up = basis.occupations(basis.up)
    occ_dn = basis.occupations(basis.down)
    v = params.trap()
    double = occ_up @ occ_dn.T  # number of doubly occupied sites per (u, d)
    diag = params.U * double + (occ_up @ v)[:, None] + (occ_dn @ v)[None, :]
    return (hop + sp.diags(diag.ravel())).tocsr()


@dataclass(frozen=True)
class LatticeGroundState:
    params: HubbardParams
    energy: float
    coefficients: np.ndarray
    degenerate: bool = False
    #: orthonormal basis of the ground manifold, shape (multiplicity, dim)
    manifold: np.ndarray | None = None

    @property
    def n_particles(self) -> int:
        return self.params.n_particles


def ground_state(params: HubbardParams, n_check: int = 4, seed: int = 0) -> LatticeGroundState:
    """Lowest eigenstate; the next levels are computed to detect degeneracy.

    If the lowest ``n_check`` levels are all degenerate, more are requested
    until the multiplicity is resolved.
    """
    basis = enumerate_basis(*params.sector)
    h = build_hamiltonian(params, basis)
    k = min(n_check, basis.dim)
    while True:
        pairs = numerics.lowest_eigenpairs(h, k, seed=seed)
        e0 = pairs[0].value
        tol = DEGENERACY_TOL * max(1.0, abs(e0))
        mult = sum(1 for p in pairs if p.value - e0 < tol)
        if mult < k or k == basis.dim:
            break
        k = min(2 * k, basis.dim)
    manifold = np.array([p.vector for p in pairs[:mult]])
    return LatticeGroundState(params, e0, pairs[0].vector, mult > 1, manifold)


def site_density(gs: LatticeGroundState) -> DensityProfile:
    """<n_i> summed over spin.

    For a degenerate ground state the density is averaged over the whole
    ground manifold, which is independent of the representative chosen.
    """
    basis = enumerate_basis(*gs.params.sector)
    nu, nd = basis.up.size, basis.down.size
    vectors = gs.manifold if gs.manifold is not None else gs.coefficients[None, :]
    prob = (vectors**2).reshape(len(vectors), nu, nd).mean(axis=0)
    rho = prob.sum(axis=1) @ basis.occupations(basis.up) + prob.sum(axis=0) @ basis.occupations(basis.down)
    return DensityProfile.on_lattice(rho)


def lattice_overlap(gs1: LatticeGroundState, gs2: LatticeGroundState) -> OverlapValue:
    if gs1.params.sector != gs2.params.sector:
        raise ValueError(f"sector mismatch: {gs1.params.sector} vs {gs2.params.sector}")
    if gs1 is gs2:
        return OverlapValue(1.0)
    return OverlapValue.from_complex(float(np.dot(gs1.coefficients, gs2.coefficients)))


def single_particle_levels(params: HubbardParams) -> np.ndarray:
    """Eigenvalues of the L x L one-body matrix (hopping plus trap)."""
    off = -params.t * np.ones(params.L - 1)
    return np.sort(np.linalg.eigvalsh(np.diag(params.trap()) + np.diag(off, 1) + np.diag(off, -1)))
