import math
from itertools import product

import numpy as np
import pytest

from qmetric import hubbard, numerics
from qmetric.hubbard import HubbardParams


def dimer_energy(U, t=1.0):
    return U / 2 - math.sqrt((U / 2) ** 2 + 4 * t**2)


class TestBasis:
    @pytest.mark.parametrize("args,dim", [((2, 1, 1), 4), ((8, 4, 4), 4900), ((8, 1, 1), 64)])
    def test_dimension(self, args, dim):
        assert hubbard.enumerate_basis(*args).dim == dim

    def test_complete_and_ordered(self):
        b = hubbard.enumerate_basis(5, 2, 3)
        pairs = b.pairs()
        assert len(set(pairs)) == len(pairs) == b.dim
        assert pairs == sorted(pairs)
        assert all(bin(u).count("1") == 2 and bin(d).count("1") == 3 for u, d in pairs)

    def test_rejects_overfull(self):
        with pytest.raises(ValueError):
            hubbard.enumerate_basis(3, 4, 0)
        with pytest.raises(ValueError):
            HubbardParams(L=3, n_up=4)


class TestHamiltonian:
    def test_two_site_one_particle(self):
        h = hubbard.build_hamiltonian(HubbardParams(L=2, n_up=1, n_down=0, U=0.0))
        assert np.allclose(np.linalg.eigvalsh(h.toarray()), [-1, 1])

    @pytest.mark.parametrize("sector", [(6, 2, 3), (7, 3, 3), (5, 1, 4)])
    def test_exactly_symmetric(self, sector):
        L, nu, nd = sector
        h = hubbard.build_hamiltonian(HubbardParams(L=L, n_up=nu, n_down=nd, U=3.3, omega=0.7))
        assert abs(h - h.T).max() == 0.0

    def test_diagonal_limit(self):
        p = HubbardParams(L=7, n_up=2, n_down=1, t=0.0, U=0.0, omega=0.5)
        v = np.sort(p.trap())
        gs = hubbard.ground_state(p)
        # two up electrons in the two lowest sites, the down one in the lowest
        assert gs.energy == pytest.approx(v[0] + v[1] + v[0], abs=1e-12)

    def test_against_second_quantization(self):
        """Dense many-body matrix built from explicit fermion operators."""
        L, nu, nd = 3, 2, 1
        p = HubbardParams(L=L, n_up=nu, n_down=nd, U=2.5, omega=0.4)
        ref = _jordan_wigner_hamiltonian(p)
        basis = hubbard.enumerate_basis(L, nu, nd)
        idx = [_fock_index(L, u, d) for u, d in basis.pairs()]
        block = ref[np.ix_(idx, idx)]
        assert np.allclose(hubbard.build_hamiltonian(p).toarray(), block, atol=1e-14)


def _fock_index(L, up, down):
    # orbital ordering: up sites 0..L-1, then down sites; bit k of the index = orbital k
    return up | (down << L)


def _jordan_wigner_hamiltonian(p: HubbardParams) -> np.ndarray:
    n_orb = 2 * p.L
    dim = 2**n_orb

    def annihilate(k):
        a = np.zeros((dim, dim))
        for s in range(dim):
            if (s >> k) & 1:
                sign = (-1) ** bin(s & ((1 << k) - 1)).count("1")
                a[s ^ (1 << k), s] = sign
        return a

    c = [annihilate(k) for k in range(n_orb)]
    n = [ck.T @ ck for ck in c]
    h = np.zeros((dim, dim))
    v = p.trap()
    for spin in (0, 1):
        for i in range(p.L - 1):
            a, b = spin * p.L + i, spin * p.L + i + 1
            h -= p.t * (c[a].T @ c[b] + c[b].T @ c[a])
        for i in range(p.L):
            h += v[i] * n[spin * p.L + i]
    for i in range(p.L):
        h += p.U * n[i] @ n[p.L + i]
    return h


class TestGroundState:
    @pytest.mark.parametrize("U", [0.0, 2.0, 6.0])
    def test_dimer(self, U):
        gs = hubbard.ground_state(HubbardParams(L=2, n_up=1, n_down=1, U=U))
        assert abs(gs.energy - dimer_energy(U)) < 1e-12

    def test_open_chain_free(self):
        gs = hubbard.ground_state(HubbardParams(L=8, n_up=1, n_down=1, U=0.0))
        assert gs.energy == pytest.approx(-4 * math.cos(math.pi / 9), abs=1e-12)

    @pytest.mark.parametrize("nu,nd", [(1, 1), (2, 1), (2, 2), (3, 1), (3, 3), (4, 4)])
    def test_free_fermion_sum(self, nu, nd):
        p = HubbardParams(L=8, n_up=nu, n_down=nd, U=0.0, omega=0.3)
        eps = hubbard.single_particle_levels(p)
        assert abs(hubbard.ground_state(p).energy - (eps[:nu].sum() + eps[:nd].sum())) < 1e-10

    def test_energy_increases_with_u(self):
        energies = [hubbard.ground_state(HubbardParams(L=6, n_up=2, n_down=2, U=U, omega=0.5)).energy for U in (0, 2, 4, 6, 8)]
        assert all(b > a for a, b in zip(energies, energies[1:]))

    def test_residual_and_norm(self):
        p = HubbardParams(L=8, n_up=2, n_down=2, U=2.0, omega=1.0)
        gs = hubbard.ground_state(p)
        h = hubbard.build_hamiltonian(p)
        assert np.linalg.norm(gs.coefficients) == pytest.approx(1.0, abs=1e-10)
        assert np.linalg.norm(h @ gs.coefficients - gs.energy * gs.coefficients) <= 1e-9 * max(1, abs(gs.energy))
        assert not gs.degenerate

    def test_large_sector_uses_lanczos(self):
        p = HubbardParams(L=8, n_up=4, n_down=4, U=2.0, omega=4.0)
        assert hubbard.enumerate_basis(*p.sector).dim > numerics.DENSE_LIMIT
        gs = hubbard.ground_state(p)
        h = hubbard.build_hamiltonian(p)
        assert np.linalg.norm(h @ gs.coefficients - gs.energy * gs.coefficients) <= 1e-9 * abs(gs.energy)

    def test_degenerate_flag(self):
        p = HubbardParams(L=8, n_up=1, n_down=1, t=0.0, U=0.0, omega=1.0)
        gs = hubbard.ground_state(p)
        assert gs.degenerate
        assert gs.manifold.shape[0] == 4


class TestDensity:
    def test_dimer_symmetric(self):
        for U in (0.0, 3.0):
            rho = hubbard.site_density(hubbard.ground_state(HubbardParams(L=2, n_up=1, n_down=1, U=U)))
            assert np.allclose(rho.values, [1, 1], atol=1e-12)

    def test_diagonal_limit_odd_chain(self):
        p = HubbardParams(L=7, n_up=1, n_down=1, t=0.0, U=0.0, omega=1.0)
        rho = hubbard.site_density(hubbard.ground_state(p)).values
        assert rho[3] == pytest.approx(2.0, abs=1e-12)

    def test_diagonal_limit_even_chain_splits(self):
        p = HubbardParams(L=8, n_up=1, n_down=1, t=0.0, U=0.0, omega=1.0)
        rho = hubbard.site_density(hubbard.ground_state(p)).values
        assert np.allclose(rho, [0, 0, 0, 1, 1, 0, 0, 0], atol=1e-12)

    @pytest.mark.parametrize("nu,nd,U,omega", list(product([1, 2, 4], [1, 2], [2.0, 6.0], [0.0, 1.0, 4.0])))
    def test_normalized_and_reflection_symmetric(self, nu, nd, U, omega):
        gs = hubbard.ground_state(HubbardParams(L=8, n_up=nu, n_down=nd, U=U, omega=omega))
        rho = hubbard.site_density(gs).values
        assert abs(rho.sum() - (nu + nd)) < 1e-10
        if not gs.degenerate:
            assert np.allclose(rho, rho[::-1], atol=1e-10)


class TestOverlap:
    def test_self(self):
        gs = hubbard.ground_state(HubbardParams(L=6, n_up=2, n_down=2, U=2.0, omega=1.0))
        assert hubbard.lattice_overlap(gs, gs).modulus == 1.0

    def test_recomputed_reference(self):
        p = HubbardParams(L=8, n_up=1, n_down=1, U=2.0, omega=4.0)
        s = hubbard.lattice_overlap(hubbard.ground_state(p), hubbard.ground_state(p))
        assert abs(s.modulus - 1) < 1e-10
        assert s.phase == 0.0

    def test_confinement_change(self):
        a = hubbard.ground_state(HubbardParams(L=8, n_up=1, n_down=1, U=2.0, omega=4.0))
        b = hubbard.ground_state(HubbardParams(L=8, n_up=1, n_down=1, U=2.0, omega=0.1))
        s = hubbard.lattice_overlap(a, b)
        assert 0 < s.modulus < 1
        assert s.phase in (0.0, math.pi)

    def test_sector_mismatch(self):
        a = hubbard.ground_state(HubbardParams(L=4, n_up=1, n_down=1))
        b = hubbard.ground_state(HubbardParams(L=4, n_up=2, n_down=1))
        with pytest.raises(ValueError):
            hubbard.lattice_overlap(a, b)


@pytest.mark.slow
def test_half_filled_sector_dense_agrees_with_lanczos():
    p = HubbardParams(L=8, n_up=4, n_down=4, U=6.0, omega=0.05)
    h = hubbard.build_hamiltonian(p)
    dense = numerics.eigh_lowest(h.toarray(), 1)[0]
    assert abs(hubbard.ground_state(p).energy - dense.value) < 1e-8
