"""Hooke's atom: two electrons in an isotropic harmonic trap.

    H = -1/2 grad_1^2 - 1/2 grad_2^2 + 1/2 omega^2 (r_1^2 + r_2^2) + 1/|r_1 - r_2|

separates exactly into a centre-of-mass oscillator (mass 2, ground state
exp(-omega R^2), energy 3 omega / 2) and a relative s-wave problem

    -u'' + (omega^2 r^2 / 4 + 1/r) u = eps u,     u(0) = u(r_max) = 0,

solved here by central finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from . import numerics
from .metric import DensityProfile, OverlapValue

N_PARTICLES = 2


class HookeSolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class HookeParams:
    omega: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    @property
    def n_particles(self) -> int:
        return N_PARTICLES


@dataclass(frozen=True)
class RadialSolution:
    """u(r) = r * phi_rel(r) on the interior nodes of a uniform grid."""

    r: np.ndarray
    u: np.ndarray
    r_max: float

    @property
    def h(self) -> float:
        return self.r_max / (self.r.size + 1)

    def spline(self) -> CubicSpline:
        r = np.concatenate([[0.0], self.r, [self.r_max]])
        u = np.concatenate([[0.0], self.u, [0.0]])
        return CubicSpline(r, u)

    def moment(self, power: float) -> float:
        return float(self.h * np.sum(self.u**2 * self.r**power))


@dataclass(frozen=True)
class HookeState:
    params: HookeParams
    epsilon_rel: float
    rel: RadialSolution
    #: change in epsilon_rel when the grid is doubled
    refinement_delta: float = 0.0

    @property
    def cm_exponent(self) -> float:
        return self.params.omega

    @property
    def energy(self) -> float:
        return 1.5 * self.params.omega + self.epsilon_rel

    @property
    def n_particles(self) -> int:
        return N_PARTICLES


def default_r_max(omega: float) -> float:
    return 12.0 / math.sqrt(omega)


def _fd_solve(omega, r_max, n_points, coulomb):
    h = r_max / (n_points + 1)
    r = h * np.arange(1, n_points + 1)
    diag = 2.0 / h**2 + 0.25 * omega**2 * r**2
    if coulomb:
        diag = diag + 1.0 / r
    off = np.full(n_points - 1, -1.0 / h**2)
    pair = numerics.eigh_lowest((diag, off), 1)[0]
    u = pair.vector / math.sqrt(h)
    return pair.value, RadialSolution(r, u, r_max)


def solve_relative(
    omega: float,
    r_max: float | None = None,
    n_points: int = 4000,
    coulomb: bool = True,
    refine_tol: float = 1e-6,
    max_points: int = 256_000,
) -> tuple[float, RadialSolution, float]:
    """Lowest s-wave level of the relative Hamiltonian.

    ``n_points`` is doubled until doubling once more shifts epsilon by less
    than ``refine_tol``. Returns ``(epsilon, u, delta)`` with ``delta`` the
    last such shift. Raises :class:`HookeSolverError` when ``max_points`` is
    reached first or when u has a node.
    """
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    if r_max is None:
        r_max = default_r_max(omega)
    eps, sol = _fd_solve(omega, r_max, n_points, coulomb)
    while True:
        eps_fine, sol_fine = _fd_solve(omega, r_max, 2 * n_points + 1, coulomb)
        delta = abs(eps_fine - eps)
        if delta < refine_tol:
            break
        n_points = 2 * n_points + 1
        if n_points > max_points:
            raise HookeSolverError(
                f"no grid convergence at {n_points} points: last shift {delta:.2e}"
            )
        eps, sol = eps_fine, sol_fine
    significant = sol.u[np.abs(sol.u) > 1e-10 * np.abs(sol.u).max()]
    if np.any(significant < 0):
        raise HookeSolverError("relative ground state has a node")
    return eps, sol, delta


def solve(params: HookeParams, n_points: int = 4000, coulomb: bool = True) -> HookeState:
    eps, sol, delta = solve_relative(params.omega, n_points=n_points, coulomb=coulomb)
    return HookeState(params, eps, sol, delta)


def cm_overlap(omega1: float, omega2: float) -> float:
    """Overlap of the normalized centre-of-mass Gaussians exp(-omega_k R^2)."""
    if not (omega1 > 0 and omega2 > 0):
        raise ValueError("frequencies must be positive")
    return (2.0 * math.sqrt(omega1 * omega2) / (omega1 + omega2)) ** 1.5


def relative_overlap(a: RadialSolution, b: RadialSolution) -> float:
    """int u_a u_b dr after linear interpolation onto a common uniform grid.

    The common grid uses the finer spacing and stops at the smaller r_max,
    beyond which one of the two functions vanishes identically.
    """
    h = min(a.h, b.h)
    r_end = min(a.r_max, b.r_max)
    n = int(math.floor(r_end / h))
    r = h * np.arange(1, n + 1)
    r = r[r < r_end]
    if r.size < 2:
        raise ValueError("radial grids do not overlap")

    def on_grid(s: RadialSolution):
        return np.interp(r, np.concatenate([[0.0], s.r, [s.r_max]]), np.concatenate([[0.0], s.u, [0.0]]))

    return float(h * np.dot(on_grid(a), on_grid(b)))


def hooke_overlap(s1: HookeState, s2: HookeState) -> OverlapValue:
    if s1 is s2:
        return OverlapValue(1.0)
    value = cm_overlap(s1.params.omega, s2.params.omega) * relative_overlap(s1.rel, s2.rel)
    return OverlapValue.from_complex(min(value, 1.0) if abs(value - 1.0) < 1e-12 else value)


def default_density_grid(omegas) -> numerics.Grid1D:
    """Radial output grid able to hold every density in a sweep over ``omegas``."""
    w = np.asarray(list(omegas), dtype=float)
    r_max = 1.2 * default_r_max(float(w.min()))
    r_first = 0.02 / math.sqrt(float(w.max()))
    return numerics.radial_grid(r_max, r_first=r_first, n_per_panel=24)


def hooke_density(
    state: HookeState,
    grid: numerics.Grid1D,
    n_radial: int = 400,
    n_angular: int = 64,
    norm_tol: float = 1e-6,
) -> DensityProfile:
    """rho(r1) = 2 int |psi(r1, r2)|^2 d^3 r2 on the nodes of ``grid``.

    Integrated in the relative coordinate r = r1 - r2, with Gauss-Legendre
    nodes in |r| and in the cosine of the angle between r and r1.
    """
    w = state.params.omega
    radial = numerics.gauss_legendre(n_radial, 0.0, state.rel.r_max)
    angular = numerics.gauss_legendre(n_angular, -1.0, 1.0)
    u2 = state.rel.spline()(radial.nodes) ** 2

    r1 = grid.nodes[:, None, None]
    r = radial.nodes[None, :, None]
    c = angular.nodes[None, None, :]
    # |Phi_cm(R)|^2 with R = r1 - r/2, |phi_rel|^2 d^3r = u^2 dr dOmega / (4 pi)
    r_cm2 = np.maximum(r1**2 + 0.25 * r**2 - r1 * r * c, 0.0)
    kernel = np.exp(-2.0 * w * r_cm2) @ angular.weights
    prefactor = 2.0 * (2.0 * w / math.pi) ** 1.5 * 2.0 * math.pi / (4.0 * math.pi)
    rho = prefactor * kernel @ (radial.weights * u2)

    total = float(np.dot(4.0 * math.pi * grid.nodes**2 * grid.weights, rho))
    if abs(total - N_PARTICLES) > 1e-4:
        raise HookeSolverError(f"density quadrature failed: integrates to {total}")
    return DensityProfile.on_radial_grid(N_PARTICLES, rho, grid, norm_tol=norm_tol)
