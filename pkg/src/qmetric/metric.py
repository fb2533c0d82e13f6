"""Distances between many-body wave functions and between particle densities.

Wave functions carry squared norm N (the particle number). Internally every
state is stored unit-normalized, so the wave-function distances need only N
and the complex overlap of the unit states.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .numerics import Grid1D

BOUND_TOL = 1e-9
OVERLAP_SLACK = 1e-10


class BoundViolation(ArithmeticError):
    """A distance exceeded one of its analytic upper bounds."""


@dataclass(frozen=True)
class OverlapValue:
    """Inner product of two unit-normalized states in polar form."""

    modulus: float
    phase: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.modulus <= 1.0 + OVERLAP_SLACK:
            raise ValueError(f"overlap modulus {self.modulus} violates Cauchy-Schwarz")
        if not -math.pi < self.phase <= math.pi:
            raise ValueError(f"phase {self.phase} outside (-pi, pi]")

    @classmethod
    def from_complex(cls, z: complex) -> "OverlapValue":
        z = complex(z)
        phase = cmath.phase(z) if z != 0 else 0.0
        if phase == -math.pi:
            phase = math.pi
        return cls(abs(z), phase)

    @property
    def clamped(self) -> float:
        return min(1.0, self.modulus)


@dataclass(frozen=True)
class ManyBodyState:
    """A state given by unit-normalized amplitudes in a basis shared with
    the states it is compared to (lattice coefficients or grid samples
    with quadrature weights)."""

    n_particles: int
    amplitudes: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError("particle count must be at least 1")
        amps = np.asarray(self.amplitudes)
        object.__setattr__(self, "amplitudes", amps)
        norm2 = float(np.real(self.inner(self)))
        if abs(norm2 - 1.0) > 1e-10:
            raise ValueError(f"amplitudes must be unit-normalized, norm^2={norm2}")

    def inner(self, other: "ManyBodyState") -> complex:
        if self.amplitudes.shape != other.amplitudes.shape:
            raise ValueError("states live in different bases")
        prod = np.conj(self.amplitudes) * other.amplitudes
        if self.weights is not None:
            prod = prod * self.weights
        return complex(np.sum(prod))

    def overlap(self, other: "ManyBodyState") -> OverlapValue:
        if self.n_particles != other.n_particles:
            raise ValueError("overlap needs equal particle numbers")
        return OverlapValue.from_complex(self.inner(other))


def _check_n(n: int):
    if n < 1:
        raise ValueError(f"particle number must be >= 1, got {n}")


def d_psi(n: int, s: OverlapValue) -> float:
    """Gauge-invariant wave-function distance, sqrt(2N (1 - |<psi1|psi2>|)).

    ``s`` is the overlap of the unit-normalized states; the minimum over the
    relative phase is taken analytically.
    """
    _check_n(n)
    return math.sqrt(2.0 * n * (1.0 - s.clamped))


def d_psi_tilde(n: int, s: OverlapValue) -> float:
    """Norm distance without phase minimization.

    Distinguishes gauge copies: for psi and exp(i phi) psi it equals
    2 sqrt(N) |sin(phi / 2)|.
    """
    _check_n(n)
    m = s.clamped
    # 1 - m cos(phi) without cancellation at small phi
    return math.sqrt(2.0 * n * ((1.0 - m) + 2.0 * m * math.sin(0.5 * s.phase) ** 2))


def _ordered(a: ManyBodyState, b: ManyBodyState):
    if a.n_particles != b.n_particles:
        raise ValueError("distance needs equal particle numbers")
    # fixed argument order makes the floating-point result exactly symmetric
    return (a, b) if a.amplitudes.tobytes() <= b.amplitudes.tobytes() else (b, a)


def _norm_distance(a: ManyBodyState, b: ManyBodyState, phase: complex) -> float:
    diff = np.abs(a.amplitudes - phase * b.amplitudes) ** 2
    if a.weights is not None:
        diff = diff * a.weights
    return math.sqrt(a.n_particles * float(np.sum(diff)))


def d_psi_states(a: ManyBodyState, b: ManyBodyState) -> float:
    """d_psi evaluated as the norm of psi1 - exp(i phi) psi2 at the optimal phase.

    Agrees with :func:`d_psi` but stays accurate for nearly identical states,
    where 1 - |<psi1|psi2>| is dominated by rounding.
    """
    a, b = _ordered(a, b)
    s = a.inner(b)
    phase = s / abs(s) if s != 0 else 1.0
    return _norm_distance(a, b, np.conj(phase))


def d_psi_tilde_states(a: ManyBodyState, b: ManyBodyState) -> float:
    a, b = _ordered(a, b)
    return _norm_distance(a, b, 1.0)


@dataclass(frozen=True)
class DensityProfile:
    """Single-particle density sampled on lattice sites or quadrature nodes.

    ``weights`` already include the measure (1 per lattice site, 4 pi r^2 w
    for radial grids), so ``sum(weights * values)`` is the particle number.
    """

    n_particles: int
    values: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    kind: Literal["lattice", "radial", "line"] = "lattice"
    norm_tol: float = field(default=1e-6, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if not values.shape == nodes.shape == weights.shape:
            raise ValueError("values, nodes and weights must have equal shapes")
        if self.n_particles < 1:
            raise ValueError("particle count must be at least 1")
        if np.any(values < 0):
            raise ValueError("density has negative values")
        total = float(np.dot(weights, values))
        if abs(total - self.n_particles) > self.norm_tol:
            raise ValueError(f"density integrates to {total}, expected {self.n_particles}")
        for name, arr in (("values", values), ("nodes", nodes), ("weights", weights)):
            object.__setattr__(self, name, arr)

    @classmethod
    def on_lattice(cls, values) -> "DensityProfile":
        values = np.asarray(values, dtype=float)
        n = int(round(values.sum()))
        return cls(n, values, np.arange(1, values.size + 1, dtype=float), np.ones(values.size), "lattice")

    @classmethod
    def on_radial_grid(cls, n: int, values, grid: Grid1D, norm_tol: float = 1e-6) -> "DensityProfile":
        weights = 4.0 * np.pi * grid.nodes**2 * grid.weights
        return cls(n, values, grid.nodes, weights, "radial", norm_tol)

    @property
    def total(self) -> float:
        return float(np.dot(self.weights, self.values))

    def same_domain(self, other: "DensityProfile") -> bool:
        return (
            self.kind == other.kind
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )


def d_rho(rho1: DensityProfile, rho2: DensityProfile) -> float:
    """Density distance, the integral of sqrt(rho1^2 + rho2^2 - 2 rho1 rho2).

    For real non-negative densities the integrand is |rho1 - rho2|.
    """
    if not rho1.same_domain(rho2):
        raise ValueError("densities are sampled on different domains")
    return float(np.dot(rho1.weights, np.abs(rho1.values - rho2.values)))


def d_rho_min(n: int, n_prime: int) -> float:
    """Separation of the density spheres for N and N' particles."""
    if n < 0 or n_prime < 0:
        raise ValueError("particle numbers must be non-negative")
    return float(abs(n - n_prime))


def d_psi_min(n: int, n_prime: int) -> float:
    """Separation of the wave-function spheres for N and N' particles."""
    if n < 0 or n_prime < 0:
        raise ValueError("particle numbers must be non-negative")
    return abs(math.sqrt(n) - math.sqrt(n_prime))


def distance_to_zero_state(n: int, kind: Literal["wavefunction", "density"]) -> float:
    """Radius of the N-particle sphere around the zero wave function or density."""
    _check_n(n)
    if kind == "density":
        return float(n)
    if kind == "wavefunction":
        return math.sqrt(n)
    raise ValueError(f"unknown kind {kind!r}")


@dataclass(frozen=True)
class BoundReport:
    n_particles: int
    d_psi: float
    d_rho: float
    psi_margin: float
    rho_margin: float
    triangle_margin: float

    @property
    def psi_max(self) -> float:
        return math.sqrt(2 * self.n_particles)

    @property
    def rho_max(self) -> float:
        return 2.0 * self.n_particles


def check_bounds(d_psi_value: float, d_rho_value: float, n: int, tol: float = BOUND_TOL) -> BoundReport:
    """Verify D_psi <= sqrt(2N) and D_rho <= 2N for equal-N states.

    Raises :class:`BoundViolation` naming the bound that failed. Margins are
    bound minus distance; ``triangle_margin`` refers to the weaker 2 sqrt(N)
    bound obtained through the zero wave function.
    """
    _check_n(n)
    psi_max = math.sqrt(2 * n)
    rho_max = 2.0 * n
    if d_psi_value < -tol or d_rho_value < -tol:
        raise BoundViolation("distances must be non-negative")
    if d_psi_value > psi_max + tol:
        raise BoundViolation(f"D_psi={d_psi_value:.12g} exceeds sqrt(2N)={psi_max:.12g}")
    if d_rho_value > rho_max + tol:
        raise BoundViolation(f"D_rho={d_rho_value:.12g} exceeds 2N={rho_max:.12g}")
    return BoundReport(
        n,
        d_psi_value,
        d_rho_value,
        psi_max - d_psi_value,
        rho_max - d_rho_value,
        2.0 * math.sqrt(n) - d_psi_value,
    )
