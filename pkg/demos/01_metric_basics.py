"""
Distances between states and between densities
===============================================

Two small states on a five-dimensional basis, their gauge copies, and the
sphere geometry that bounds every distance.
"""

import math

import numpy as np

from qmetric import metric
from qmetric.metric import DensityProfile, ManyBodyState

rng = np.random.default_rng(1)
N = 2

v = rng.standard_normal(5) + 1j * rng.standard_normal(5)
w = rng.standard_normal(5) + 1j * rng.standard_normal(5)
psi = ManyBodyState(N, v / np.linalg.norm(v))
phi = ManyBodyState(N, w / np.linalg.norm(w))

s = psi.overlap(phi)
print(f"|<psi|phi>| = {s.modulus:.4f}, phase = {s.phase:.4f}")
print(f"D_psi       = {metric.d_psi(N, s):.4f}   (at most sqrt(2N) = {math.sqrt(2 * N):.4f})")
print(f"D_psi tilde = {metric.d_psi_tilde(N, s):.4f}")

# a global phase changes nothing physical, so D_psi ignores it
copy = ManyBodyState(N, np.exp(0.7j) * psi.amplitudes)
print(f"gauge copy: D_psi = {metric.d_psi_states(psi, copy):.1e}, "
      f"D_psi tilde = {metric.d_psi_tilde_states(psi, copy):.4f}")

# densities on a four-site lattice; disjoint supports give the maximum 2N
a = DensityProfile.on_lattice([1.0, 1.0, 0.0, 0.0])
b = DensityProfile.on_lattice([0.0, 0.5, 1.0, 0.5])
c = DensityProfile.on_lattice([0.0, 0.0, 1.0, 1.0])
print(f"D_rho(a, b) = {metric.d_rho(a, b):.3f}, D_rho(a, c) = {metric.d_rho(a, c):.3f}")

# spheres of different particle number never touch
for n in (1, 2, 3, 8):
    print(f"N={n}->{n + 1}: min D_rho = {metric.d_rho_min(n, n + 1):.0f}, "
          f"min D_psi = {metric.d_psi_min(n, n + 1):.4f}")
