"""
Hooke's atom
============

Two electrons in a harmonic trap. At omega = 1/2 the total energy is exactly
2 Hartree, which makes a convenient check on the radial solver.
"""

import numpy as np

from qmetric import hooke, metric

state = hooke.solve(hooke.HookeParams(0.5))
print(f"E(omega=0.5) = {state.energy:.8f}   (grid shift {state.refinement_delta:.1e})")

omegas = [0.5, 0.25, 0.1, 0.05, 0.02, 0.01]
grid = hooke.default_density_grid(omegas)
rho_ref = hooke.hooke_density(state, grid)

for omega in omegas[1:]:
    other = hooke.solve(hooke.HookeParams(omega))
    rho = hooke.hooke_density(other, grid)
    s = hooke.hooke_overlap(state, other)
    r_peak = grid.nodes[np.argmax(grid.nodes**2 * rho.values)]
    print(f"omega={omega:<5} overlap={s.modulus:.4f}  D_psi={metric.d_psi(2, s):.4f}  "
          f"D_rho={metric.d_rho(rho_ref, rho):.4f}  radial peak at r={r_peak:.2f}")
