"""
A confined Hubbard chain
========================

Eight sites, a parabolic trap of strength omega, and the ground-state
densities as the trap is opened.
"""

import numpy as np

from qmetric import hubbard, metric

base = dict(L=8, n_up=2, n_down=2, t=1.0, U=2.0)
ref = hubbard.ground_state(hubbard.HubbardParams(**base, omega=4.0))
rho_ref = hubbard.site_density(ref)
print("omega=4 density:", np.round(rho_ref.values, 3))

for omega in (2.0, 1.0, 0.5, 0.2, 0.05):
    gs = hubbard.ground_state(hubbard.HubbardParams(**base, omega=omega))
    rho = hubbard.site_density(gs)
    s = hubbard.lattice_overlap(ref, gs)
    print(f"omega={omega:<5} E0={gs.energy:9.5f}  "
          f"D_psi={metric.d_psi(4, s):.4f}  D_rho={metric.d_rho(rho_ref, rho):.4f}")

# at half filling the sector has 4900 states and the Lanczos solver takes over
half = hubbard.ground_state(hubbard.HubbardParams(L=8, n_up=4, n_down=4, U=6.0, omega=0.05))
print("N=8 open trap density:", np.round(hubbard.site_density(half).values, 3))
