"""
Helium-like ions
================

Correlated Gaussian ground states along the isoelectronic series, and how
far each one sits from the Z=2 reference.
"""

from qmetric import helium, metric

he = helium.solve_helium(helium.HeliumParams(Z=2.0))
print(f"He: E = {he.energy:.6f}, -V/T = {-he.virial_ratio:.5f}")
print("nested bases:", [round(he.prefix_energy(k), 4) for k in (4, 8, 16, 32)])

charges = [2.0, 1.5, 1.2, 1.0, 3.0, 5.0]
grid = helium.default_density_grid(charges)
rho_ref = helium.helium_density(he, grid)
for Z in charges[1:]:
    ion = helium.solve_helium(helium.HeliumParams(Z=Z))
    s = helium.helium_overlap(he, ion)
    d_rho = metric.d_rho(rho_ref, helium.helium_density(ion, grid))
    print(f"Z={Z:<4} E={ion.energy:10.5f}  D_psi={metric.d_psi(2, s):.4f}  D_rho={d_rho:.4f}")
