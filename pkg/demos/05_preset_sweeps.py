"""
All preset sweeps
=================

Runs every preset sweep (helium, Hooke, Hubbard), writes one CSV per sweep
plus an SVG and a JSON summary, and prints the curve statistics. Takes one
to two minutes.

    python demos/05_preset_sweeps.py [outdir]
"""

import sys

from qmetric import sweep

outdir = sys.argv[1] if len(sys.argv) > 1 else "fig2_output"
summary = sweep.reproduce_fig2(outdir)

print(f"\n{'sweep':16s} {'slope0':>7s} {'R2':>7s} {'tail':>8s} {'max D_psi':>10s}")
for key, rep in summary["sweeps"].items():
    print(f"{key:16s} {rep['initial_slope']:7.3f} {rep['linear_r2']:7.4f} "
          f"{rep['tail_slope_ratio']:8.3f} {rep['max_d_psi_norm']:10.3f}")

sup = summary["superposition"]
print(f"\nN=2 curves ({sup['curve_a']} vs {sup['curve_b']}) differ by at most {sup['max_deviation']:.3f}")
