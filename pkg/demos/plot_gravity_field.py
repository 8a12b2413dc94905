"""
The pull of data on computation
===============================

Each data object attracts computation with strength proportional to its
information mass.  Sample the field between two DRAM banks and write a
plot-ready CSV.
"""

import sys
from pathlib import Path

from datagravity import field_at, load_scenario, sample_grid, samples_to_csv

scn = load_scenario(Path(__file__).with_name("scenarios") / "upmem_dimm.yaml")
g_d = scn.profile.disjunction_constant()
beta = scn.profile.beta
for obj in scn.objects:
    print(f"{obj.id}: mass {obj.mass:.3g} bit/s at {obj.position}")

# Between the banks the pulls oppose and cancel at the midpoint.
for x in (-0.001, 0.0005, 0.0015, 0.0025, 0.004):
    s = field_at(scn.objects, (x, 0.0, 0.0), g_d, beta)
    print(f"x = {x * 1e3:5.2f} mm   gx = {s.field[0]: .3e}")

# Halving the distance to one bank multiplies its pull by 2**beta.
near = field_at(scn.objects[:1], (0.001, 0, 0), g_d, beta).magnitude
far = field_at(scn.objects[:1], (0.002, 0, 0), g_d, beta).magnitude
print(f"ratio near/far = {near / far:.6f} (2**beta = {2 ** beta:.6f})")

# A coarse grid; points on top of a bank come back flagged as singular.
samples = sample_grid(scn.objects, ((-0.002, -0.002, 0), (0.005, 0.002, 0)), (8, 5, 1), g_d, beta)
sys.stdout.write(samples_to_csv(samples[:6]))
print(f"... {len(samples)} points, {sum(s.singular for s in samples)} singular")
