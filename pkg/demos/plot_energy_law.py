"""
Movement energy versus distance
===============================

Moving a bit costs ``alpha * d**beta``.  Computing on it costs a fixed amount.
This walks through where the two cross for a DDR5-class link feeding a 7 nm
FP32 unit.
"""

from datagravity import PJ, TechProfile, balanced_separation, movement_energy

# One 64-bit access over 1 cm costs about 1300 pJ; an FP32 op costs 1.31 pJ.
prof = TechProfile.calibrated("ddr5", e_compute=1.31 * PJ, e_access=1300 * PJ,
                              d_access=0.01, beta=2.0)
print(f"alpha = {prof.alpha:.4g} J/(bit m^2)")
print(f"G_d at 1 cm = {prof.disjunction_constant():.1f}")

# Energy grows quadratically with distance at beta = 2.
for d in (1e-4, 1e-3, 1e-2, 1e-1):
    print(f"d = {d:7.0e} m   E = {movement_energy(prof, 64, d) / PJ:12.4f} pJ")

# Separation at which one access costs the same as one operation.
d_star = balanced_separation(prof)
print(f"balanced separation: {d_star * 1e3:.3f} mm")
print(f"check: {movement_energy(prof, 64, d_star) / PJ:.6f} pJ vs 1.31 pJ")

# A softer law (beta = 1.5) with the same 1 cm cost is dearer at short range, so it crosses closer in.
soft = TechProfile.calibrated("soft", 1.31 * PJ, 1300 * PJ, 0.01, beta=1.5)
print(f"beta=1.5 balanced separation: {balanced_separation(soft) * 1e3:.3f} mm")
