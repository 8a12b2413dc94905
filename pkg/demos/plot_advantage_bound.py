"""
How much does co-location save?
===============================

Compare total energy with operands far away (distance ``d``) against operands
next door (``d_min``).  When ``G_d * d_min / d < 1`` the saving is at least
``G_d ** ((beta - 1) / 2)``.
"""

import numpy as np

from datagravity import AdvantageInputs, advantage_lower_bound, evaluate, verify_proposition, violations

# A DRAM-class G_d of 1000 and four orders of magnitude in distance.
rep = evaluate(AdvantageInputs(g_d=1000, d=1e-2, d_min=1e-6, beta=2))
print(f"gamma = {rep.gamma:.2f}, guaranteed >= {rep.lower_bound:.2f}, condition {rep.condition_holds}")

# The guarantee grows with G_d and beta.
for beta in (1.5, 2.0, 3.0):
    row = "  ".join(f"{advantage_lower_bound(g, beta):9.2f}" for g in (10, 100, 1000, 1e4))
    print(f"beta={beta}: {row}")

# Check the bound on a dense grid, keeping every point inside its domain.
reports = verify_proposition(np.logspace(0, 4, 40), np.linspace(1.05, 3, 25),
                             np.logspace(-8, -1e-6, 100), r_relative=True)
print(f"{len(reports)} points checked, {len(violations(reports))} violations")

# Outside the domain the bound is not promised, and it does fail.
out = evaluate(AdvantageInputs.from_ratio(1000, 0.5, 2))
print(f"G_d*r = {1000 * 0.5:.0f}: gamma {out.gamma:.2f} vs bound {out.lower_bound:.2f}")
