"""
Published energies and their G_d
================================

Every G_d figure is derived from the stored per-access and per-operation
energies, never stored itself.
"""

from datagravity import builtin_measurements, check_claims, derive_gd, replace_energy
from datagravity.catalog import records_table, results_table

print(records_table())
print()
print(results_table(check_claims()))

recs = {r.key: r for r in builtin_measurements()}
print(f"\nUPMEM PIM G_d: {derive_gd(recs['upmem_pim'])}")

# A 10% error in the FP32 energy is enough to break the DDR5 figure.
bad = replace_energy(builtin_measurements(), "tpuv4i_fp32", e_compute=1.1 * 1.31e-12)
print()
print(results_table(check_claims(bad)))
