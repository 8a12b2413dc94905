"""
Placing kernels near their data
===============================

Two kernels read three memory objects on a board.  Find the minimum-energy
positions in the plane and then the best of a few fixed slots.
"""

from pathlib import Path

import numpy as np

from datagravity import load_scenario, objective_energy, optimize_continuous, optimize_discrete

scn = load_scenario(Path(__file__).with_name("scenarios") / "ddr5_board.yaml")
problem = scn.placement_problem(seed=0)

# Energy at the start positions given in the file (unplaced kernels start at the region center).
start = [k.position if k.position is not None else problem.center for k in scn.kernels]
print(f"start: {objective_energy(problem, start):.4g} J")

free = optimize_continuous(problem)
print(free.table())

# With beta = 2 the optimum is the traffic-weighted centroid.
W = problem.traffic
print("centroid:", np.round((W @ problem.object_positions) / W.sum(axis=1, keepdims=True), 6).tolist())

fixed = optimize_discrete(problem)
print(fixed.table())
print(f"slot penalty over free placement: {fixed.objective / free.objective:.3f}x")
