"""Data-movement energy, the disjunction constant G_d, data gravity and compute placement."""

__version__ = "0.1.0"

from .errors import DomainError, SingularityError
from .energy import (
    PJ,
    EnergyBreakdown,
    TechProfile,
    WorkloadSpec,
    balanced_separation,
    disjunction_constant,
    movement_energy,
    total_energy,
    workload_bits,
)
from .gravity import DataObject, FieldSample, field_at, information_mass, sample_grid, samples_to_csv
from .advantage import (
    AdvantageInputs,
    AdvantageReport,
    advantage_factor,
    advantage_lower_bound,
    colocation_condition,
    evaluate,
    sweep,
    verify_proposition,
    violations,
)
from .placement import (
    ComputeKernel,
    PlacementProblem,
    PlacementSolution,
    objective_energy,
    objective_gradient,
    optimize_continuous,
    optimize_discrete,
)
from .catalog import all_passed, builtin_claims, builtin_measurements, check_claims, derive_gd, replace_energy
from .scenario import Scenario, dump_scenario, load_scenario, parse_scenario
