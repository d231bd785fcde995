"""robin_lab: a P1 finite element laboratory for Robin boundary value problems."""

__version__ = "0.1.0"

from .analysis import (
    DiscreteSolution,
    Exponents,
    exponents,
    h1_norm,
    level_set_measure,
    lp_norm,
    sup_norm,
    trace_constant_estimate,
    trace_values,
    truncate,
)
from .assembly import (
    SymmetricSparseMatrix,
    assemble_boundary_mass,
    assemble_load,
    assemble_mass,
    assemble_stiffness,
    assemble_system,
)
from .experiments import (
    ConvergenceRecord,
    RobinProblem,
    StabilityRecord,
    analytic_interval_solution,
    convergence_study,
    estimate_constant,
    level_set_pipeline,
    solve_robin,
    stability_sweep,
    theorem0_ratio,
)
from .fields import (
    BoundaryField,
    SourceField,
    boundary_inf,
    boundary_sup,
    boundary_sup_diff,
    eval_boundary,
)
from .linalg import SolveReport, cg_solve, gauss_solve, quadratic_form
from .mesh import (
    BoundaryFacet,
    Mesh,
    boundary_vertex_indices,
    build_interval_mesh,
    build_mesh,
    build_unit_cube_mesh,
    build_unit_square_mesh,
    export_text,
)
from .stampacchia import (
    DecayReport,
    PhiSamples,
    StampacchiaParams,
    fit_minimal_c,
    stampacchia_gap,
    theorem_constants,
    verify_decay,
)
