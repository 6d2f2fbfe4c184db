"""Spectral geometry of surfaces immersed in 3-space.

Builds closed triangle meshes and surfaces of revolution, measures their
curvature energies, solves the surface Hamiltonian -Delta - (H^2 - K) with
two independent backends, generates the constant-skew-curvature family of
revolved profiles, and certifies analytic bounds on spectral gaps.
"""

from ._backend import backend_name
from .bounds import (
    BoundReport,
    BoundsError,
    NotConstantSkewError,
    bound_report,
    certify,
    gap_bound_nona,
    gap_bound_oka,
    gap_bound_result1,
    gap_bound_result2,
    lambda0_lower_bound,
    weyl_check,
)
from .csc import (
    BranchError,
    CscBranch,
    CscError,
    CscParams,
    DegenerateFamilyError,
    QuadratureError,
    csc_bifurcation,
    csc_denominator,
    csc_h,
    csc_h_prime,
    csc_intervals,
    csc_profile,
    csc_well_strength,
    outer_branch,
    quotient_profile,
    quotient_sor,
    quotient_torus,
    stack_profile,
)
from .curvature import (
    CurvatureField,
    GeometricSummary,
    analytic_sor_curvatures,
    arc_profile_curvatures,
    discrete_curvatures,
    gauss_bonnet_residual,
    geometric_summary,
    willmore_energy,
)
from .fleet import (
    FLEET,
    SUITES,
    FleetReport,
    MemberResult,
    run_fleet,
    run_member,
)
from .mesh import (
    MeshError,
    MeshFormatError,
    MeshValidationError,
    PhysicalUnits,
    TopologySummary,
    TriangleMesh,
    load_mesh,
    revolve,
    revolve_strip_obj,
    save_mesh,
    scale_mesh,
    topology,
    total_area,
)
from .profile import JoinInfo, ProfileCurve, ProfileError, profile_is_simple
from .spectral import (
    CompletenessError,
    ConvergenceError,
    EigenSystem,
    SorOperator,
    SpectralError,
    SpectralResult,
    SymmetryError,
    assemble_fem,
    assemble_sor_mode,
    lowest_eigenpairs,
    parity_classify,
    solve_fem,
    solve_sor,
    sor_flat_cylinder,
    sor_round_torus,
    sor_sphere,
)
from .surfaces import (
    bumpy_sphere,
    circle_profile,
    ellipsoid,
    genus2,
    icosphere,
    semicircle_profile,
    torus,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "BoundsError",
    "BranchError",
    "CompletenessError",
    "ConvergenceError",
    "CscBranch",
    "CscError",
    "CscParams",
    "CurvatureField",
    "DegenerateFamilyError",
    "EigenSystem",
    "FLEET",
    "FleetReport",
    "GeometricSummary",
    "JoinInfo",
    "MemberResult",
    "MeshError",
    "MeshFormatError",
    "MeshValidationError",
    "NotConstantSkewError",
    "PhysicalUnits",
    "ProfileCurve",
    "ProfileError",
    "QuadratureError",
    "SUITES",
    "SorOperator",
    "SpectralError",
    "SpectralResult",
    "SymmetryError",
    "TopologySummary",
    "TriangleMesh",
    "analytic_sor_curvatures",
    "arc_profile_curvatures",
    "assemble_fem",
    "assemble_sor_mode",
    "backend_name",
    "bound_report",
    "bumpy_sphere",
    "certify",
    "circle_profile",
    "csc_bifurcation",
    "csc_denominator",
    "csc_h",
    "csc_h_prime",
    "csc_intervals",
    "csc_profile",
    "csc_well_strength",
    "discrete_curvatures",
    "ellipsoid",
    "gap_bound_nona",
    "gap_bound_oka",
    "gap_bound_result1",
    "gap_bound_result2",
    "gauss_bonnet_residual",
    "genus2",
    "geometric_summary",
    "icosphere",
    "lambda0_lower_bound",
    "load_mesh",
    "lowest_eigenpairs",
    "outer_branch",
    "parity_classify",
    "profile_is_simple",
    "quotient_profile",
    "quotient_sor",
    "quotient_torus",
    "revolve",
    "revolve_strip_obj",
    "run_fleet",
    "run_member",
    "save_mesh",
    "scale_mesh",
    "semicircle_profile",
    "solve_fem",
    "solve_sor",
    "sor_flat_cylinder",
    "sor_round_torus",
    "sor_sphere",
    "stack_profile",
    "topology",
    "torus",
    "total_area",
    "weyl_check",
    "willmore_energy",
]
