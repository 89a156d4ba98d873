"""Dirac structures on R^n with compact linear symmetry: isotropy-type
restriction, orbit-type reduction via descending sections, and machine
cross-checks that the two routes agree."""

from __future__ import annotations

from .action import (
    ActionSpec,
    ActionValidationError,
    AmbiguousIsotropyError,
    CircleFactor,
    ExactnessWarning,
    FiniteGroupRep,
    IsotropyDescriptor,
    ZeroAlgebraError,
    average_projector,
    default_quadrature_nodes,
    fixed_subspace,
    fundamental_vector_field,
    haar_average_field,
    haar_average_function,
    haar_average_oneform,
    haar_average_section,
    isotropy,
    quadrature_nodes_required,
    tangent_isotropy_type,
    tangent_orbit_type,
    v_G_annihilator,
    v_annihilator,
    validate_action,
    vertical_space,
)
from .lindirac import (
    ForwardImage,
    LinearDirac,
    NotLagrangianError,
    SplitVector,
    backward_image,
    forward_image,
    from_bivector,
    from_distribution,
    from_two_form,
    is_lagrangian,
    pairing,
    pairing_matrix,
    transform,
)
from .poly import Poly, PolyParseError, parse_poly
from .polyfield import (
    BivectorSpec,
    DegeneratePointError,
    DiracFieldSpec,
    DistributionSpec,
    PolyOneForm,
    PolySection,
    PolyTwoForm,
    PolyVectorField,
    SampleCheckReport,
    SectionsSpec,
    TwoFormSpec,
    courant_bracket,
    d_function,
    d_oneform,
    dorfman_bracket,
    evaluate_at,
    generating_sections,
    infinitesimal_invariance,
    integrability_check,
    lie_bracket,
    lie_derivative_oneform,
)
from .reduction import (
    InternalConsistencyError,
    PointReduction,
    QuotientModel,
    RankReport,
    RouteComparison,
    compare_routes,
    k_perp,
    rank_report,
    reduce_isotropy_route,
    reduce_orbit_route,
    reduce_point,
    restrict_to_stratum,
)
from .scenario import (
    RunReport,
    Scenario,
    ScenarioError,
    emit_report,
    exit_code,
    load_scenario,
    run_scenario,
    sample_points,
    scenario_from_dict,
    scenario_to_dict,
    summarize,
)
from .subspace import DimensionMismatchError, Subspace, direct_sum, span

__version__ = "0.1.0"
