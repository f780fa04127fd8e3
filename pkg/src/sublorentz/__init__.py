"""Sub-Lorentzian geometry on two step-2 nilpotent groups: group
operations, causal structure, closed-form geodesics, two-point connection,
reachable-set predicates, and a numerical-integration cross-check layer."""

from .causal import (
    CausalClass,
    CausalKind,
    HorizontalVector,
    LengthReport,
    Orientation,
    classify,
    classify_coefficients,
    co_metric,
    cone_function_gradient,
    curve_length,
    horizontal_gradient_fd,
    q_form,
    q_inner,
)
from .groups import (
    DiscreteCurve,
    FrameVector,
    Group,
    GroupPoint,
    bracket,
    dual_form,
    frame_coefficients,
    heisenberg_point,
    horizontality_defect,
    inverse,
    multiply,
    origin,
    quaternion_point,
    structure_matrices,
)
from .heisenberg import (
    HeisIVP,
    HeisTarget,
    TargetClass,
    classify_target,
    connect,
    endpoint_ratio,
    geodesic_length,
    solve_endpoint_ratio,
)
from .integrate import (
    ConservationReport,
    CovectorState,
    IntegrationConfig,
    PiecewiseControls,
    conservation_report,
    integrate,
    integrate_controls,
)
from .paths import GeodesicPath
from .quaternion import QuatClosedForm, QuatIVP, closed_form, identity_suite
from .reachable import (
    HeisSlice,
    RayParams,
    Region,
    bslice_reduce,
    cone_function,
    in_region,
    ray_point,
    verify_inclusion,
)

__version__ = "0.1.0"
