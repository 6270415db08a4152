"""Exact-arithmetic wall structures for blow-ups of toric varieties along
boundary hypersurfaces: consistency completion, broken lines, theta
functions, and explicit mirror-family equations."""

from .curves import CC_ZERO, CurveClass, cc, cc_add, cc_neg, cc_scale, cc_sub, cc_text
from .lattice import (
    Cone,
    Fan,
    LatticeError,
    PLFunction,
    cone,
    cone_contains,
    normal_covector,
    pl_value,
    primitive,
    project_along,
)
from .series import Registry, Series, SeriesError, exp_nilpotent, log_unit, mul, power, substitute
from .scattering import (
    BudgetExceeded,
    Joint,
    RingAutomorphism,
    ScatteringError,
    Wall,
    WallStructure,
    complete,
    cross,
    defect,
    enumerate_joints,
    loop_product,
    make_wall,
    merge_walls,
    path_ordered_product,
    verify_consistent,
    wall_table_json,
    wall_table_text,
    widget,
)
from .heart import BlowupData, Center, Component, HeartError, beta_class, build_initial, refine, to_heart
from .thetas import (
    BrokenLine,
    MirrorPresentation,
    NonGenericEndpoint,
    ThetaError,
    default_endpoint,
    enumerate_broken_lines,
    express_in_thetas,
    graph_model_check,
    kink_transport,
    mirror_presentation,
    theta,
)
from .render import RenderError, render_slice

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
