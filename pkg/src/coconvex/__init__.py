"""L_p Brunn-Minkowski toolkit for C-coconvex sets over polyhedral cones."""
from ._kernel import BACKEND
from .algebra import (
    CombinedSet,
    log_co_sum,
    log_mixed_volume,
    lp_mixed_volume,
    lp_mixed_volume_fn,
    mixed_volume_1,
    p_co_sum,
    perturbed,
    scalar_multiple,
    variational_derivative,
)
from .coconvex import (
    CCoconvexSet,
    DirectionSet,
    DiscreteMeasure,
    cone_volume_measure,
    covolume,
    is_c_determined,
    lp_surface_measure,
    surface_measure,
    wulff_shape,
)
from .cone import Cone, in_omega, make_cone, omega_grid, polar_cone, truncate
from .errors import CoconvexError
from .report import CheckReport
from .solver import SolverOptions, SolveResult, solve_log_minkowski, solve_lp_minkowski, verify_solution

__version__ = "0.1.0"
