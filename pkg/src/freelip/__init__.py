"""freelip: Lipschitz-free spaces of finite pointed metric spaces.

Arens-Eells norms with matching primal and dual certificates, the induced
linear and dual actions of isometry groups, and the horofunction embedding
``a -> rho_a`` with its pointwise limits.
"""

from .compactify import embed_image, gromov_gamma, horofunction, horolimit, rho, separation_check
from .group_action import (FiniteGroup, IsometricAction, act_molecule, check_representation,
                           dual_act, isometry_group, validate_action)
from .lip0 import LipFunction, in_dual_ball, lip_constant, mcshane_extend, pointwise_dist
from .linearize import NormedWindow, linearize_map, operator_bound_check, universal_extension
from .metric_space import (PointedMetricSpace, adjoin_equidistant, from_graph,
                           from_points_in_plane, line_space, random_metric, validate)
from .molecule import Molecule, add, chi, from_pairs, pair, scale
from .transport_norm import certify, check_isometric_embedding, norm, norm_dual, norm_primal

__version__ = "0.1.0"

__all__ = [
    "PointedMetricSpace", "validate", "adjoin_equidistant", "from_graph",
    "from_points_in_plane", "line_space", "random_metric",
    "Molecule", "chi", "add", "scale", "from_pairs", "pair",
    "norm", "norm_primal", "norm_dual", "certify", "check_isometric_embedding",
    "LipFunction", "lip_constant", "in_dual_ball", "pointwise_dist", "mcshane_extend",
    "linearize_map", "universal_extension", "operator_bound_check", "NormedWindow",
    "FiniteGroup", "IsometricAction", "validate_action", "act_molecule", "dual_act",
    "check_representation", "isometry_group",
    "rho", "horofunction", "gromov_gamma", "embed_image", "separation_check", "horolimit",
]
