"""Epi-distances, Rockafellian models, Lagrangian duals and their error bounds on grids."""

from .bounds import (BoundReport, RadiusBudget, Status, bound_ambiguity, bound_augmentation, bound_composite,
                     bound_constraint_family, bound_dual, bound_lagrangian, bound_minval, bound_splitting,
                     bound_tilted, epi_norm)
from .funcgrid import (ConvergenceProfile, Grid, GriddedFunction, Orientation, cloud_epi_distance, conjugate,
                       epi_distance, epi_excess, epi_profile, fit_rate, grid_sample, infimum_argmin, level_set,
                       lipschitz_modulus)
from .geometry import Inner, NormSpec, PointCloud, excess, nearest_brute, nearest_indexed, norm_eval, \
    truncated_hausdorff
from .lagrangian import (DualFunction, dual_affine_closed, dual_numeric, lagrangian_ambiguity_closed,
                         lagrangian_composite_closed, lagrangian_numeric, lagrangian_splitting_closed,
                         weak_duality_check)
from .rockafellian import (AugKind, AugmentationSpec, Box, Family, RockafellianModel, ambiguity_support_vector,
                           augment, build_ambiguity, build_composite, build_constraint_family, build_splitting,
                           check_exactness, min_value_function, tightness_diagnostic, tilt)
from .scenarios import ScenarioConfig, SweepResult, default_config, emit_results, run_scenario

__version__ = "0.1.0"
