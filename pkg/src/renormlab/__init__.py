"""Numerical laboratory for period-doubling renormalization of unimodal maps.

The layers, bottom up: diffspace holds diffeomorphisms of [-1, 1] in
nonlinearity coordinates together with the zoom operators that restrict and
rescale them; timetree indexes the binary tree of dyadic decomposition
times; decompspace assembles tree-indexed decompositions, the geometric
renormalization over a fixed interval geometry and its pure fixed points;
renorm couples the geometry to the dynamics of the decomposed unimodal map
f = Phi o q_t and solves for fixed points and periodic orbits of the
renormalization; spectral extracts universal constants and cross-checks
them against direct cascade iteration of the bare fold family.
"""

from .decompspace import (
    KAPPA_MARGIN,
    Decomposition,
    Geometry,
    compose_all,
    decomposition_distance,
    decomposition_linear_combination,
    decomposition_norm,
    geometric_renormalize,
    geometry_blend,
    geometry_distance,
    identity_decomposition,
    partial_composition,
    pullback_intervals,
    pure_decomposition,
)
from .diffspace import (
    DEFAULT_DEGREE,
    FoldingMap,
    NonlinearityProfile,
    OrientedInterval,
    branch_zoom,
    compose,
    constant_profile,
    identity_profile,
    linear_combination,
    zoom,
)
from .errors import (
    BracketError,
    ConfigError,
    DepthError,
    DepthMismatch,
    DomainError,
    GeometryError,
    NoFixedPoint,
    NonConvergence,
    NoSideInterval,
    NoWindow,
    RenormlabError,
    ResolutionError,
)
from .renorm import (
    DecomposedMap,
    FixedPointReport,
    RenormStep,
    SolverConfig,
    WindowResult,
    classical_first_return_oracle,
    dynamical_geometry,
    find_fixed_point,
    find_fixed_point_p,
    find_periodic_orbit,
    is_renormalizable,
    observed_eval,
    peak_value_rho,
    random_decomposed_map,
    renormalization_orbit_diagnostics,
    renormalization_window,
    renormalize,
    side_interval,
    solve_peak_value,
)
from .spectral import (
    CascadeTable,
    cascade_orbit_scaling,
    scaling_ratios,
    superstable_cascade,
    unstable_eigenvalue,
)
from .timetree import (
    ROOT,
    DecompositionTimes,
    a1,
    a1_inverse,
    a2,
    a2_inverse,
    compare,
    enumerate_descending,
    level,
    validate_path,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
