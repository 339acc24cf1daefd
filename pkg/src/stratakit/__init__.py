"""Touching-ball strata of closed subsets of R^n, exact nearest-point
oracles, and a residual-checking harness for the projection estimates."""

from .bundles import TouchingSample, is_touching_direction, sample_touching
from .cones import (
    PolyhedralCone,
    cone_control_constant,
    polar,
    project_onto_cone,
    tangent_from_normal,
)
from .covers import (
    PatchCover,
    SlabCoverReport,
    coarea_slab_cover,
    quadratic_patch_cover,
)
from .estimates import (
    ESTIMATE_IDS,
    EstimateReport,
    check_angle,
    check_cone_distance,
    check_one_sided,
    check_projection_lipschitz,
    check_quadratic_contact,
    one_sided_curvature,
    run_estimate,
)
from .gridio import GridMap, read_grid, write_grid
from .linalg import (
    AffineFlat,
    Subspace,
    dist_to_subspace,
    hausdorff_distance,
    project_onto_flat,
    rank_of,
)
from .scene import SceneSpec, build_set, load_scene
from .sets import (
    Ball,
    ClosedSet,
    Flat,
    HPolytope,
    PointCloud,
    ProjectionResult,
    Sphere,
    UnionSet,
    VPolytope,
    distance,
    hausdorff_distance_sets,
    nearest_point,
    nearest_point_set,
)
from .stratify import (
    StratumReport,
    projection_cover,
    stratify_exact_polytope,
    stratify_sampled,
)

__version__ = "0.1.0"
