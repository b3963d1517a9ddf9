"""Certified bounds on the one-sided Hausdorff distance between triangle soups.

>>> from trihausdorff import solve, synthetic
>>> r = solve(synthetic.unit_cube(), synthetic.unit_cube((2, 0, 0)))
>>> r.lower <= 2.0 <= r.upper
True
"""
from . import synthetic
from ._backend import BACKEND
from .bounds import (
    DEFAULT_CASCADE,
    Bound,
    BoundCascadeConfig,
    BoundOutcome,
    VertexQuery,
    bound_u1,
    bound_u2,
    bound_u3,
    bound_u4,
    bound_zheng,
    cascade,
    exact_case,
    query_vertices,
)
from .geometry import (
    Plane,
    SegmentPlaneHit,
    bisector_plane_of_planes,
    bisector_plane_of_points,
    closest_point_on_triangle,
    midpoint_subdivide,
    segment_plane_intersection,
    triangle_g,
)
from .io import NonTriangleFace, ParseError, load_mesh, read_report, write_report
from .mesh import (
    BBoxDiag,
    DegenerateBBox,
    EmptyFaceList,
    IndexOutOfRange,
    MeshError,
    Policy,
    TriangleSoup,
    UnreferencedVertices,
    bbox_diag,
    faces_share_edge,
    validate,
)
from .oracle import SampleSpec, brute_force_distance, sampled_lower_bound
from .solver import (
    CandidateTriangle,
    HausdorffReport,
    SolverConfig,
    SolverStats,
    Status,
    SymmetricResult,
    solve,
    solve_symmetric,
)
from .spatial import AabbTree, ClosestPointResult, build, closest_point

__version__ = "0.1.0"
