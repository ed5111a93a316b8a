"""Exact planar geometry used as ground truth for the set algorithms.

Polygons are stored as counter-clockwise vertex arrays. Segments and points
are allowed as degenerate polygons so that images of flat input sets (for
instance -B U with a single input) stay representable.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .config import Config, resolve
from .czops import affine_map
from .errors import Degenerate, DimensionMismatch, NotInvertible, NumericalFailure, Unbounded
from .linalg import LpProblem, LpStatus, as_matrix, lp_solve
from .pdiff import bounding_box, hpoly_pdiff
from .rcset import RcScenario, Variant
from .sets import (
    ConstrainedZonotope,
    HPolyhedron,
    SymmetricSet,
    circle_directions,
    support_czono,
)

logger = logging.getLogger(__name__)

_DEDUP_TOL = 1e-8


def _unique_points(points: np.ndarray, tol: float) -> np.ndarray:
    kept: list[np.ndarray] = []
    for p in points:
        if all(np.max(np.abs(p - q)) > tol for q in kept):
            kept.append(p)
    return np.array(kept).reshape(-1, 2)


def _hull(points: np.ndarray, tol: float) -> np.ndarray:
    """CCW extreme points; collinear inputs collapse to a segment or a point."""
    pts = _unique_points(np.asarray(points, dtype=float).reshape(-1, 2), _DEDUP_TOL)
    if len(pts) <= 1:
        return pts
    centered = pts - pts.mean(axis=0)
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    if s.size < 2 or s[1] <= tol * max(1.0, s[0]):
        along = centered @ vt[0]
        return pts[[int(np.argmin(along)), int(np.argmax(along))]]
    try:
        hull = ConvexHull(pts)
    except QhullError:
        along = centered @ vt[0]
        return pts[[int(np.argmin(along)), int(np.argmax(along))]]
    return _drop_collinear(pts[hull.vertices], tol)


def _drop_collinear(vertices: np.ndarray, tol: float) -> np.ndarray:
    keep = []
    k = len(vertices)
    for i in range(k):
        a, b, c = vertices[i - 1], vertices[i], vertices[(i + 1) % k]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cross > tol * max(1.0, np.linalg.norm(b - a) * np.linalg.norm(c - b)):
            keep.append(i)
    return vertices[keep] if len(keep) >= 3 else vertices


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    @classmethod
    def from_points(cls, points, tol: float = 1e-9) -> "ConvexPolygon":
        return cls(_hull(points, tol))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def is_degenerate(self) -> bool:
        return self.n_vertices < 3

    @property
    def area(self) -> float:
        if self.is_degenerate:
            return 0.0
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    def support(self, nu) -> float:
        return float(np.max(self.vertices @ np.asarray(nu, dtype=float)))

    def to_hpoly(self) -> HPolyhedron:
        """Edge-normal H-Rep; flat polygons get a closed slab."""
        v = self.vertices
        if self.n_vertices == 0:
            return HPolyhedron.empty(2)
        if self.n_vertices == 1:
            return HPolyhedron.box(v[0], v[0])
        if self.n_vertices == 2:
            d = (v[1] - v[0]) / np.linalg.norm(v[1] - v[0])
            normal = np.array([d[1], -d[0]])
            H = np.vstack([d, -d, normal, -normal])
            return HPolyhedron(H, [d @ v[1], -d @ v[0], normal @ v[0], -normal @ v[0]], True)
        edges = np.roll(v, -1, axis=0) - v
        normals = np.column_stack([edges[:, 1], -edges[:, 0]])
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        return HPolyhedron(normals, np.einsum("ij,ij->i", normals, v), True)

    def contains(self, x, tol: float = 1e-9) -> bool:
        return self.to_hpoly().contains(x, tol)


def polygon_from_hpoly(
    P: HPolyhedron, config: Config | None = None, allow_degenerate: bool = False
) -> ConvexPolygon | None:
    """Vertex enumeration by pairwise line intersection; None if P is empty."""
    cfg = resolve(config)
    tol = cfg.geometry_tol
    if P.dim != 2:
        raise DimensionMismatch(f"polygon oracle needs R^2, got R^{P.dim}")
    nonzero = np.any(P.H != 0, axis=1)
    if np.any(P.k[~nonzero] < -tol):
        return None
    H, k = P.H[nonzero], P.k[nonzero]
    norms = np.linalg.norm(H, axis=1)
    H, k = H / norms[:, None], k / norms

    for e in ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)):
        out = lp_solve(LpProblem(np.array(e), ineq_lhs=H, ineq_rhs=k), cfg)
        if out.status is LpStatus.INFEASIBLE:
            return None
        if out.status is LpStatus.UNBOUNDED:
            raise Unbounded(f"polyhedron is unbounded along {e}")

    i, j = np.triu_indices(len(H), k=1)
    det = H[i, 0] * H[j, 1] - H[i, 1] * H[j, 0]
    ok = np.abs(det) > tol
    i, j, det = i[ok], j[ok], det[ok]
    x = (k[i] * H[j, 1] - k[j] * H[i, 1]) / det
    y = (H[i, 0] * k[j] - H[j, 0] * k[i]) / det
    candidates = np.column_stack([x, y])
    slack = candidates @ H.T - k
    feasible = np.all(slack <= tol * np.maximum(1.0, np.abs(k)), axis=1)
    polygon = ConvexPolygon.from_points(candidates[feasible], tol)

    scale = max(1.0, float(np.abs(polygon.vertices).max(initial=0.0)))
    if polygon.is_degenerate or polygon.area <= tol * scale**2:
        if allow_degenerate:
            return polygon
        raise Degenerate(f"polyhedron is flat ({polygon.n_vertices} distinct vertices)")
    return polygon


def poly2d_minkowski_sum(P: ConvexPolygon, Q: ConvexPolygon) -> ConvexPolygon:
    """Hull of all pairwise vertex sums."""
    sums = (P.vertices[:, None, :] + Q.vertices[None, :, :]).reshape(-1, 2)
    return ConvexPolygon.from_points(sums)


def poly2d_pdiff(P: ConvexPolygon, S: SymmetricSet, config: Config | None = None) -> ConvexPolygon | None:
    """Erosion of P by S through its edge-normal H-Rep; None if empty."""
    if S.dim != 2:
        raise DimensionMismatch(f"subtrahend must be planar, got R^{S.dim}")
    return polygon_from_hpoly(hpoly_pdiff(P.to_hpoly(), S), config, allow_degenerate=True)


def poly2d_intersect(P: ConvexPolygon, Q: ConvexPolygon, config: Config | None = None) -> ConvexPolygon | None:
    return polygon_from_hpoly(P.to_hpoly().intersect(Q.to_hpoly()), config)


def poly2d_affine(R, P: ConvexPolygon) -> ConvexPolygon:
    R = as_matrix(R, "R", cols=2)
    if R.shape != (2, 2) or abs(np.linalg.det(R)) <= 1e-12:
        raise NotInvertible("polygon map must be an invertible 2 x 2 matrix")
    return ConvexPolygon.from_points(P.vertices @ R.T)


def poly2d_preimage(P: ConvexPolygon, R) -> HPolyhedron:
    """{x : R x in P}, possibly unbounded."""
    R = as_matrix(R, "R", cols=2)
    H = P.to_hpoly()
    return HPolyhedron(H.H @ R, H.k)


def polygon_from_czono(C: ConstrainedZonotope, config: Config | None = None, max_rounds: int = 500) -> ConvexPolygon | None:
    """Exact polygon of a planar constrained zonotope by support-LP facet discovery.

    Each round asks for the support in every current edge normal and inserts
    any support vector that lies strictly outside that edge.
    """
    cfg = resolve(config)
    if C.dim != 2:
        raise DimensionMismatch(f"polygon oracle needs R^2, got R^{C.dim}")
    hits = [support_czono(C, nu, cfg) for nu in circle_directions(8)]
    if any(h is None for h in hits):
        return None
    points = np.array([h.point for h in hits])
    radius = max(1.0, float(np.abs(points).max()))
    tol = 1e-8 * radius
    vertices = _hull(points, cfg.geometry_tol)

    for _ in range(max_rounds):
        if len(vertices) == 1:
            return ConvexPolygon(vertices)
        grown = []
        changed = False
        for idx in range(len(vertices)):
            p, q = vertices[idx], vertices[(idx + 1) % len(vertices)]
            grown.append(p)
            edge = q - p
            length = np.linalg.norm(edge)
            if length <= _DEDUP_TOL:
                continue
            normal = np.array([edge[1], -edge[0]]) / length
            hit = support_czono(C, normal, cfg)
            if hit.value > normal @ p + tol:
                grown.append(hit.point)
                changed = True
        vertices = _hull(np.array(grown), cfg.geometry_tol)
        if not changed:
            return ConvexPolygon(vertices)
    raise NumericalFailure(f"facet discovery did not settle after {max_rounds} rounds")


def polygon_area(P: ConvexPolygon | None) -> float:
    return 0.0 if P is None else P.area


def volume_estimate(C: ConstrainedZonotope, resolution: int = 200, config: Config | None = None) -> float:
    """Grid estimate of the volume of C over its bounding box.

    Cell centers are counted line by line: for each grid line along the last
    coordinate, two LPs give the interval of C on that line.
    """
    cfg = resolve(config)
    bounds = bounding_box(C, cfg)
    if bounds is None:
        return 0.0
    lower, upper = bounds
    width = upper - lower
    if np.any(width <= 0):
        return 0.0
    n = C.dim
    step = width / resolution
    axes = [lower[i] + step[i] * (np.arange(resolution) + 0.5) for i in range(n)]
    last = axes[-1]
    N = C.n_generators

    count = 0
    grids = np.meshgrid(*axes[:-1], indexing="ij") if n > 1 else []
    fixed_points = np.column_stack([g.ravel() for g in grids]) if n > 1 else np.zeros((1, 0))
    eq_lhs = np.vstack([C.A, C.G[:-1]])
    for fixed in fixed_points:
        eq_rhs = np.concatenate([C.b, fixed - C.c[:-1]])
        top = lp_solve(LpProblem(C.G[-1], eq_lhs=eq_lhs, eq_rhs=eq_rhs, lower=-np.ones(N), upper=np.ones(N)), cfg)
        if top.status is not LpStatus.OPTIMAL:
            continue
        bottom = lp_solve(LpProblem(-C.G[-1], eq_lhs=eq_lhs, eq_rhs=eq_rhs, lower=-np.ones(N), upper=np.ones(N)), cfg)
        hi = C.c[-1] + top.value
        lo = C.c[-1] - bottom.value
        count += int(np.count_nonzero((last >= lo) & (last <= hi)))
    return float(count * np.prod(step))


def exact_rc_2d(sc: RcScenario, config: Config | None = None) -> list[ConvexPolygon | None]:
    """Exact RC sets K_0..K_T of a planar scenario; None marks an empty set."""
    cfg = resolve(config)
    if sc.dim != 2:
        raise DimensionMismatch(f"exact recursion needs R^2, got R^{sc.dim}")
    T = sc.horizon
    sets: list[ConvexPolygon | None] = [None] * (T + 1)
    sets[T] = polygon_from_czono(sc.goal, cfg)
    for t in range(T - 1, -1, -1):
        after = sets[t + 1]
        if after is None:
            break
        eroded = poly2d_pdiff(after, sc.W[t].affine_map(sc.F[t]), cfg)
        if eroded is None:
            logger.info("exact RC set empty at t=%d", t)
            break
        pushed = polygon_from_czono(affine_map(-sc.B[t], sc.U[t]), cfg)
        widened = poly2d_minkowski_sum(eroded, pushed)
        if sc.variant is Variant.INVERTIBLE_A:
            state = sc.X[t]
        else:
            state = polygon_from_czono(sc.X[t], cfg).to_hpoly()
        try:
            sets[t] = polygon_from_hpoly(poly2d_preimage(widened, sc.A[t]).intersect(state), cfg)
        except Degenerate:
            logger.warning("exact RC set is flat at t=%d; treating it as empty", t)
            sets[t] = None
        if sets[t] is None:
            break
    return sets


def polygon_membership(P: ConvexPolygon | None, x, tol: float = 1e-6) -> bool:
    return P is not None and P.contains(x, tol)

