"""Closed-form constrained-zonotope operations and canonical representations."""
import logging

import numpy as np
import scipy.linalg

from .config import Config, resolve
from .errors import Degenerate, DimensionMismatch, NotFullDimensional, NotInvertible, Unbounded
from .linalg import (
    LpProblem,
    LpStatus,
    as_matrix,
    checked_inverse,
    independent_row_subset,
    lp_solve,
    numerical_rank,
)
from .sets import ConstrainedZonotope, Halfspace, HPolyhedron, SymmetricSet

logger = logging.getLogger(__name__)


def _same_dim(C: ConstrainedZonotope, S: ConstrainedZonotope, op: str):
    if C.dim != S.dim:
        raise DimensionMismatch(f"{op}: operands in R^{C.dim} and R^{S.dim}")


def affine_map(R, C: ConstrainedZonotope) -> ConstrainedZonotope:
    """Image R C = (R G, R c, A, b)."""
    R = as_matrix(R, "R", cols=C.dim)
    return ConstrainedZonotope(R @ C.G, R @ C.c, C.A, C.b, C.is_empty_marker)


def minkowski_sum(C: ConstrainedZonotope, S: ConstrainedZonotope | SymmetricSet) -> ConstrainedZonotope:
    if isinstance(S, SymmetricSet):
        S = S.as_czono()
    _same_dim(C, S, "minkowski_sum")
    return ConstrainedZonotope(
        np.hstack([C.G, S.G]),
        C.c + S.c,
        scipy.linalg.block_diag(C.A, S.A),
        np.concatenate([C.b, S.b]),
        C.is_empty_marker or S.is_empty_marker,
    )


def intersect_inverse_affine(C: ConstrainedZonotope, R, W: ConstrainedZonotope) -> ConstrainedZonotope:
    """C intersected with the preimage {x : R x in W}."""
    R = as_matrix(R, "R", cols=C.dim)
    if R.shape[0] != W.dim:
        raise DimensionMismatch(
            f"intersect_inverse_affine: R maps to R^{R.shape[0]} but W lives in R^{W.dim}"
        )
    N_W = W.n_generators
    A = np.block([
        [C.A, np.zeros((C.n_constraints, N_W))],
        [np.zeros((W.n_constraints, C.n_generators)), W.A],
        [R @ C.G, -W.G],
    ])
    return ConstrainedZonotope(
        np.hstack([C.G, np.zeros((C.dim, N_W))]),
        C.c,
        A,
        np.concatenate([C.b, W.b, W.c - R @ C.c]),
        C.is_empty_marker or W.is_empty_marker,
    )


def intersect_halfspace(C: ConstrainedZonotope, H: Halfspace) -> ConstrainedZonotope:
    """C intersected with {p.x <= q}: one new generator and one new constraint.

    The new row reads p.G xi + (d/2) xi_new = (q - p.c - |p.G|_1) / 2 with
    d = q - p.c + |p.G|_1, which pins p.x to [p.c - |p.G|_1, q]. A negative d
    means the cut misses C; the row is then replaced by 0 = 1.
    """
    if H.p.size != C.dim:
        raise DimensionMismatch(f"halfspace in R^{H.p.size} applied to a set in R^{C.dim}")
    g = H.p @ C.G
    reach = float(np.abs(g).sum())
    offset = float(H.p @ C.c)
    d = H.q - offset + reach
    G = np.hstack([C.G, np.zeros((C.dim, 1))])
    A = np.hstack([C.A, np.zeros((C.n_constraints, 1))])
    if d < 0:
        logger.debug("halfspace misses the set (d=%.3e)", d)
        row, rhs, empty = np.zeros(C.n_generators + 1), 1.0, True
    else:
        row, rhs, empty = np.append(g, d / 2.0), (H.q - offset - reach) / 2.0, C.is_empty_marker
    return ConstrainedZonotope(G, C.c, np.vstack([A, row]), np.append(C.b, rhs), empty)


def intersect_hpoly(C: ConstrainedZonotope, P: HPolyhedron) -> ConstrainedZonotope:
    """Fold intersect_halfspace over the rows of P in order."""
    if P.dim != C.dim:
        raise DimensionMismatch(f"polyhedron in R^{P.dim} applied to a set in R^{C.dim}")
    if np.any(P.k[~np.any(P.H, axis=1)] < 0):
        return ConstrainedZonotope.empty(C.dim)
    for half in P.halfspaces():
        C = intersect_halfspace(C, half)
    return C


def min_row(C: ConstrainedZonotope, config: Config | None = None, verify: bool = True) -> ConstrainedZonotope:
    """MinRow representation: keep an independent subset of the rows of [A, b]."""
    cfg = resolve(config)
    if C.n_constraints == 0:
        reduced = C
    else:
        rows = independent_row_subset(np.column_stack([C.A, C.b]), cfg.rank_tol)
        if len(rows) == C.n_constraints:
            reduced = C
        else:
            logger.debug("min_row dropped %d of %d constraints", C.n_constraints - len(rows), C.n_constraints)
            reduced = ConstrainedZonotope(C.G, C.c, C.A[rows], C.b[rows], C.is_empty_marker)
    if verify:
        rank = numerical_rank(reduced.stacked(), cfg.rank_tol)
        if rank < reduced.dim + reduced.n_constraints:
            raise NotFullDimensional(
                f"rank([G; A]) = {rank} < n + M = {reduced.dim + reduced.n_constraints}"
            )
    return reduced


def _hpoly_bounds(P: HPolyhedron, config: Config) -> tuple[np.ndarray, np.ndarray]:
    n = P.dim
    lower, upper = np.empty(n), np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        hi, lo = P.support(e, config), -P.support(-e, config)
        if np.isinf(hi) and hi > 0 or np.isinf(lo) and lo < 0:
            raise Unbounded(f"polyhedron is unbounded along coordinate {i}")
        if np.isinf(hi) or np.isinf(lo):
            raise Degenerate("polyhedron is empty")
        lower[i], upper[i] = lo, hi
    return lower, upper


def invertible_from_hpoly(P: HPolyhedron, config: Config | None = None) -> ConstrainedZonotope:
    """Invertible representation of a bounded, full-dimensional H-Rep polytope.

    Z is the bounding box of P and row i adds a slack generator spanning
    [sigma_i, k_i], where sigma_i is the minimum of h_i over Z.
    """
    cfg = resolve(config)
    keep = np.any(P.H != 0, axis=1)
    if np.any(P.k[~keep] < 0):
        raise Degenerate("polyhedron is empty (0 <= negative)")
    H, k = P.H[keep], P.k[keep]
    lower, upper = _hpoly_bounds(HPolyhedron(H, k), cfg)
    width = upper - lower
    scale = max(1.0, np.abs(upper).max(), np.abs(lower).max())
    if np.any(width <= cfg.degeneracy_tol * scale):
        raise Degenerate(f"polyhedron is flat (smallest width {width.min():.3e})")

    half = width / 2.0
    center = (upper + lower) / 2.0
    sigma = H @ center - np.abs(H) @ half
    gap = k - sigma
    if np.any(gap <= cfg.degeneracy_tol * np.maximum(1.0, np.abs(k))):
        raise Degenerate("a facet of the polyhedron touches the opposite side of its bounding box")

    n, L = P.dim, H.shape[0]
    G_Z = np.diag(half)
    return ConstrainedZonotope(
        np.hstack([G_Z, np.zeros((n, L))]),
        center,
        np.hstack([H @ G_Z, np.diag((sigma - k) / 2.0)]),
        (sigma + k) / 2.0 - H @ center,
    )


def hpoly_from_invertible(C: ConstrainedZonotope, config: Config | None = None) -> HPolyhedron:
    """Exact H-Rep of an Invertible representation (2N rows)."""
    n, N, M = C.dim, C.n_generators, C.n_constraints
    if N != n + M:
        raise NotInvertible(f"[G; A] is {n + M} x {N}, not square")
    inverse = checked_inverse(C.stacked(), config)
    T = inverse[:, :n]
    v = inverse @ np.concatenate([-C.c, C.b])
    return HPolyhedron(np.vstack([T, -T]), np.concatenate([1.0 - v, 1.0 + v]), True)


def is_invertible_rep(C: ConstrainedZonotope, config: Config | None = None) -> bool:
    n, N, M = C.dim, C.n_generators, C.n_constraints
    if N != n + M or N == 0:
        return False
    return numerical_rank(C.stacked(), resolve(config).rank_tol) == N


def remove_redundant_rows(P: HPolyhedron, config: Config | None = None) -> HPolyhedron | None:
    """Drop rows implied by the others (one LP per row); None if P is empty."""
    cfg = resolve(config)
    norms = np.linalg.norm(P.H, axis=1)
    zero = norms == 0
    if np.any(P.k[zero] < -cfg.lp_tol):
        return None
    H = P.H[~zero] / norms[~zero, None]
    k = P.k[~zero] / norms[~zero]
    if H.shape[0] == 0:
        return HPolyhedron(np.zeros((0, P.dim)), np.zeros(0), P.bounded_hint)

    alive = np.ones(H.shape[0], dtype=bool)
    for i in range(H.shape[0]):
        alive[i] = False
        # row i is relaxed by one unit to keep the LP bounded along h_i
        out = lp_solve(
            LpProblem(
                H[i],
                ineq_lhs=np.vstack([H[alive], H[i]]),
                ineq_rhs=np.append(k[alive], k[i] + 1.0),
            ),
            cfg,
        )
        if out.status is LpStatus.INFEASIBLE:
            return None
        redundant = out.status is LpStatus.OPTIMAL and out.value <= k[i] + cfg.lp_tol * max(1.0, abs(k[i]))
        alive[i] = not redundant

    out = lp_solve(LpProblem(np.zeros(P.dim), ineq_lhs=H[alive], ineq_rhs=k[alive]), cfg)
    if out.status is LpStatus.INFEASIBLE:
        return None
    logger.debug("redundancy removal kept %d of %d rows", int(alive.sum()), P.n_rows)
    return HPolyhedron(H[alive], k[alive], P.bounded_hint)
