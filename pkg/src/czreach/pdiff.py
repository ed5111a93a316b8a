"""Inner and outer approximations of the Pontryagin difference C - S.

The inner approximation shrinks every generator of a MinRow minuend by a
diagonal factor D computed from one min-norm solve; the outer approximation
erodes a polyhedral cover of the minuend and cuts the translated minuend with
the eroded halfspaces. Both keep the minuend's constraint structure.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .config import Config, resolve
from .czops import intersect_hpoly, min_row, remove_redundant_rows
from .errors import DimensionMismatch, NormalizationDegenerate, NotFullDimensional
from .linalg import LpProblem, LpStatus, as_matrix, lp_solve, min_norm_solve, numerical_rank
from .sets import (
    ConstrainedZonotope,
    HPolyhedron,
    SymmetricKind,
    SymmetricSet,
    is_empty,
    is_full_dimensional,
    support_czono,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ShrinkDiag:
    """Diagonal of D; any entry below zero means the approximation is empty."""

    d: np.ndarray

    def is_empty(self, clamp_tol: float) -> bool:
        return bool(self.d.size) and float(self.d.min()) < -clamp_tol

    def clamped(self) -> np.ndarray:
        return np.maximum(self.d, 0.0)


def _check_dims(C: ConstrainedZonotope, S: SymmetricSet):
    if C.dim != S.dim:
        raise DimensionMismatch(f"minuend in R^{C.dim}, subtrahend in R^{S.dim}")


def _canonical(C: ConstrainedZonotope, cfg: Config, trusted_min_row: bool) -> ConstrainedZonotope:
    if not trusted_min_row or cfg.verify_min_row:
        C = min_row(C, cfg, verify=False)
    if cfg.debug_full_dim and not is_full_dimensional(C, cfg):
        raise NotFullDimensional(f"{C!r} failed the interior-point check")
    return C


def _exceeds_affine_dim(C: ConstrainedZonotope, S: SymmetricSet, cfg: Config) -> bool:
    if not S.closed_form or S.G.size == 0:
        return False
    return S.affine_dimension() > numerical_rank(C.G, cfg.rank_tol)


def shrink_diag(C: ConstrainedZonotope, S: SymmetricSet, config: Config | None = None) -> ShrinkDiag:
    """D_ii = 1 - rho_{S - c_S}(Gamma^T e_i) with Gamma the min-norm solution of
    [G; A] Gamma = [I; 0]. C must already be MinRow."""
    _check_dims(C, S)
    n, M = C.dim, C.n_constraints
    rhs = np.vstack([np.eye(n), np.zeros((M, n))])
    gamma = min_norm_solve(C.stacked(), rhs, config)
    return ShrinkDiag(1.0 - S.centered_support(gamma))


def _scaled(C: ConstrainedZonotope, d: np.ndarray, shift: np.ndarray) -> ConstrainedZonotope:
    return ConstrainedZonotope(C.G * d, C.c - shift, C.A * d, C.b)


def inner_pdiff_with_diag(
    C: ConstrainedZonotope,
    S: SymmetricSet,
    config: Config | None = None,
    trusted_min_row: bool = False,
) -> tuple[ConstrainedZonotope, ShrinkDiag | None]:
    """Inner approximation together with its diagonal (None when short-circuited)."""
    cfg = resolve(config)
    _check_dims(C, S)
    if C.is_empty_marker or _exceeds_affine_dim(C, S, cfg):
        return ConstrainedZonotope.empty(C.dim), None
    C = _canonical(C, cfg, trusted_min_row)
    diag = shrink_diag(C, S, cfg)
    if diag.is_empty(cfg.clamp_tol):
        logger.debug("inner difference is empty (min D_ii = %.3e)", diag.d.min())
        return ConstrainedZonotope.empty(C.dim), diag
    return _scaled(C, diag.clamped(), S.c), diag


def inner_pdiff(
    C: ConstrainedZonotope,
    S: SymmetricSet,
    config: Config | None = None,
    trusted_min_row: bool = False,
) -> ConstrainedZonotope:
    """Inner approximation of C - S with the complexity of C."""
    return inner_pdiff_with_diag(C, S, config, trusted_min_row)[0]


def two_stage_inner_pdiff_with_diag(
    C: ConstrainedZonotope, S: SymmetricSet, config: Config | None = None
) -> tuple[ConstrainedZonotope, ShrinkDiag | None]:
    """Baseline inner approximation for zonotopic S.

    Solves  min sum |Gamma_ij|  s.t.  [G; A] Gamma = [G_S; 0],  sum_j |Gamma_ij| <= 1
    with Gamma = P - Q, P, Q >= 0, and sets D_ii = 1 - |row i of Gamma|_1.
    """
    if S.kind is not SymmetricKind.ZONOTOPE:
        raise ValueError("two-stage requires zonotope subtrahend")
    _check_dims(C, S)
    if C.is_empty_marker:
        return ConstrainedZonotope.empty(C.dim), None
    N, N_S = C.n_generators, S.G.shape[1]
    if N_S == 0:
        d = np.ones(N)
        return _scaled(C, d, S.c), ShrinkDiag(d)

    GA = C.stacked()
    target = np.vstack([S.G, np.zeros((C.n_constraints, N_S))])
    # column-major vectorization: vec(GA X) = (I kron GA) vec(X)
    K = np.kron(np.eye(N_S), GA)
    row_sum = np.kron(np.ones((1, N_S)), np.eye(N))
    out = lp_solve(
        LpProblem(
            objective=-np.ones(2 * N * N_S),
            eq_lhs=np.hstack([K, -K]),
            eq_rhs=target.flatten(order="F"),
            ineq_lhs=np.hstack([row_sum, row_sum]),
            ineq_rhs=np.ones(N),
            lower=0.0,
            upper=1.0,
        ),
        config,
    )
    if out.status is not LpStatus.OPTIMAL:
        logger.debug("two-stage LP has no solution (%s)", out.status.name)
        return ConstrainedZonotope.empty(C.dim), None
    split = N * N_S
    gamma = (out.point[:split] - out.point[split:]).reshape((N, N_S), order="F")
    diag = ShrinkDiag(1.0 - np.abs(gamma).sum(axis=1))
    return _scaled(C, diag.clamped(), S.c), diag


def two_stage_inner_pdiff(
    C: ConstrainedZonotope, S: SymmetricSet, config: Config | None = None
) -> ConstrainedZonotope:
    return two_stage_inner_pdiff_with_diag(C, S, config)[0]


def outer_polyhedron(
    C: ConstrainedZonotope,
    config: Config | None = None,
    strict: bool = False,
    normalization_tol: float | None = None,
) -> HPolyhedron:
    """Polyhedral cover of a MinRow C with at most 2N rows.

    Row i of V = [G; A]^+ gives |v_i^T [x - c; b]| <= |v_i^T [G; A]|_1 for all
    x in C; each pair is normalized so the right-hand bound is one.
    """
    cfg = resolve(config)
    if C.is_empty_marker:
        return HPolyhedron.empty(C.dim)
    n, M = C.dim, C.n_constraints
    GA = C.stacked()
    V = min_norm_solve(GA, np.eye(n + M), cfg)
    norms = np.abs(V @ GA).sum(axis=1)
    tol = cfg.degeneracy_tol if normalization_tol is None else normalization_tol
    keep = norms >= tol
    if not np.all(keep):
        dropped = np.flatnonzero(~keep).tolist()
        if strict:
            raise NormalizationDegenerate(f"cover rows {dropped} cannot be normalized")
        logger.warning("cover rows %s dropped: normalization below %.1e", dropped, tol)
    V = V[keep] / norms[keep, None]
    offset = V @ np.concatenate([-C.c, C.b])
    Vx = V[:, :n]
    return HPolyhedron(
        np.vstack([Vx, -Vx]),
        np.concatenate([1.0 - offset, 1.0 + offset]),
        True if np.all(keep) else None,
    )


def bounding_box(C: ConstrainedZonotope, config: Config | None = None) -> tuple[np.ndarray, np.ndarray] | None:
    """Axis bounds from 2n support LPs; None if C is empty."""
    n = C.dim
    lower, upper = np.empty(n), np.empty(n)
    for i, e in enumerate(np.eye(n)):
        hi, lo = support_czono(C, e, config), support_czono(C, -e, config)
        if hi is None or lo is None:
            return None
        upper[i], lower[i] = hi.value, -lo.value
    return lower, upper


def outer_polyhedron_boxed(
    C: ConstrainedZonotope, config: Config | None = None, strict: bool = False, normalization_tol: float | None = None
) -> HPolyhedron:
    """outer_polyhedron intersected with the bounding box of C; always bounded."""
    P = outer_polyhedron(C, config, strict, normalization_tol)
    bounds = bounding_box(C, config)
    if bounds is None:
        return HPolyhedron.empty(C.dim)
    box = HPolyhedron.box(*bounds)
    return HPolyhedron(np.vstack([P.H, box.H]), np.concatenate([P.k, box.k]), True)


def ray_shoot_tighten(P: HPolyhedron, C: ConstrainedZonotope, dirs, config: Config | None = None) -> HPolyhedron:
    """Append the supporting halfspace of C in each direction."""
    dirs = as_matrix(dirs, "dirs", cols=P.dim) if np.size(dirs) else np.zeros((0, P.dim))
    rows, offsets = [P.H], [P.k]
    for nu in dirs:
        hit = support_czono(C, nu, config)
        if hit is None:
            return P.intersect(HPolyhedron.empty(P.dim))
        rows.append(nu[None, :])
        offsets.append([hit.value])
    return HPolyhedron(np.vstack(rows), np.concatenate(offsets), P.bounded_hint)


def hpoly_pdiff(P: HPolyhedron, S: SymmetricSet) -> HPolyhedron:
    """Exact H-Rep difference: k_i - rho_S(h_i)."""
    if P.dim != S.dim:
        raise DimensionMismatch(f"polyhedron in R^{P.dim}, subtrahend in R^{S.dim}")
    if P.n_rows == 0:
        return P
    shrink = P.H @ S.c + S.centered_support(P.H)
    return HPolyhedron(P.H, P.k - shrink, P.bounded_hint)


def outer_pdiff(
    C: ConstrainedZonotope,
    S: SymmetricSet,
    config: Config | None = None,
    trusted_min_row: bool = False,
    boxed: bool | None = None,
    reduce: bool | None = None,
) -> ConstrainedZonotope:
    """Outer approximation of C - S: cut C - c_S with the eroded cover of C.

    ``boxed`` and ``reduce`` default to the config switches.
    """
    cfg = resolve(config)
    _check_dims(C, S)
    boxed = cfg.outer_boxed if boxed is None else boxed
    reduce = cfg.outer_reduce if reduce is None else reduce
    if C.is_empty_marker or _exceeds_affine_dim(C, S, cfg):
        return ConstrainedZonotope.empty(C.dim)
    C = _canonical(C, cfg, trusted_min_row)

    cover = outer_polyhedron_boxed(C, cfg) if boxed else outer_polyhedron(C, cfg)
    if reduce:
        cover = remove_redundant_rows(cover, cfg)
        if cover is None:
            return ConstrainedZonotope.empty(C.dim)
    eroded = hpoly_pdiff(cover, S)
    if reduce:
        eroded = remove_redundant_rows(eroded, cfg)
        if eroded is None:
            return ConstrainedZonotope.empty(C.dim)
    result = intersect_hpoly(C.translate(-S.c), eroded)
    if is_empty(result, cfg):
        return ConstrainedZonotope.empty(C.dim)
    return result
