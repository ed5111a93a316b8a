"""Set types and their support / membership oracles.

A constrained zonotope is the affine image ``{G xi + c : |xi|_inf <= 1, A xi = b}``.
Symmetric sets (zonotope, ellipsoid, image of the l1 ball, or a caller-supplied
support function) are the subtrahends of Pontryagin differences.
"""
import logging
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from enum import Enum, auto
from fractions import Fraction

import numpy as np

from .config import Config, resolve
from .errors import DimensionMismatch, NumericalFailure
from .linalg import (
    LpProblem,
    LpStatus,
    as_matrix,
    as_vector,
    frozen,
    independent_row_subset,
    lp_solve,
    numerical_rank,
)

logger = logging.getLogger(__name__)


def _generator_matrix(value, name: str) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class ConstrainedZonotope:
    """(G, c, A, b); A and b may be omitted for a plain zonotope."""

    G: np.ndarray
    c: np.ndarray
    A: np.ndarray | None = None
    b: np.ndarray | None = None
    is_empty_marker: bool = False

    def __post_init__(self):
        G = _generator_matrix(self.G, "G")
        n, N = G.shape
        c = as_vector(self.c, "c", n)
        A = np.zeros((0, N)) if self.A is None else as_matrix(self.A, "A", cols=N)
        b = np.zeros(0) if self.b is None else as_vector(self.b, "b", A.shape[0])
        for name, value in (("G", G), ("c", c), ("A", A), ("b", b)):
            object.__setattr__(self, name, frozen(value))

    @classmethod
    def from_zonotope(cls, G, c) -> "ConstrainedZonotope":
        return cls(G, c)

    @classmethod
    def box(cls, lower, upper) -> "ConstrainedZonotope":
        lower = as_vector(lower, "lower")
        upper = as_vector(upper, "upper", lower.size)
        if np.any(upper < lower):
            raise ValueError("box upper bound below lower bound")
        return cls(np.diag((upper - lower) / 2.0), (upper + lower) / 2.0)

    @classmethod
    def point(cls, x) -> "ConstrainedZonotope":
        x = as_vector(x, "x")
        return cls(np.zeros((x.size, 0)), x)

    @classmethod
    def empty(cls, dim: int) -> "ConstrainedZonotope":
        """Canonical empty set: one generator tied by the infeasible row 0 = 1."""
        return cls(np.zeros((dim, 1)), np.zeros(dim), np.zeros((1, 1)), np.ones(1), True)

    @property
    def dim(self) -> int:
        return self.G.shape[0]

    @property
    def n_generators(self) -> int:
        return self.G.shape[1]

    @property
    def n_constraints(self) -> int:
        return self.A.shape[0]

    def stacked(self) -> np.ndarray:
        """[G; A], the matrix whose row rank decides the MinRow property."""
        return np.vstack([self.G, self.A])

    def translate(self, shift) -> "ConstrainedZonotope":
        shift = as_vector(shift, "shift", self.dim)
        return ConstrainedZonotope(self.G, self.c + shift, self.A, self.b, self.is_empty_marker)

    def __repr__(self) -> str:
        tag = ", empty" if self.is_empty_marker else ""
        return (
            f"ConstrainedZonotope(n={self.dim}, N={self.n_generators}, "
            f"M={self.n_constraints}{tag})"
        )


class SymmetricKind(Enum):
    ZONOTOPE = auto()
    ELLIPSOID = auto()
    CROSS_POLYTOPE = auto()
    GENERIC = auto()


# dual norm applied to G^T nu for each closed-form kind
_DUAL_ORD = {
    SymmetricKind.ZONOTOPE: 1,
    SymmetricKind.ELLIPSOID: 2,
    SymmetricKind.CROSS_POLYTOPE: np.inf,
}


@dataclass(frozen=True, eq=False)
class SymmetricSet:
    """Affine image c + G B of a unit norm ball B, or a generic symmetric set.

    For GENERIC sets ``evaluator`` returns the support of S - c at an ambient
    direction and G is the identity.
    """

    kind: SymmetricKind
    G: np.ndarray
    c: np.ndarray
    evaluator: Callable[[np.ndarray], float] | None = None

    def __post_init__(self):
        G = _generator_matrix(self.G, "G")
        c = as_vector(self.c, "c", G.shape[0])
        if self.kind is SymmetricKind.GENERIC and self.evaluator is None:
            raise ValueError("generic symmetric set needs a support evaluator")
        object.__setattr__(self, "G", frozen(G))
        object.__setattr__(self, "c", frozen(c))

    @classmethod
    def zonotope(cls, G, c=None) -> "SymmetricSet":
        G = _generator_matrix(G, "G")
        return cls(SymmetricKind.ZONOTOPE, G, np.zeros(G.shape[0]) if c is None else c)

    @classmethod
    def ellipsoid(cls, G, c=None) -> "SymmetricSet":
        G = _generator_matrix(G, "G")
        if G.shape[0] != G.shape[1]:
            raise DimensionMismatch(f"ellipsoid generator must be square, got {G.shape}")
        return cls(SymmetricKind.ELLIPSOID, G, np.zeros(G.shape[0]) if c is None else c)

    @classmethod
    def cross_polytope(cls, G, c=None) -> "SymmetricSet":
        G = _generator_matrix(G, "G")
        return cls(SymmetricKind.CROSS_POLYTOPE, G, np.zeros(G.shape[0]) if c is None else c)

    @classmethod
    def generic(cls, evaluator: Callable[[np.ndarray], float], dim: int, c=None) -> "SymmetricSet":
        """Wrap a support function of a symmetric compact convex set about ``c``.

        The evaluator is trusted to be exact; only one symmetry check is run.
        """
        nu = np.arange(1.0, dim + 1.0)
        nu /= np.linalg.norm(nu)
        ahead, behind = float(evaluator(nu)), float(evaluator(-nu))
        if abs(ahead - behind) > 1e-9 * (1.0 + abs(ahead)):
            raise ValueError(
                f"support evaluator is not symmetric: {ahead!r} vs {behind!r}"
            )
        return cls(
            SymmetricKind.GENERIC, np.eye(dim), np.zeros(dim) if c is None else c, evaluator
        )

    @classmethod
    def singleton(cls, x) -> "SymmetricSet":
        x = as_vector(x, "x")
        return cls.zonotope(np.zeros((x.size, 0)), x)

    @property
    def dim(self) -> int:
        return self.G.shape[0]

    @property
    def closed_form(self) -> bool:
        return self.kind is not SymmetricKind.GENERIC

    def centered_support(self, directions) -> np.ndarray | float:
        """Support of S - c along each row of ``directions`` (or one vector)."""
        H = np.asarray(directions, dtype=float)
        single = H.ndim == 1
        H = H.reshape(-1, self.dim) if H.size else np.zeros((0, self.dim))
        if H.shape[1] != self.dim:
            raise DimensionMismatch(f"direction of length {H.shape[1]} for a set in R^{self.dim}")
        if self.kind is SymmetricKind.GENERIC:
            values = np.array([float(self.evaluator(h)) for h in H])
        elif self.G.shape[1] == 0:
            values = np.zeros(H.shape[0])
        else:
            values = np.linalg.norm(H @ self.G, ord=_DUAL_ORD[self.kind], axis=1)
        return float(values[0]) if single else values

    def support(self, nu) -> float:
        nu = as_vector(nu, "nu", self.dim)
        return float(nu @ self.c) + self.centered_support(nu)

    def support_vectors(self, directions) -> np.ndarray:
        """Maximizers of the support function, one row per direction."""
        H = np.atleast_2d(np.asarray(directions, dtype=float))
        if self.kind is SymmetricKind.GENERIC:
            raise ValueError("generic symmetric sets expose no support vectors")
        if self.G.shape[1] == 0:
            return np.tile(self.c, (H.shape[0], 1))
        proj = H @ self.G
        if self.kind is SymmetricKind.ZONOTOPE:
            xi = np.sign(proj)
        elif self.kind is SymmetricKind.ELLIPSOID:
            norms = np.linalg.norm(proj, axis=1, keepdims=True)
            xi = np.divide(proj, norms, out=np.zeros_like(proj), where=norms > 0)
        else:
            xi = np.zeros_like(proj)
            rows = np.arange(proj.shape[0])
            j = np.argmax(np.abs(proj), axis=1)
            xi[rows, j] = np.sign(proj[rows, j])
        return self.c + xi @ self.G.T

    def affine_map(self, F) -> "SymmetricSet":
        F = as_matrix(F, "F", cols=self.dim)
        if self.kind is SymmetricKind.GENERIC:
            inner = self.evaluator
            return SymmetricSet(
                SymmetricKind.GENERIC, np.eye(F.shape[0]), F @ self.c, lambda nu: inner(F.T @ nu)
            )
        # the square-generator rule is enforced by the ellipsoid factory only
        return SymmetricSet(self.kind, F @ self.G, F @ self.c)

    def scaled(self, alpha: float) -> "SymmetricSet":
        """Shrink or grow about the center by a non-negative factor."""
        if alpha < 0:
            raise ValueError("scale factor must be non-negative")
        if self.kind is SymmetricKind.GENERIC:
            inner = self.evaluator
            return SymmetricSet(self.kind, self.G, self.c, lambda nu: alpha * inner(nu))
        return SymmetricSet(self.kind, alpha * self.G, self.c)

    def affine_dimension(self) -> int:
        if self.kind is SymmetricKind.GENERIC:
            return self.dim
        return numerical_rank(self.G) if self.G.size else 0

    def as_czono(self) -> ConstrainedZonotope:
        if self.kind is not SymmetricKind.ZONOTOPE:
            raise ValueError(f"{self.kind.name.lower()} is not a constrained zonotope")
        return ConstrainedZonotope(self.G, self.c)

    def __repr__(self) -> str:
        return f"SymmetricSet({self.kind.name.lower()}, n={self.dim}, N={self.G.shape[1]})"


@dataclass(frozen=True)
class Halfspace:
    """{x : p.x <= q}"""

    p: np.ndarray
    q: float

    def __post_init__(self):
        p = as_vector(self.p, "p")
        if not np.any(p):
            raise ValueError("halfspace normal must be non-zero")
        object.__setattr__(self, "p", frozen(p))
        object.__setattr__(self, "q", float(self.q))


@dataclass(frozen=True, eq=False)
class HPolyhedron:
    """{x : H x <= k}; possibly unbounded."""

    H: np.ndarray
    k: np.ndarray
    bounded_hint: bool | None = None

    def __post_init__(self):
        H = np.array(self.H, dtype=float)
        if H.ndim != 2:
            raise DimensionMismatch(f"H must be 2-D, got shape {H.shape}")
        if not np.all(np.isfinite(H)):
            raise ValueError("H has non-finite entries")
        k = as_vector(self.k, "k", H.shape[0])
        object.__setattr__(self, "H", frozen(H))
        object.__setattr__(self, "k", frozen(k))

    @classmethod
    def box(cls, lower, upper) -> "HPolyhedron":
        lower = as_vector(lower, "lower")
        upper = as_vector(upper, "upper", lower.size)
        eye = np.eye(lower.size)
        return cls(np.vstack([eye, -eye]), np.concatenate([upper, -lower]), True)

    @classmethod
    def empty(cls, dim: int) -> "HPolyhedron":
        """Infeasible row 0 <= -1."""
        return cls(np.zeros((1, dim)), [-1.0], True)

    @classmethod
    def from_halfspaces(cls, halfspaces: list[Halfspace], dim: int) -> "HPolyhedron":
        if not halfspaces:
            return cls(np.zeros((0, dim)), np.zeros(0))
        return cls(np.vstack([h.p for h in halfspaces]), [h.q for h in halfspaces])

    @property
    def dim(self) -> int:
        return self.H.shape[1]

    @property
    def n_rows(self) -> int:
        return self.H.shape[0]

    def halfspaces(self) -> Iterator[Halfspace]:
        for p, q in zip(self.H, self.k):
            if np.any(p):
                yield Halfspace(p, q)

    def intersect(self, other: "HPolyhedron") -> "HPolyhedron":
        if other.dim != self.dim:
            raise DimensionMismatch(f"cannot intersect R^{self.dim} with R^{other.dim}")
        return HPolyhedron(np.vstack([self.H, other.H]), np.concatenate([self.k, other.k]))

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = as_vector(x, "x", self.dim)
        return bool(np.all(self.H @ x <= self.k + tol))

    def support(self, nu, config: Config | None = None) -> float:
        """Support value; +inf when unbounded, -inf when empty."""
        nu = as_vector(nu, "nu", self.dim)
        out = lp_solve(LpProblem(nu, ineq_lhs=self.H, ineq_rhs=self.k), config)
        if out.status is LpStatus.UNBOUNDED:
            return float("inf")
        if out.status is LpStatus.INFEASIBLE:
            return float("-inf")
        return out.value


@dataclass(frozen=True)
class ReprComplexity:
    """(constraints M, degrees-of-freedom order (N - M) / n)."""

    constraints: int
    dof_order: Fraction

    def generators(self, dim: int) -> int:
        count = self.dof_order * dim + self.constraints
        if count.denominator != 1:
            raise ValueError(f"complexity {self} is inconsistent with dimension {dim}")
        return int(count)

    def __str__(self) -> str:
        return f"({self.constraints}, {self.dof_order})"


@dataclass(frozen=True)
class SupportPoint:
    value: float
    point: np.ndarray


def circle_directions(k: int) -> np.ndarray:
    """k unit directions at angles 2 pi j / k, j = 0..k-1."""
    theta = 2.0 * np.pi * np.arange(k) / k
    return np.column_stack([np.cos(theta), np.sin(theta)])


def support_symmetric(S: SymmetricSet, nu) -> float:
    return S.support(nu)


def _feasible_without_generators(C: ConstrainedZonotope, tol: float) -> bool:
    return bool(np.all(np.abs(C.b) <= tol))


def support_czono(C: ConstrainedZonotope, nu, config: Config | None = None) -> SupportPoint | None:
    """Support value and a support vector of C; None when C is empty."""
    nu = as_vector(nu, "nu", C.dim)
    if C.is_empty_marker:
        return None
    if C.n_generators == 0:
        if not _feasible_without_generators(C, resolve(config).lp_tol):
            return None
        return SupportPoint(float(nu @ C.c), C.c.copy())
    out = lp_solve(
        LpProblem(C.G.T @ nu, eq_lhs=C.A, eq_rhs=C.b, lower=-1.0, upper=1.0), config
    )
    if out.status is LpStatus.INFEASIBLE:
        return None
    if out.status is LpStatus.UNBOUNDED:
        raise NumericalFailure("support LP over a bounded set reported unbounded")
    point = C.G @ out.point + C.c
    return SupportPoint(float(nu @ point), point)


def membership_czono(
    C: ConstrainedZonotope, x, tol: float | None = None, config: Config | None = None
) -> bool:
    """Whether x lies within l_inf distance ``tol`` of C."""
    cfg = resolve(config)
    tol = cfg.membership_tol if tol is None else tol
    x = as_vector(x, "x", C.dim)
    if C.is_empty_marker:
        return False
    n, N = C.G.shape
    if N == 0:
        return _feasible_without_generators(C, cfg.lp_tol) and bool(
            np.max(np.abs(C.c - x), initial=0.0) <= tol
        )
    # variables (xi, t): maximize -t with |G xi + c - x| <= t
    ones = np.ones((n, 1))
    problem = LpProblem(
        objective=np.concatenate([np.zeros(N), [-1.0]]),
        eq_lhs=np.hstack([C.A, np.zeros((C.n_constraints, 1))]),
        eq_rhs=C.b,
        ineq_lhs=np.vstack([np.hstack([C.G, -ones]), np.hstack([-C.G, -ones])]),
        ineq_rhs=np.concatenate([x - C.c, C.c - x]),
        lower=np.concatenate([-np.ones(N), [0.0]]),
        upper=np.concatenate([np.ones(N), [np.inf]]),
    )
    out = lp_solve(problem, cfg)
    if out.status is not LpStatus.OPTIMAL:
        return False
    return -out.value <= tol


def boundary_sample(C: ConstrainedZonotope, k: int = 100, config: Config | None = None) -> np.ndarray | None:
    """Support vectors of a planar set in k equi-spaced directions; None if empty."""
    if C.dim != 2:
        raise DimensionMismatch(f"boundary sampling needs a planar set, got R^{C.dim}")
    points = []
    for nu in circle_directions(k):
        hit = support_czono(C, nu, config)
        if hit is None:
            return None
        points.append(hit.point)
    return np.array(points)


def is_empty(C: ConstrainedZonotope, config: Config | None = None) -> bool:
    if C.is_empty_marker:
        return True
    if C.n_constraints == 0:
        return False
    if C.n_generators == 0:
        return not _feasible_without_generators(C, resolve(config).lp_tol)
    out = lp_solve(
        LpProblem(np.zeros(C.n_generators), eq_lhs=C.A, eq_rhs=C.b, lower=-1.0, upper=1.0),
        config,
    )
    return out.status is LpStatus.INFEASIBLE


def repr_complexity(C: ConstrainedZonotope) -> ReprComplexity:
    M = C.n_constraints
    return ReprComplexity(M, Fraction(C.n_generators - M, C.dim))


def is_full_dimensional(C: ConstrainedZonotope, config: Config | None = None) -> bool:
    """Interior-slack LP on B_inf(A, b) plus a rank check of [G; A]."""
    cfg = resolve(config)
    if C.is_empty_marker or C.n_generators == 0:
        return False
    N = C.n_generators
    # maximize r with |xi_i| + r <= 1, A xi = b
    eye = np.eye(N)
    slack = np.ones((N, 1))
    out = lp_solve(
        LpProblem(
            objective=np.concatenate([np.zeros(N), [1.0]]),
            eq_lhs=np.hstack([C.A, np.zeros((C.n_constraints, 1))]),
            eq_rhs=C.b,
            ineq_lhs=np.vstack([np.hstack([eye, slack]), np.hstack([-eye, slack])]),
            ineq_rhs=np.ones(2 * N),
            lower=np.concatenate([-np.ones(N), [0.0]]),
            upper=np.concatenate([np.ones(N), [1.0]]),
        ),
        cfg,
    )
    if out.status is not LpStatus.OPTIMAL or out.value <= cfg.degeneracy_tol:
        return False
    rows = independent_row_subset(np.column_stack([C.A, C.b]), cfg.rank_tol)
    return numerical_rank(np.vstack([C.G, C.A[rows]]), cfg.rank_tol) == C.dim + len(rows)
