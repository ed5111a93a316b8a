"""Dense numerical kernels: min-norm solves, rank, row selection, expm, LPs."""
import logging
from dataclasses import dataclass, field
from enum import Enum, auto

import numpy as np
import scipy.linalg
from scipy.optimize import linprog

from .config import Config, resolve
from .errors import DimensionMismatch, NotInvertible, NumericalFailure, RankDeficient

logger = logging.getLogger(__name__)


def as_matrix(value, name: str = "matrix", cols: int | None = None) -> np.ndarray:
    """Coerce to a finite 2-D float array; an empty list becomes a 0 x cols matrix."""
    arr = np.array(value, dtype=float)
    if arr.size == 0:
        width = 0 if cols is None else cols
        if arr.ndim == 2 and arr.shape[1] == width:
            return np.zeros(arr.shape)
        return np.zeros((0, width))
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    if cols is not None and arr.shape[1] != cols:
        raise DimensionMismatch(f"{name} must have {cols} columns, got {arr.shape[1]}")
    return arr


def as_vector(value, name: str = "vector", size: int | None = None) -> np.ndarray:
    arr = np.array(value, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    if size is not None and arr.size != size:
        raise DimensionMismatch(f"{name} must have length {size}, got {arr.size}")
    return arr


def frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


# ---------------------------------------------------------------------------
# Rank and min-norm solutions
# ---------------------------------------------------------------------------


def numerical_rank(A, tol: float | None = None) -> int:
    """Count singular values above tol * s_max * max(rows, cols)."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0
    tol = np.finfo(float).eps if tol is None else tol
    s = scipy.linalg.svdvals(A, check_finite=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0] * max(A.shape)))


def independent_row_subset(M, tol: float | None = None) -> list[int]:
    """Indices of a maximal independent row subset, chosen greedily top-down.

    A row is kept iff its residual against the rows already kept (two-pass
    Gram-Schmidt) exceeds the rank threshold.
    """
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return []
    tol = np.finfo(float).eps if tol is None else tol
    s_max = scipy.linalg.svdvals(M, check_finite=False)[0]
    if s_max == 0.0:
        return []
    # two-pass Gram-Schmidt leaves residual noise of a few ulps per row
    threshold = 16.0 * tol * s_max * max(M.shape)
    basis = np.zeros((min(M.shape), M.shape[1]))
    kept: list[int] = []
    for i, row in enumerate(M):
        q = basis[: len(kept)]
        r = row - q.T @ (q @ row)
        r = r - q.T @ (q @ r)
        norm = np.linalg.norm(r)
        if norm > threshold:
            basis[len(kept)] = r / norm
            kept.append(i)
            if len(kept) == basis.shape[0]:
                break
    return kept


def _row_r_factor(A: np.ndarray) -> np.ndarray:
    """R factor of the QR decomposition of A^T, so that A A^T = R^T R."""
    (r,) = scipy.linalg.qr(A.T, mode="r", check_finite=False)
    m = A.shape[0]
    return r[:m, :m]


def min_norm_solve(A, B, config: Config | None = None) -> np.ndarray:
    """Minimum Frobenius-norm X with A X = B for full-row-rank A.

    Uses the R factor of A^T = Q R without forming Q: X = A^T R^-1 R^-T B,
    followed by one step of iterative refinement on the residual.
    """
    cfg = resolve(config)
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {A.shape}")
    m, n = A.shape
    vector = B.ndim == 1
    if B.ndim not in (1, 2) or B.shape[0] != m:
        raise DimensionMismatch(f"right-hand side of shape {B.shape} does not fit {m} rows")
    B2 = B.reshape(m, 1) if vector else B
    if m > n:
        raise RankDeficient(f"{m} x {n} system cannot have full row rank")
    if m == 0:
        out = np.zeros((n, B2.shape[1]))
        return out[:, 0] if vector else out

    r = _row_r_factor(A)
    diag = np.abs(np.diag(r))
    scale = diag.max()
    if scale == 0.0 or diag.min() <= cfg.rank_tol * scale * max(m, n):
        raise RankDeficient(
            f"{m} x {n} matrix is numerically rank deficient "
            f"(|R_kk| min {diag.min():.3e}, max {scale:.3e})"
        )

    def _apply(rhs: np.ndarray) -> np.ndarray:
        y = scipy.linalg.solve_triangular(r, rhs, trans="T", check_finite=False)
        z = scipy.linalg.solve_triangular(r, y, check_finite=False)
        return A.T @ z

    X = _apply(B2)
    X += _apply(B2 - A @ X)
    return X[:, 0] if vector else X


def expm(A) -> np.ndarray:
    """Matrix exponential (scaling and squaring with a Pade approximant)."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expm needs a square matrix, got shape {A.shape}")
    if A.size == 0:
        return np.zeros_like(A)
    return scipy.linalg.expm(A)


def checked_inverse(A, config: Config | None = None) -> np.ndarray:
    """Inverse of a square matrix, refusing ill-conditioned input."""
    cfg = resolve(config)
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"cannot invert matrix of shape {A.shape}")
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > cfg.max_condition:
        raise NotInvertible(f"condition number {cond:.3e} exceeds {cfg.max_condition:.1e}")
    return scipy.linalg.inv(A, check_finite=False)


# ---------------------------------------------------------------------------
# Linear programs
# ---------------------------------------------------------------------------


class LpStatus(Enum):
    OPTIMAL = auto()
    INFEASIBLE = auto()
    UNBOUNDED = auto()


@dataclass
class LpProblem:
    """maximize objective @ x subject to equality, inequality and bound rows."""

    objective: np.ndarray
    eq_lhs: np.ndarray | None = None
    eq_rhs: np.ndarray | None = None
    ineq_lhs: np.ndarray | None = None
    ineq_rhs: np.ndarray | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).reshape(-1)
        n = self.objective.size
        self.eq_lhs, self.eq_rhs = self._rows(self.eq_lhs, self.eq_rhs, n, "equality")
        self.ineq_lhs, self.ineq_rhs = self._rows(self.ineq_lhs, self.ineq_rhs, n, "inequality")
        self.lower = np.full(n, -np.inf) if self.lower is None else np.broadcast_to(
            np.asarray(self.lower, dtype=float), (n,)).copy()
        self.upper = np.full(n, np.inf) if self.upper is None else np.broadcast_to(
            np.asarray(self.upper, dtype=float), (n,)).copy()
        if np.any(self.lower > self.upper):
            raise DimensionMismatch("lower bound exceeds upper bound")

    @staticmethod
    def _rows(lhs, rhs, n: int, kind: str) -> tuple[np.ndarray, np.ndarray]:
        if lhs is None or np.size(lhs) == 0:
            return np.zeros((0, n)), np.zeros(0)
        lhs = np.asarray(lhs, dtype=float).reshape(-1, n)
        rhs = np.asarray(rhs, dtype=float).reshape(-1)
        if lhs.shape[0] != rhs.size:
            raise DimensionMismatch(
                f"{kind} rows: {lhs.shape[0]} left-hand sides but {rhs.size} right-hand sides"
            )
        return lhs, rhs

    @property
    def size(self) -> int:
        return self.objective.size


@dataclass
class LpOutcome:
    status: LpStatus
    value: float = float("nan")
    point: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def lp_solve(problem: LpProblem, config: Config | None = None) -> LpOutcome:
    """Solve a dense LP with HiGHS dual simplex.

    Infeasible and unbounded problems come back as statuses; any other
    solver failure raises NumericalFailure.
    """
    cfg = resolve(config)
    res = _highs(problem, problem.objective, cfg)
    if res.status == 0:
        x = res.x
        return LpOutcome(LpStatus.OPTIMAL, float(problem.objective @ x), x)
    if res.status == 3:
        return LpOutcome(LpStatus.UNBOUNDED, float("inf"))
    if res.status == 2:
        # presolve may not separate infeasible from unbounded
        feasible = _highs(problem, np.zeros(problem.size), cfg)
        if feasible.status == 0 and np.any(problem.objective):
            return LpOutcome(LpStatus.UNBOUNDED, float("inf"))
        return LpOutcome(LpStatus.INFEASIBLE)
    raise NumericalFailure(f"LP solver failed (status {res.status}): {res.message}")


def _highs(problem: LpProblem, objective: np.ndarray, cfg: Config):
    n = problem.size
    has_eq = problem.eq_lhs.shape[0] > 0
    has_ineq = problem.ineq_lhs.shape[0] > 0
    bounds = np.column_stack([problem.lower, problem.upper]) if n else None
    return linprog(
        -objective,
        A_ub=problem.ineq_lhs if has_ineq else None,
        b_ub=problem.ineq_rhs if has_ineq else None,
        A_eq=problem.eq_lhs if has_eq else None,
        b_eq=problem.eq_rhs if has_eq else None,
        bounds=bounds,
        method="highs-ds",
        options={
            "primal_feasibility_tolerance": cfg.lp_tol,
            "dual_feasibility_tolerance": cfg.lp_tol,
        },
    )
