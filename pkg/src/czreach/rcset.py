"""Robust controllable set recursions for x+ = A_t x + B_t u + F_t w.

Working backwards from the goal, each step erodes K_{t+1} by F_t W_t, widens
it by -B_t U_t and pulls it back through A_t while intersecting the state
constraints. Variant INVERTIBLE_A pulls back with A_t^-1 and cuts with the
rows of an H-Rep X_t; variant POLYTOPIC_X uses the closed-form intersection
with a constrained-zonotope X_t and needs no inverse.
"""
import logging
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .config import Config, resolve
from .czops import affine_map, intersect_hpoly, intersect_inverse_affine, min_row, minkowski_sum
from .errors import NotFullDimensional, RankDeficient, ScenarioError
from .linalg import as_matrix, checked_inverse
from .pdiff import inner_pdiff, outer_pdiff, two_stage_inner_pdiff
from .sets import (
    ConstrainedZonotope,
    HPolyhedron,
    ReprComplexity,
    SymmetricKind,
    SymmetricSet,
    is_empty,
    is_full_dimensional,
    repr_complexity,
)

logger = logging.getLogger(__name__)


class Variant(Enum):
    INVERTIBLE_A = "invertible-a"
    POLYTOPIC_X = "polytopic-x"


@dataclass(frozen=True, eq=False)
class RcScenario:
    """Per-step system data for t = 0..T-1 plus the goal set at t = T."""

    A: tuple[np.ndarray, ...]
    B: tuple[np.ndarray, ...]
    F: tuple[np.ndarray, ...]
    U: tuple[ConstrainedZonotope, ...]
    W: tuple[SymmetricSet, ...]
    X: tuple[HPolyhedron | ConstrainedZonotope, ...]
    goal: ConstrainedZonotope
    variant: Variant
    name: str = ""

    def __post_init__(self):
        for attr in ("A", "B", "F"):
            mats = tuple(as_matrix(m, f"{attr}_t") for m in getattr(self, attr))
            for m in mats:
                m.flags.writeable = False
            object.__setattr__(self, attr, mats)
        for attr in ("U", "W", "X"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))
        errors = self.validate()
        if errors:
            raise ScenarioError("; ".join(errors))

    @classmethod
    def time_invariant(cls, A, B, F, U, W, X, goal, horizon: int, variant: Variant, name: str = "") -> "RcScenario":
        T = int(horizon)
        if T < 0:
            raise ScenarioError(f"horizon must be non-negative, got {horizon}")
        return cls((A,) * T, (B,) * T, (F,) * T, (U,) * T, (W,) * T, (X,) * T, goal, variant, name)

    @property
    def horizon(self) -> int:
        return len(self.A)

    @property
    def dim(self) -> int:
        return self.goal.dim

    def validate(self) -> list[str]:
        """Return list of consistency errors. Empty = valid."""
        errors = []
        T, n = self.horizon, self.dim
        lengths = {attr: len(getattr(self, attr)) for attr in ("A", "B", "F", "U", "W", "X")}
        if len(set(lengths.values())) != 1:
            errors.append(f"per-step sequences differ in length: {lengths}")
            return errors
        for t in range(T):
            A, B, F = self.A[t], self.B[t], self.F[t]
            if A.shape != (n, n):
                errors.append(f"A_{t} has shape {A.shape}, expected ({n}, {n})")
            if B.shape[0] != n or B.shape[1] != self.U[t].dim:
                errors.append(f"B_{t} has shape {B.shape}, U_{t} lives in R^{self.U[t].dim}")
            if F.shape[0] != n or F.shape[1] != self.W[t].dim:
                errors.append(f"F_{t} has shape {F.shape}, W_{t} lives in R^{self.W[t].dim}")
            X = self.X[t]
            if self.variant is Variant.INVERTIBLE_A and not isinstance(X, HPolyhedron):
                errors.append(f"X_{t} must be an H-Rep polyhedron for variant {self.variant.value}")
            if self.variant is Variant.POLYTOPIC_X and not isinstance(X, ConstrainedZonotope):
                errors.append(f"X_{t} must be a constrained zonotope for variant {self.variant.value}")
            if X.dim != n:
                errors.append(f"X_{t} lives in R^{X.dim}, state space is R^{n}")
        return errors

    def with_horizon(self, horizon: int) -> "RcScenario":
        """Truncate, or extend by repeating the last step."""
        T = int(horizon)
        if T <= self.horizon:
            cut = lambda seq: seq[:T]
        elif self.horizon == 0:
            raise ScenarioError("cannot extend a scenario without steps")
        else:
            cut = lambda seq: seq + (seq[-1],) * (T - self.horizon)
        return RcScenario(
            cut(self.A), cut(self.B), cut(self.F), cut(self.U), cut(self.W), cut(self.X),
            self.goal, self.variant, self.name,
        )

    def with_disturbance(self, W: SymmetricSet) -> "RcScenario":
        return RcScenario(
            self.A, self.B, self.F, self.U, (W,) * self.horizon, self.X,
            self.goal, self.variant, self.name,
        )

    def scaled_disturbance(self, alpha: float) -> "RcScenario":
        return RcScenario(
            self.A, self.B, self.F, self.U, tuple(w.scaled(alpha) for w in self.W), self.X,
            self.goal, self.variant, self.name,
        )


@dataclass
class RcResult:
    """Sets K_t indexed by t = 0..T, so ``sets[0]`` is K_0 and ``sets[-1]`` the goal."""

    sets: list[ConstrainedZonotope]
    complexities: list[ReprComplexity]
    step_seconds: list[float]
    empty: list[bool]
    method: str = "inner"
    notes: list[str] = field(default_factory=list)

    @property
    def k0(self) -> ConstrainedZonotope:
        return self.sets[0]

    @property
    def terminal(self) -> ConstrainedZonotope:
        return self.sets[-1]

    @property
    def horizon(self) -> int:
        return len(self.sets) - 1

    @property
    def total_seconds(self) -> float:
        return float(sum(self.step_seconds))


PdiffStep = Callable[[ConstrainedZonotope, SymmetricSet, Config, bool], ConstrainedZonotope]


def _pull_back(sc: RcScenario, cfg: Config) -> list[np.ndarray | None]:
    if sc.variant is not Variant.INVERTIBLE_A:
        return [None] * sc.horizon
    cache: dict[int, np.ndarray] = {}
    inverses = []
    for A in sc.A:
        if id(A) not in cache:
            cache[id(A)] = checked_inverse(A, cfg)
        inverses.append(cache[id(A)])
    return inverses


def _state_sets(sc: RcScenario, cfg: Config) -> list:
    if sc.variant is not Variant.POLYTOPIC_X:
        return list(sc.X)
    cache: dict[int, ConstrainedZonotope] = {}
    for X in sc.X:
        if id(X) not in cache:
            cache[id(X)] = min_row(X, cfg)
    return [cache[id(X)] for X in sc.X]


def _erode(step: PdiffStep, K: ConstrainedZonotope, S: SymmetricSet, cfg: Config) -> ConstrainedZonotope:
    try:
        return step(K, S, cfg, True)
    except RankDeficient:
        logger.debug("stacked [G; A] lost row rank; re-running min_row")
        return step(min_row(K, cfg, verify=False), S, cfg, True)


def _recurse(sc: RcScenario, step: PdiffStep, method: str, config: Config | None) -> RcResult:
    cfg = resolve(config)
    T, n = sc.horizon, sc.dim
    inverses = _pull_back(sc, cfg)
    states = _state_sets(sc, cfg)

    sets: list[ConstrainedZonotope | None] = [None] * (T + 1)
    seconds = [0.0] * (T + 1)
    empty = [False] * (T + 1)
    sets[T] = min_row(sc.goal, cfg)
    empty[T] = sets[T].is_empty_marker

    for t in range(T - 1, -1, -1):
        if empty[t + 1]:
            sets[t], empty[t] = ConstrainedZonotope.empty(n), True
            continue
        start = time.perf_counter()
        K = _erode(step, sets[t + 1], sc.W[t].affine_map(sc.F[t]), cfg)
        if not K.is_empty_marker:
            K = minkowski_sum(K, affine_map(-sc.B[t], sc.U[t]))
            if sc.variant is Variant.INVERTIBLE_A:
                K = intersect_hpoly(affine_map(inverses[t], K), states[t])
            else:
                K = intersect_inverse_affine(states[t], sc.A[t], K)
            # closed-form cuts can leave an infeasible set without the marker
            if is_empty(K, cfg):
                K = ConstrainedZonotope.empty(n)
        seconds[t] = time.perf_counter() - start
        if K.is_empty_marker:
            logger.warning("%s RC set is empty at t=%d; earlier sets are empty too", method, t)
            sets[t], empty[t] = ConstrainedZonotope.empty(n), True
            continue
        if cfg.debug_full_dim and not is_full_dimensional(K, cfg):
            raise NotFullDimensional(f"{method} RC set at t={t} is not full-dimensional")
        sets[t] = K
        cx = repr_complexity(K)
        logger.info(
            "%s t=%d M=%d N=%d dof=%s %.1f ms",
            method, t, K.n_constraints, K.n_generators, cx.dof_order, 1e3 * seconds[t],
        )
    return RcResult(sets, [repr_complexity(K) for K in sets], seconds, empty, method)


def rc_inner(sc: RcScenario, config: Config | None = None) -> RcResult:
    """Inner approximation of the T-step RC sets."""
    return _recurse(sc, lambda K, S, cfg, trusted: inner_pdiff(K, S, cfg, trusted), "inner", config)


def rc_outer(sc: RcScenario, config: Config | None = None, reduce: bool = True) -> RcResult:
    """Outer approximation; LP redundancy removal is on unless ``reduce`` is False."""

    def step(K, S, cfg, trusted):
        return outer_pdiff(K, S, cfg, trusted, reduce=reduce)

    return _recurse(sc, step, "outer", config)


def rc_two_stage(sc: RcScenario, config: Config | None = None) -> RcResult:
    """Inner recursion with the LP-based two-stage difference (zonotopic W only)."""
    if any(w.kind is not SymmetricKind.ZONOTOPE for w in sc.W):
        raise ValueError("two-stage requires zonotope disturbance sets")
    return _recurse(sc, lambda K, S, cfg, trusted: two_stage_inner_pdiff(K, S, cfg), "two-stage", config)


def predicted_complexity(sc: RcScenario) -> ReprComplexity:
    """Closed-form complexity of the inner K_0, summed step by step."""
    n = sc.dim
    M, N = sc.goal.n_constraints, sc.goal.n_generators
    for t in range(sc.horizon):
        U = sc.U[t]
        if sc.variant is Variant.INVERTIBLE_A:
            rows = sum(1 for _ in sc.X[t].halfspaces())
            M += U.n_constraints + rows
            N += U.n_generators + rows
        else:
            X = sc.X[t]
            M += X.n_constraints + U.n_constraints + n
            N += X.n_generators + U.n_generators
    return ReprComplexity(M, Fraction(N - M, n))
