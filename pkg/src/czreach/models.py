"""Built-in case-study systems."""
import logging
from dataclasses import dataclass

import numpy as np

from .czops import invertible_from_hpoly
from .linalg import as_matrix, expm
from .rcset import RcScenario, Variant
from .sets import ConstrainedZonotope, HPolyhedron, SymmetricSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LtiPlant:
    A: np.ndarray
    B: np.ndarray
    F: np.ndarray
    discrete: bool = False
    dt: float | None = None

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        B = as_matrix(self.B, "B")
        F = as_matrix(self.F, "F")
        n = A.shape[0]
        if A.shape != (n, n) or B.shape[0] != n or F.shape[0] != n:
            raise ValueError(f"inconsistent plant shapes A{A.shape} B{B.shape} F{F.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "F", F)

    @property
    def dim(self) -> int:
        return self.A.shape[0]


def zoh(A_c, B_c, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Zero-order hold: exp([[A, B], [0, 0]] dt) = [[A_d, B_d], [0, I]]."""
    A_c = as_matrix(A_c, "A_c")
    B_c = as_matrix(B_c, "B_c", cols=None)
    n, m = B_c.shape
    block = np.zeros((n + m, n + m))
    block[:n, :n] = A_c
    block[:n, n:] = B_c
    phi = expm(block * dt)
    return phi[:n, :n], phi[:n, n:]


def discretize(plant: LtiPlant, dt: float) -> LtiPlant:
    """ZOH for inputs and disturbances together."""
    if plant.discrete:
        raise ValueError("plant is already discrete")
    A_d, BF_d = zoh(plant.A, np.hstack([plant.B, plant.F]), dt)
    m = plant.B.shape[1]
    return LtiPlant(A_d, BF_d[:, :m], BF_d[:, m:], True, dt)


def axis_aligned_cover(S: SymmetricSet) -> SymmetricSet:
    """Tightest axis-aligned box zonotope containing S."""
    half = S.centered_support(np.eye(S.dim))
    return SymmetricSet.zonotope(np.diag(half), S.c)


_DOUBLE_INTEGRATOR_W = {
    "ball": lambda: SymmetricSet.ellipsoid(0.1 * np.eye(2)),
    "ellipsoid": lambda: SymmetricSet.ellipsoid(np.diag([0.2, 0.04]), [0.1, 0.1]),
}


def double_integrator(dt: float = 0.1, disturbance: str = "ball", horizon: int = 20) -> RcScenario:
    """Sampled double integrator with X = G = [-2, 2] x [-3, 3] and U = [-2, 2].

    ``disturbance`` is one of "ball", "ellipsoid", "zono-ball" (alias
    "zono-outer") or "zono-ellipsoid"; the "zono-" forms use the box
    zonotope covering the named set.
    """
    name = "zono-ball" if disturbance == "zono-outer" else disturbance
    base = name.removeprefix("zono-")
    if base not in _DOUBLE_INTEGRATOR_W:
        raise ValueError(f"unknown disturbance {disturbance!r}")
    W = _DOUBLE_INTEGRATOR_W[base]()
    if name.startswith("zono-"):
        W = axis_aligned_cover(W)

    A = np.array([[1.0, dt], [0.0, 1.0]])
    B = np.array([[dt**2 / 2.0], [dt]])
    box = HPolyhedron.box([-2.0, -3.0], [2.0, 3.0])
    return RcScenario.time_invariant(
        A,
        B,
        np.eye(2),
        ConstrainedZonotope.box([-2.0], [2.0]),
        W,
        invertible_from_hpoly(box),
        ConstrainedZonotope.box([-2.0, -3.0], [2.0, 3.0]),
        horizon,
        Variant.POLYTOPIC_X,
        f"double-integrator/{name}",
    )


def stable_2d_system(horizon: int = 100) -> RcScenario:
    A = np.array([[0.99, 0.02], [-0.15, 0.99]])
    B = np.array([[-0.01], [0.08]])
    X = HPolyhedron([[-1.0, 0.0], [2.0, 1.0]], [2.0, 5.0], bounded_hint=False)
    return RcScenario.time_invariant(
        A,
        B,
        np.eye(2),
        ConstrainedZonotope.box([-1.5], [1.5]),
        SymmetricSet.zonotope(0.01 * np.eye(2)),
        X,
        ConstrainedZonotope(0.5 * np.eye(2), [1.5, 0.0]),
        horizon,
        Variant.INVERTIBLE_A,
        "stable-2d",
    )


def chain_dynamics(masses: int, k: float = 0.1, m: float = 0.1, mu: float = 0.01) -> LtiPlant:
    """Continuous chain of spring-mass-damper units between two walls.

    The state interleaves (position, velocity) per mass; input and disturbance
    are forces per unit mass on each velocity.
    """
    n = 2 * masses
    A = np.zeros((n, n))
    B = np.zeros((n, masses))
    for j in range(masses):
        pos, vel = 2 * j, 2 * j + 1
        A[pos, vel] = 1.0
        A[vel, pos] = -2.0 * k / m
        A[vel, vel] = -mu / m
        if j > 0:
            A[vel, pos - 2] = k / m
        if j < masses - 1:
            A[vel, pos + 2] = k / m
        B[vel, j] = 1.0
    return LtiPlant(A, B, B.copy())


def spring_mass_chain(
    masses: int = 5,
    k: float = 0.1,
    m: float = 0.1,
    mu: float = 0.01,
    dt: float = 0.1,
    horizon: int = 20,
    goal_repr: str = "invertible",
    disturbance: str = "box",
) -> RcScenario:
    """Chain scenario with X = G = ([-0.2, 0.2] x [-0.5, 0.5])^masses.

    ``goal_repr`` "invertible" converts the goal box from H-Rep (4 constraints
    per mass); "zonotope" keeps it constraint-free. ``disturbance`` is "box"
    or "ellipsoid", both of radius 1e-4 per mass.
    """
    if masses < 2:
        raise ValueError(f"a chain needs at least 2 masses, got {masses}")
    plant = discretize(chain_dynamics(masses, k, m, mu), dt)
    lower = np.tile([-0.2, -0.5], masses)
    upper = -lower
    X = invertible_from_hpoly(HPolyhedron.box(lower, upper))
    if goal_repr == "invertible":
        goal = X
    elif goal_repr == "zonotope":
        goal = ConstrainedZonotope.box(lower, upper)
    else:
        raise ValueError(f"unknown goal representation {goal_repr!r}")
    if disturbance == "box":
        W = SymmetricSet.zonotope(1e-4 * np.eye(masses))
    elif disturbance == "ellipsoid":
        W = SymmetricSet.ellipsoid(1e-4 * np.eye(masses))
    else:
        raise ValueError(f"unknown disturbance {disturbance!r}")
    logger.debug("chain with %d masses discretized at dt=%g", masses, dt)
    return RcScenario.time_invariant(
        plant.A,
        plant.B,
        plant.F,
        ConstrainedZonotope.box(np.full(masses, -0.1), np.full(masses, 0.1)),
        W,
        X,
        goal,
        horizon,
        Variant.POLYTOPIC_X,
        f"chain/{masses}",
    )


def random_planar_scenario(seed: int = 0, horizon: int = 3, variant: str = "polytopic-x") -> RcScenario:
    """Small random planar scenario for property checks.

    A is a perturbed identity, the disturbance alternates between a zonotope
    and an ellipsoid with the seed, and X is a box holding the goal.
    """
    rng = np.random.default_rng(seed)
    A = np.eye(2) + 0.15 * rng.standard_normal((2, 2))
    B = 0.3 * rng.standard_normal((2, 1))
    spread = 0.03 * rng.standard_normal((2, 2))
    if seed % 2 == 0:
        W = SymmetricSet.zonotope(spread, 0.01 * rng.standard_normal(2))
    else:
        W = SymmetricSet.ellipsoid(spread + 0.02 * np.eye(2), 0.01 * rng.standard_normal(2))
    theta = rng.uniform(0.0, np.pi)
    rotation = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    goal = ConstrainedZonotope(
        np.hstack([rotation @ np.diag(rng.uniform(0.6, 1.2, 2)), 0.2 * rng.standard_normal((2, 1))]),
        0.1 * rng.standard_normal(2),
    )
    half = rng.uniform(2.5, 3.5, 2)
    box = HPolyhedron.box(-half, half)
    chosen = Variant(variant)
    X = box if chosen is Variant.INVERTIBLE_A else invertible_from_hpoly(box)
    return RcScenario.time_invariant(
        A, B, np.eye(2), ConstrainedZonotope.box([-1.0], [1.0]), W, X, goal, horizon, chosen, f"random/{seed}"
    )


SCENARIOS = {
    "double-integrator": double_integrator,
    "stable-2d": stable_2d_system,
    "chain": spring_mass_chain,
    "random": random_planar_scenario,
}


def build_scenario(name: str, **params) -> RcScenario:
    if name not in SCENARIOS:
        raise ValueError(f"unknown model {name!r}; choose from {sorted(SCENARIOS)}")
    return SCENARIOS[name](**params)
