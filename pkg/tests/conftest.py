"""Shared random set generators."""
import numpy as np
import pytest

from czreach.config import Config
from czreach.sets import ConstrainedZonotope, HPolyhedron


def random_czono(rng: np.random.Generator, n: int = 2, extra: int = 3, M: int = 1) -> ConstrainedZonotope:
    """Full-dimensional constrained zonotope: b = A xi0 with xi0 inside the box."""
    N = n + M + extra
    G = rng.standard_normal((n, N))
    A = rng.standard_normal((M, N))
    xi0 = rng.uniform(-0.5, 0.5, N)
    return ConstrainedZonotope(G, rng.standard_normal(n), A, A @ xi0)


def random_polytope(rng: np.random.Generator, n: int = 2, rows: int = 5) -> HPolyhedron:
    """Bounded polytope holding the unit ball: random cuts plus a box."""
    H = rng.standard_normal((rows, n))
    H /= np.linalg.norm(H, axis=1, keepdims=True)
    k = rng.uniform(1.0, 2.0, rows)
    box = HPolyhedron.box(np.full(n, -3.0), np.full(n, 3.0))
    return HPolyhedron(np.vstack([H, box.H]), np.concatenate([k, box.k]))


def directions(rng: np.random.Generator, n: int = 2, count: int = 40) -> np.ndarray:
    D = rng.standard_normal((count, n))
    return D / np.linalg.norm(D, axis=1, keepdims=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def config():
    return Config()
