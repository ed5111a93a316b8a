"""Tests for set types, support functions and membership."""
from fractions import Fraction

import numpy as np
import pytest

from czreach.errors import DimensionMismatch
from czreach.sets import (
    ConstrainedZonotope,
    Halfspace,
    HPolyhedron,
    ReprComplexity,
    SymmetricKind,
    SymmetricSet,
    boundary_sample,
    circle_directions,
    is_empty,
    is_full_dimensional,
    membership_czono,
    repr_complexity,
    support_czono,
    support_symmetric,
)

from conftest import random_czono


class TestConstrainedZonotope:
    def setup_method(self):
        self.box = ConstrainedZonotope.box([-1.0, -1.0], [1.0, 1.0])

    def test_box_shape(self):
        assert self.box.dim == 2
        assert self.box.n_generators == 2
        assert self.box.n_constraints == 0
        assert np.allclose(self.box.G, np.eye(2))

    def test_arrays_are_read_only(self):
        with pytest.raises(ValueError):
            self.box.G[0, 0] = 5.0

    def test_support(self):
        assert support_czono(self.box, [1.0, 0.0]).value == pytest.approx(1.0)
        assert support_czono(self.box, [1.0, 1.0]).value == pytest.approx(2.0)

    def test_support_of_constrained(self):
        # xi_1 = xi_2 leaves the diagonal segment
        diag = ConstrainedZonotope(np.eye(2), [0.0, 0.0], [[1.0, -1.0]], [0.0])
        assert support_czono(diag, [1.0, 0.0]).value == pytest.approx(1.0)
        assert support_czono(diag, [1.0, -1.0]).value == pytest.approx(0.0, abs=1e-9)

    def test_empty_marker(self):
        E = ConstrainedZonotope.empty(3)
        assert E.is_empty_marker
        assert is_empty(E)
        assert support_czono(E, [1.0, 0.0, 0.0]) is None

    def test_infeasible_constraints_are_empty(self):
        C = ConstrainedZonotope(np.eye(2), [0.0, 0.0], [[1.0, 0.0]], [2.0])
        assert is_empty(C)
        assert not is_empty(self.box)

    def test_point(self):
        P = ConstrainedZonotope.point([1.0, 2.0])
        assert P.n_generators == 0
        assert support_czono(P, [0.0, 1.0]).value == pytest.approx(2.0)

    def test_translate(self):
        moved = self.box.translate([2.0, 0.0])
        assert support_czono(moved, [1.0, 0.0]).value == pytest.approx(3.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            ConstrainedZonotope(np.eye(2), [0.0, 0.0, 0.0])

    def test_membership(self):
        assert membership_czono(self.box, [0.5, -0.5])
        assert membership_czono(self.box, [1.0, 1.0])
        assert not membership_czono(self.box, [1.1, 0.0])
        assert not membership_czono(ConstrainedZonotope.empty(2), [0.0, 0.0])

    def test_membership_respects_constraints(self):
        diag = ConstrainedZonotope(np.eye(2), [0.0, 0.0], [[1.0, -1.0]], [0.0])
        assert membership_czono(diag, [0.3, 0.3])
        assert not membership_czono(diag, [0.3, -0.3])


class TestComplexity:
    def test_box(self):
        cx = repr_complexity(ConstrainedZonotope.box([0.0, 0.0], [1.0, 1.0]))
        assert cx == ReprComplexity(0, Fraction(1))

    def test_fractional_order(self):
        C = ConstrainedZonotope(np.ones((2, 2)), [0.0, 0.0], [[1.0, 0.0]], [0.0])
        assert repr_complexity(C).dof_order == Fraction(1, 2)

    def test_generators(self):
        assert ReprComplexity(120, Fraction(11)).generators(2) == 142
        assert ReprComplexity(620, Fraction(11)).generators(10) == 730

    def test_inconsistent_dimension(self):
        with pytest.raises(ValueError):
            ReprComplexity(1, Fraction(1, 3)).generators(2)

    def test_str(self):
        assert str(ReprComplexity(200, Fraction(51))) == "(200, 51)"


class TestSymmetricSet:
    def setup_method(self):
        self.G = np.array([[1.0, 2.0], [0.0, 1.0]])

    def test_zonotope_support(self):
        S = SymmetricSet.zonotope(self.G)
        assert S.centered_support([1.0, 0.0]) == pytest.approx(3.0)

    def test_ellipsoid_support(self):
        S = SymmetricSet.ellipsoid(2.0 * np.eye(2), [1.0, 0.0])
        assert S.support([1.0, 0.0]) == pytest.approx(3.0)
        assert S.centered_support([0.6, 0.8]) == pytest.approx(2.0)

    def test_cross_polytope_support(self):
        S = SymmetricSet.cross_polytope(self.G)
        assert S.centered_support([1.0, 0.0]) == pytest.approx(2.0)

    def test_zonotope_agrees_with_czono_support(self):
        S = SymmetricSet.zonotope(self.G, [0.5, -1.0])
        C = ConstrainedZonotope(self.G, [0.5, -1.0])
        for nu in circle_directions(12):
            assert support_symmetric(S, nu) == pytest.approx(support_czono(C, nu).value, abs=1e-7)

    def test_vectorized(self):
        S = SymmetricSet.zonotope(self.G)
        values = S.centered_support(np.eye(2))
        assert np.allclose(values, [3.0, 1.0])

    def test_ellipsoid_must_be_square(self):
        with pytest.raises(DimensionMismatch):
            SymmetricSet.ellipsoid(np.ones((2, 3)))

    def test_support_vectors_attain_support(self):
        dirs = circle_directions(12)
        for S in (
            SymmetricSet.zonotope(self.G),
            SymmetricSet.ellipsoid(self.G),
            SymmetricSet.cross_polytope(self.G),
        ):
            points = S.support_vectors(dirs)
            attained = np.einsum("ij,ij->i", points, dirs)
            assert np.allclose(attained, [S.support(d) for d in dirs])

    def test_generic_matches_ellipsoid(self):
        S = SymmetricSet.generic(lambda nu: 0.5 * np.linalg.norm(nu), 2)
        E = SymmetricSet.ellipsoid(0.5 * np.eye(2))
        for nu in circle_directions(7):
            assert S.support(nu) == pytest.approx(E.support(nu))

    def test_generic_has_no_support_vectors(self):
        S = SymmetricSet.generic(lambda nu: 0.5 * np.linalg.norm(nu), 2)
        with pytest.raises(ValueError, match="no support vectors"):
            S.support_vectors([[1.0, 0.0]])

    def test_generic_asymmetric(self):
        with pytest.raises(ValueError):
            SymmetricSet.generic(lambda nu: nu[0] + 2.0, 2)

    def test_generic_affine_map(self):
        S = SymmetricSet.generic(lambda nu: float(np.abs(nu).sum()), 2)
        image = S.affine_map(np.diag([2.0, 1.0]))
        assert image.support([1.0, 0.0]) == pytest.approx(2.0)

    def test_affine_map_keeps_kind(self):
        S = SymmetricSet.ellipsoid(np.eye(2)).affine_map([[1.0, 1.0]])
        assert S.kind is SymmetricKind.ELLIPSOID
        assert S.dim == 1
        assert S.centered_support([1.0]) == pytest.approx(np.sqrt(2.0))

    def test_scaled(self):
        S = SymmetricSet.zonotope(self.G).scaled(0.5)
        assert S.centered_support([1.0, 0.0]) == pytest.approx(1.5)
        with pytest.raises(ValueError):
            S.scaled(-1.0)

    def test_singleton(self):
        S = SymmetricSet.singleton([1.0, 2.0])
        assert S.support([1.0, 0.0]) == pytest.approx(1.0)
        assert S.affine_dimension() == 0

    def test_as_czono(self):
        assert SymmetricSet.zonotope(self.G).as_czono().n_generators == 2
        with pytest.raises(ValueError):
            SymmetricSet.ellipsoid(self.G).as_czono()


class TestHPolyhedron:
    def test_zero_normal(self):
        with pytest.raises(ValueError):
            Halfspace([0.0, 0.0], 1.0)

    def test_box(self):
        P = HPolyhedron.box([-1.0, -2.0], [1.0, 2.0])
        assert P.n_rows == 4
        assert P.support([0.0, 1.0]) == pytest.approx(2.0)
        assert P.contains([0.5, 1.5])
        assert not P.contains([1.5, 0.0])

    def test_unbounded(self):
        P = HPolyhedron([[1.0, 0.0]], [1.0])
        assert P.support([0.0, 1.0]) == float("inf")

    def test_empty(self):
        assert HPolyhedron.empty(2).support([1.0, 0.0]) == float("-inf")

    def test_halfspaces_skip_zero_rows(self):
        P = HPolyhedron([[0.0, 0.0], [1.0, 0.0]], [1.0, 2.0])
        assert [h.q for h in P.halfspaces()] == [2.0]

    def test_from_halfspaces(self):
        P = HPolyhedron.from_halfspaces([Halfspace([1.0, 0.0], 1.0), Halfspace([0.0, 1.0], 2.0)], 2)
        assert P.n_rows == 2
        assert HPolyhedron.from_halfspaces([], 3).dim == 3

    def test_intersect(self):
        P = HPolyhedron.box([-1.0, -1.0], [1.0, 1.0]).intersect(HPolyhedron([[1.0, 0.0]], [0.0]))
        assert P.support([1.0, 0.0]) == pytest.approx(0.0, abs=1e-9)


class TestGeometryQueries:
    def test_full_dimensional(self, rng):
        assert is_full_dimensional(ConstrainedZonotope.box([0.0, 0.0], [1.0, 1.0]))
        assert is_full_dimensional(random_czono(rng))

    def test_flat_sets(self):
        segment = ConstrainedZonotope([[1.0], [0.0]], [0.0, 0.0])
        diag = ConstrainedZonotope(np.eye(2), [0.0, 0.0], [[1.0, -1.0]], [0.0])
        assert not is_full_dimensional(segment)
        assert not is_full_dimensional(diag)
        assert not is_full_dimensional(ConstrainedZonotope.empty(2))

    def test_circle_directions(self):
        assert np.allclose(circle_directions(4), [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-12)

    def test_boundary_sample(self):
        box = ConstrainedZonotope.box([-1.0, -1.0], [1.0, 1.0])
        points = boundary_sample(box, 8)
        assert points.shape == (8, 2)
        assert np.max(points[:, 0]) == pytest.approx(1.0)
        assert np.all(np.abs(points) <= 1.0 + 1e-9)

    def test_boundary_sample_of_empty(self):
        assert boundary_sample(ConstrainedZonotope.empty(2), 8) is None

    def test_boundary_sample_needs_plane(self):
        with pytest.raises(DimensionMismatch):
            boundary_sample(ConstrainedZonotope.box([0.0] * 3, [1.0] * 3), 8)
