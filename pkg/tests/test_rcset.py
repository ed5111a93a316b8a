"""Tests for the robust controllable set recursions."""
import numpy as np
import pytest

from czreach.config import Config
from czreach.czops import invertible_from_hpoly
from czreach.errors import ScenarioError
from czreach.models import double_integrator, random_planar_scenario, stable_2d_system
from czreach.oracle import exact_rc_2d, polygon_from_czono
from czreach.rcset import (
    RcScenario,
    Variant,
    predicted_complexity,
    rc_inner,
    rc_outer,
    rc_two_stage,
)
from czreach.sets import (
    ConstrainedZonotope,
    HPolyhedron,
    SymmetricSet,
    circle_directions,
    repr_complexity,
    support_czono,
)


def support(C, nu) -> float:
    return support_czono(C, np.asarray(nu, dtype=float)).value


def undisturbed(horizon: int = 1, variant: Variant = Variant.POLYTOPIC_X) -> RcScenario:
    A = np.array([[1.0, 0.1], [0.0, 1.0]])
    B = np.array([[0.005], [0.1]])
    box = HPolyhedron.box([-2.0, -3.0], [2.0, 3.0])
    X = invertible_from_hpoly(box) if variant is Variant.POLYTOPIC_X else box
    return RcScenario.time_invariant(
        A, B, np.eye(2), ConstrainedZonotope.box([-2.0], [2.0]), SymmetricSet.singleton([0.0, 0.0]),
        X, ConstrainedZonotope.box([-2.0, -3.0], [2.0, 3.0]), horizon, variant, "undisturbed",
    )


class TestScenario:
    def test_time_invariant(self):
        sc = undisturbed(horizon=4)
        assert sc.horizon == 4
        assert sc.dim == 2
        assert sc.validate() == []

    def test_bad_input_matrix(self):
        with pytest.raises(ScenarioError):
            RcScenario.time_invariant(
                np.eye(2), np.ones((2, 2)), np.eye(2), ConstrainedZonotope.box([-1.0], [1.0]),
                SymmetricSet.singleton([0.0, 0.0]), HPolyhedron.box([-1.0, -1.0], [1.0, 1.0]),
                ConstrainedZonotope.box([-1.0, -1.0], [1.0, 1.0]), 1, Variant.INVERTIBLE_A,
            )

    def test_wrong_state_set_kind(self):
        with pytest.raises(ScenarioError, match="H-Rep"):
            RcScenario.time_invariant(
                np.eye(2), np.ones((2, 1)), np.eye(2), ConstrainedZonotope.box([-1.0], [1.0]),
                SymmetricSet.singleton([0.0, 0.0]), ConstrainedZonotope.box([-1.0, -1.0], [1.0, 1.0]),
                ConstrainedZonotope.box([-1.0, -1.0], [1.0, 1.0]), 1, Variant.INVERTIBLE_A,
            )

    def test_negative_horizon(self):
        with pytest.raises(ScenarioError):
            undisturbed(horizon=-1)

    def test_with_horizon(self):
        sc = undisturbed(horizon=3)
        assert sc.with_horizon(1).horizon == 1
        assert sc.with_horizon(5).horizon == 5

    def test_with_disturbance(self):
        W = SymmetricSet.ellipsoid(0.1 * np.eye(2))
        sc = undisturbed(horizon=2).with_disturbance(W)
        assert all(w is W for w in sc.W)
        assert sc.scaled_disturbance(0.5).W[0].G[0, 0] == pytest.approx(0.05)


class TestRecursion:
    def test_zero_horizon(self):
        result = rc_inner(undisturbed(horizon=0))
        assert len(result.sets) == 1
        assert result.k0 is result.terminal
        assert support(result.k0, [1.0, 0.0]) == pytest.approx(2.0)

    def test_complexity_matches_prediction(self):
        for sc in (double_integrator(horizon=3), stable_2d_system(horizon=3), random_planar_scenario(seed=2)):
            result = rc_inner(sc)
            assert not any(result.empty)
            assert repr_complexity(result.k0) == predicted_complexity(sc)
            assert result.complexities == [repr_complexity(K) for K in result.sets]

    def test_complexity_ignores_disturbance_kind(self):
        ball = rc_inner(double_integrator(disturbance="ball", horizon=3))
        zono = rc_inner(double_integrator(disturbance="zono-ball", horizon=3))
        assert ball.complexities[0] == zono.complexities[0]

    def test_timings(self):
        result = rc_inner(double_integrator(horizon=2))
        assert len(result.step_seconds) == 3
        assert result.total_seconds >= 0.0
        assert result.horizon == 2

    def test_undisturbed_one_step_is_exact(self):
        sc = undisturbed(horizon=1)
        inner = rc_inner(sc).k0
        outer = rc_outer(sc).k0
        exact = exact_rc_2d(sc)[0]
        for nu in circle_directions(24):
            assert support(inner, nu) == pytest.approx(exact.support(nu), abs=1e-6)
            assert support(outer, nu) == pytest.approx(exact.support(nu), abs=1e-6)

    def test_variants_agree_without_disturbance(self):
        a = rc_inner(undisturbed(horizon=2, variant=Variant.INVERTIBLE_A)).k0
        b = rc_inner(undisturbed(horizon=2, variant=Variant.POLYTOPIC_X)).k0
        for nu in circle_directions(16):
            assert support(a, nu) == pytest.approx(support(b, nu), abs=1e-6)

    def test_sets_stay_in_state_constraints(self):
        result = rc_inner(double_integrator(horizon=4))
        for K in result.sets[:-1]:
            assert support(K, [1.0, 0.0]) <= 2.0 + 1e-7
            assert support(K, [0.0, -1.0]) <= 3.0 + 1e-7

    def test_inner_inside_outer(self):
        sc = double_integrator(horizon=3)
        inner = rc_inner(sc)
        outer = rc_outer(sc)
        for K_in, K_out in zip(inner.sets, outer.sets):
            for nu in circle_directions(12):
                assert support(K_in, nu) <= support(K_out, nu) + 1e-6

    def test_soundness_against_oracle(self):
        for seed in range(4):
            sc = random_planar_scenario(seed=seed, horizon=2)
            exact = exact_rc_2d(sc)[0]
            inner = rc_inner(sc).k0
            outer = rc_outer(sc).k0
            assert exact is not None
            for nu in circle_directions(16):
                assert support(inner, nu) <= exact.support(nu) + 1e-6
                assert exact.support(nu) <= support(outer, nu) + 1e-6

    def test_empty_propagates(self):
        sc = double_integrator(horizon=3).scaled_disturbance(30.0)
        result = rc_inner(sc)
        assert result.empty[0]
        assert result.k0.is_empty_marker
        assert result.complexities[0] == repr_complexity(result.k0)

    def test_unreachable_goal_is_flagged(self):
        A = np.array([[1.0, 0.1], [0.0, 1.0]])
        B = np.array([[0.005], [0.1]])
        box = HPolyhedron.box([-2.0, -3.0], [2.0, 3.0])
        goal = ConstrainedZonotope.box([10.0, 10.0], [11.0, 11.0])
        for variant, X in ((Variant.POLYTOPIC_X, invertible_from_hpoly(box)), (Variant.INVERTIBLE_A, box)):
            sc = RcScenario.time_invariant(
                A, B, np.eye(2), ConstrainedZonotope.box([-2.0], [2.0]), SymmetricSet.singleton([0.0, 0.0]),
                X, goal, 2, variant,
            )
            for result in (rc_inner(sc), rc_outer(sc)):
                assert result.empty == [True, True, False]
                assert result.k0.is_empty_marker
                assert result.sets[1].is_empty_marker

    def test_nested_under_disturbance_scaling(self):
        for sc in (double_integrator(horizon=3), random_planar_scenario(seed=1, horizon=3)):
            small, medium, full = (rc_inner(sc.scaled_disturbance(alpha)).k0 for alpha in (0.0, 0.5, 1.0))
            for nu in circle_directions(32):
                assert support(full, nu) <= support(medium, nu) + 1e-7
                assert support(medium, nu) <= support(small, nu) + 1e-7

    def test_two_stage_needs_zonotopes(self):
        with pytest.raises(ValueError):
            rc_two_stage(double_integrator(disturbance="ball", horizon=1))

    def test_two_stage_inside_inner_area_scale(self):
        sc = double_integrator(disturbance="zono-ball", horizon=2)
        result = rc_two_stage(sc)
        assert result.method == "two-stage"
        assert polygon_from_czono(result.k0).area > 0.0

    def test_debug_full_dim(self):
        config = Config().replace(debug_full_dim=True)
        result = rc_inner(double_integrator(horizon=2), config)
        assert not any(result.empty)


class TestPredictedComplexity:
    def test_case_studies(self):
        assert str(predicted_complexity(double_integrator())) == "(120, 11)"
        assert str(predicted_complexity(stable_2d_system())) == "(200, 51)"
