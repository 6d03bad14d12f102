import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shadowgauge.bodies import Ball, Zonotope, make_box, make_cross_polytope, scale
from shadowgauge.calculus import volume
from shadowgauge.errors import DegenerateBodyError, GeometryError
from shadowgauge.inequalities import (
    INV_SQRT_E,
    CheckReport,
    ball_equality_gap,
    ball_equality_report,
    cn,
    constants,
    hyperplane_check,
    separation_check,
    surface_hyperplane_check,
    volume_difference_check,
)
from shadowgauge.oracle import zonotope_support_min
from shadowgauge.shadows import SphereSearchConfig, projection_body

from conftest import make_zonotope

FAST = SphereSearchConfig(coarse_samples=1024, restarts=4)


def cn_mp(n: int) -> float:
    mpmath.mp.dps = 40
    ball = lambda k: mpmath.pi ** (mpmath.mpf(k) / 2) / mpmath.gamma(mpmath.mpf(k) / 2 + 1)
    return float(ball(n) ** (mpmath.mpf(n - 1) / n) / ball(n - 1))


class TestConstants:
    def test_c2(self):
        assert cn(2) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-15)

    @pytest.mark.parametrize("n", [2, 3, 4, 7, 10, 25, 50, 200])
    def test_high_precision(self, n):
        assert cn(n) == pytest.approx(cn_mp(n), rel=1e-13)

    def test_c3_value(self):
        assert cn(3) == pytest.approx(0.8271339879, abs=1e-10)

    def test_bound_and_monotone(self):
        values = [cn(n) for n in range(2, 51)]
        assert min(values) > INV_SQRT_E
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_limit(self):
        assert cn(5000) == pytest.approx(INV_SQRT_E, rel=1e-3)

    @pytest.mark.parametrize("n", [1, 0, 2.5])
    def test_rejects(self, n):
        with pytest.raises(GeometryError):
            cn(n)

    def test_constants_record(self):
        c = constants(3)
        assert c.ball_volume == pytest.approx(4 * math.pi / 3) and c.cn == cn(3)


class TestCubeFixtures:
    def test_separation(self, cube):
        r = separation_check(scale(cube, 0.5), cube)
        assert r.passed and r.applicable
        assert r.epsilon_star == pytest.approx(3.0, rel=1e-9)
        assert r.rhs == pytest.approx(1.0, rel=1e-12)
        assert r.lhs == pytest.approx(1.51859, abs=1e-4)

    def test_volume_difference(self, cube):
        r = volume_difference_check(scale(cube, 0.5), cube)
        assert r.passed
        assert r.lhs == pytest.approx(3.0, rel=1e-12)
        assert r.rhs == pytest.approx(3 * cn(3), rel=1e-9)

    def test_hyperplane(self, cube):
        r = hyperplane_check(cube)
        assert r.lhs == pytest.approx(4.0, rel=1e-14)
        assert r.rhs == pytest.approx(4 * cn(3), rel=1e-9)
        assert r.passed

    def test_surface_hyperplane(self, cube):
        r = surface_hyperplane_check(cube)
        assert r.lhs == 24.0
        assert r.rhs == pytest.approx(24 * cn(3), rel=1e-9)
        assert np.max(np.abs(r.witness_xi)) == pytest.approx(1.0, abs=1e-6)

    def test_not_applicable_for_equal_bodies(self, cube):
        r = separation_check(cube, cube, FAST)
        assert not r.applicable and r.verdict == "not_applicable" and not r.passed
        assert r.reason

    def test_cross_polytope_inside_cube(self, cube):
        r = separation_check(make_cross_polytope(3, 1.0), cube, FAST)
        assert r.applicable and r.passed

    @pytest.mark.parametrize("t", [0.5, 2.0])
    def test_box_family(self, t):
        box = make_box([1.0, 1.0, t])
        for r in (hyperplane_check(box, FAST), surface_hyperplane_check(box, FAST),
                  separation_check(scale(box, 0.5), box, FAST)):
            assert r.passed, r.to_dict()


class TestBalls:
    @pytest.mark.parametrize("n", range(3, 11))
    def test_equality(self, n):
        assert ball_equality_gap(n) <= 1e-12
        assert ball_equality_report(n).passed

    @pytest.mark.parametrize("n", range(2, 9))
    def test_hyperplane_gap(self, n):
        r = hyperplane_check(Ball(n, 1.3))
        assert abs(r.relative_gap) <= 1e-9
        assert r.passed

    def test_surface_ball_is_sharp(self):
        r = surface_hyperplane_check(Ball(4, 0.7))
        assert abs(r.relative_gap) <= 1e-12

    def test_planar_surface_rejected(self, square):
        with pytest.raises(GeometryError):
            surface_hyperplane_check(square)

    def test_ball_equality_needs_n3(self):
        with pytest.raises(GeometryError):
            ball_equality_report(2)


class TestRandomBodies:
    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateBodyError):
            hyperplane_check(Zonotope([[1, 0, 0], [0, 1, 0]]))

    def test_facet_body_not_a_certified_projection_body(self):
        with pytest.raises(GeometryError):
            hyperplane_check(make_cross_polytope(3))

    @pytest.mark.parametrize("seed,n", [(1, 3), (2, 3), (3, 4)])
    def test_homothety_margin(self, seed, n):
        l = make_zonotope(seed, n, n + 3)
        r_fac = 0.9
        exact_min, _ = zonotope_support_min(projection_body(l))
        expected = (1 - r_fac ** (n - 1)) * (volume(l).value ** ((n - 1) / n) - cn(n) * exact_min)
        rep = separation_check(scale(l, r_fac), l)
        assert rep.passed and rep.gap > 0
        assert rep.gap == pytest.approx(expected, rel=1e-5)

    @pytest.mark.parametrize("seed", range(4))
    def test_separation_and_difference_agree(self, seed):
        l = make_zonotope(100 + seed, 3, 6)
        k = scale(l, 0.7)
        a, b = separation_check(k, l, FAST), volume_difference_check(k, l, FAST)
        assert a.passed == b.passed
        assert a.gap == pytest.approx(b.gap, rel=1e-12, abs=1e-12)

    @given(st.integers(0, 2**31), st.floats(0.2, 5.0))
    @settings(max_examples=10)
    def test_verdict_scale_invariant(self, seed, t):
        l = make_zonotope(seed, 3, 5)
        a = hyperplane_check(l, FAST)
        b = hyperplane_check(scale(l, t), FAST)
        assert a.passed == b.passed
        assert b.relative_gap == pytest.approx(a.relative_gap, abs=1e-9)

    def test_hyperplane_matches_enumeration(self):
        l = make_zonotope(42, 4, 7)
        exact, _ = zonotope_support_min(projection_body(l))
        r = hyperplane_check(l)
        assert r.rhs == pytest.approx(cn(4) * exact, rel=1e-6)


def test_report_to_dict(cube):
    d = separation_check(scale(cube, 0.5), cube, FAST).to_dict()
    assert d["name"] == "separation" and d["verdict"] == "passed"
    assert d["gap"] == pytest.approx(d["lhs"] - d["rhs"])
    assert len(d["witness_xi"]) == 3
    assert d["tolerances"]["tol_rel"] == 1e-5 and d["tolerances"]["refined"] is False


def test_report_tolerance_rules():
    assert CheckReport("x", 1.0, 1.0 + 1e-6, tolerances={"tol_rel": 1e-5}).passed
    assert not CheckReport("x", 1.0, 1.1, tolerances={"tol_rel": 1e-5}).passed
    assert not CheckReport("x", 1.0, 0.5, tolerances={"tol_abs": 0.1}).passed
