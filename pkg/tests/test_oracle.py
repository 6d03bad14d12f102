import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shadowgauge.bodies import Zonotope, make_box
from shadowgauge.calculus import volume
from shadowgauge.errors import DegenerateBodyError, DimensionMismatchError, GeometryError
from shadowgauge.oracle import (
    HRep,
    contains,
    contains_many,
    mc_volume,
    planar_offset_area,
    zonogon_vertices,
    zonotope_facets,
    zonotope_support_min,
)
from shadowgauge.shadows import projection_body

from conftest import hull, make_zonotope


class TestFacets:
    def test_cube(self, cube):
        h = zonotope_facets(cube)
        assert len(h.offsets) == 3
        assert sorted(map(tuple, np.abs(h.normals))) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
        assert np.allclose(h.offsets, 1.0)

    def test_zonogon(self, zonogon):
        h = zonotope_facets(zonogon)
        assert sorted(np.round(h.offsets, 12)) == sorted(np.round([2.0, 2.0, math.sqrt(2)], 12))

    def test_degenerate(self):
        with pytest.raises(DegenerateBodyError):
            zonotope_facets(Zonotope([[1, 0, 0], [0, 1, 0]]))

    def test_unbounded_hrep(self):
        with pytest.raises(DegenerateBodyError):
            HRep([[1.0, 0.0]], [1.0])
        with pytest.raises(GeometryError):
            HRep([[1.0, 0.0], [0.0, 1.0]], [1.0, 0.0])

    @pytest.mark.parametrize("seed,n,m", [(1, 3, 5), (2, 4, 6)])
    def test_matches_hull_facets(self, seed, n, m):
        z = make_zonotope(seed, n, m)
        h = zonotope_facets(z)
        assert np.allclose(h.offsets, z.support_many(h.normals), rtol=1e-12, atol=0)
        for eq in hull(z).equations:
            j = np.argmax(np.abs(h.normals @ eq[:n]))
            assert abs(h.normals[j] @ eq[:n]) > 1 - 1e-8
            assert h.offsets[j] == pytest.approx(-eq[n], rel=1e-9)


class TestContains:
    def test_cube_examples(self, cube):
        h = zonotope_facets(cube)
        assert contains(h, [0.5, -0.5, 0.99])
        assert not contains(h, [1.0001, 0.0, 0.0])
        assert contains(h, np.zeros(3))

    def test_dimension(self, cube):
        with pytest.raises(DimensionMismatchError):
            contains(zonotope_facets(cube), [0.0, 0.0])

    @given(st.integers(0, 2**31), st.integers(2, 4))
    def test_constructed_points(self, seed, n):
        z = make_zonotope(seed, n, n + 3)
        h = zonotope_facets(z)
        rng = np.random.default_rng(seed)
        t = rng.uniform(-1, 1, size=(200, len(z.generators)))
        assert contains_many(h, t @ z.generators).all()
        # a vertex doubled leaves the body
        vertex = np.sign(z.generators @ rng.standard_normal(n)) @ z.generators
        assert contains(h, vertex)
        assert not contains(h, 2 * vertex)


class TestMonteCarlo:
    def test_cube_exact(self, cube):
        est, se = mc_volume(cube, 1_000_000, seed=0)
        assert est == 8.0 and se == 0.0

    def test_zonogon(self, zonogon):
        est, se = mc_volume(zonogon, 200_000, seed=5)
        assert abs(est - 12.0) <= 3 * se

    def test_projection_body_of_cube(self, cube):
        est, se = mc_volume(projection_body(cube), 50_000, seed=1)
        assert est == 512.0 and se == 0.0

    def test_deterministic(self):
        z = make_zonotope(4, 3, 5)
        assert mc_volume(z, 100_000, 9) == mc_volume(z, 100_000, 9)
        assert mc_volume(z, 100_000, 9) != mc_volume(z, 100_000, 10)

    def test_prefix_stable(self):
        # the first block is shared by any run of the same seed
        z = make_zonotope(4, 3, 5)
        a, _ = mc_volume(z, 65_536, 9)
        b, _ = mc_volume(z, 131_072, 9)
        assert a != b and abs(a - b) < 0.1 * volume(z).value

    def test_floor(self, cube):
        with pytest.raises(ValueError):
            mc_volume(cube, 9_999, 0)

    def test_degenerate(self):
        with pytest.raises(DegenerateBodyError):
            mc_volume(Zonotope([[1, 0, 0], [0, 1, 0]]), 10_000, 0)


class TestPlanar:
    def test_square_vertices(self, square):
        v = zonogon_vertices(square)
        assert sorted(map(tuple, v)) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]

    def test_offset_of_square(self, square):
        area, per, grown = planar_offset_area(square, 0.5)
        assert (area, per) == (4.0, 8.0)
        assert grown == pytest.approx(4 + 4 + math.pi / 4, rel=1e-14)

    def test_rejects_3d(self, cube):
        with pytest.raises(DimensionMismatchError):
            zonogon_vertices(cube)


class TestSupportMin:
    def test_cube(self, cube):
        value, arg = zonotope_support_min(cube)
        assert value == 1.0 and np.max(np.abs(arg)) == pytest.approx(1.0)

    def test_box(self):
        assert zonotope_support_min(make_box([3.0, 0.5, 2.0]))[0] == 0.5

    @pytest.mark.parametrize("seed", range(3))
    def test_dense_sample_never_lower(self, seed):
        z = make_zonotope(seed, 3, 6)
        value, arg = zonotope_support_min(z)
        x = np.random.default_rng(seed).standard_normal((100_000, 3))
        x /= np.linalg.norm(x, axis=1)[:, None]
        assert z.support_many(x).min() >= value * (1 - 1e-12)
        assert float(z.support_many(arg)) == pytest.approx(value)
