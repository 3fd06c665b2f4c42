import numpy as np
import pytest
from hypothesis import given, strategies as st

import zonolip as zl
from zonolip.errors import DimensionMismatch

from helpers import brute_zono_linmax, random_zonotope, rng


class TestHyperbox:
    def test_bounds_views(self):
        h = zl.Hyperbox([1.0, -2.0], [0.5, 1.0])
        np.testing.assert_allclose(h.lower, [0.5, -3.0])
        np.testing.assert_allclose(h.upper, [1.5, -1.0])
        assert np.all(h.lower <= h.upper)

    def test_negative_radius_rejected(self):
        with pytest.raises(ValueError):
            zl.Hyperbox([0.0], [-0.1])

    def test_from_bounds_roundtrip(self):
        h = zl.Hyperbox.from_bounds([-1.0, 2.0], [3.0, 2.5])
        np.testing.assert_allclose(h.center, [1.0, 2.25])
        np.testing.assert_allclose(h.radius, [2.0, 0.25])

    def test_immutable(self):
        h = zl.Hyperbox([0.0], [1.0])
        with pytest.raises(ValueError):
            h.center[0] = 5.0


class TestZonotope:
    def test_point_has_zero_dof(self):
        z = zl.Zonotope.point([3.0])
        assert z.dof == 0 and z.dim == 1

    def test_generator_row_mismatch(self):
        with pytest.raises(DimensionMismatch):
            zl.Zonotope([0.0, 0.0], [[1.0]])

    def test_symmetry_about_center(self):
        z = random_zonotope(rng(0), 3, 5)
        y = rng(1).uniform(-1, 1, size=5)
        p = z.point_at(y)
        mirrored = 2 * z.center - p
        np.testing.assert_allclose(mirrored, z.point_at(-y), atol=1e-12)


class TestBoxLinmax:
    def test_symmetric_box(self):
        assert zl.box_linmax(zl.Hyperbox([0, 0], [1, 1]), [1, -1]) == 2.0

    def test_single_coordinate(self):
        assert zl.box_linmax(zl.Hyperbox([1, -2], [0.5, 1]), [1, 0]) == 1.5

    def test_corner_enumeration(self):
        h = zl.Hyperbox([1.0, -2.0], [0.5, 1.0])
        a = np.array([2.0, 3.0])
        corners = [
            [h.lower[0], h.lower[1]], [h.lower[0], h.upper[1]],
            [h.upper[0], h.lower[1]], [h.upper[0], h.upper[1]],
        ]
        expected = max(a @ np.asarray(c) for c in corners)
        assert zl.box_linmax(h, a) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.0, abs=1e-12)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatch):
            zl.box_linmax(zl.Hyperbox([0], [1]), [1, 2])


class TestZonoLinmax:
    def test_unit_square(self):
        res = zl.zono_linmax(zl.Zonotope([0, 0], np.eye(2)), [1, 1])
        assert res.value == pytest.approx(2.0)

    def test_enumeration_example(self):
        res = zl.zono_linmax(zl.Zonotope([1, 0], [[1, 1], [0, 2]]), [1, 1])
        assert res.value == pytest.approx(5.0)
        # witness attains the value
        z = zl.Zonotope([1, 0], [[1, 1], [0, 2]])
        attained = np.array([1.0, 1.0]) @ z.point_at(res.witness)
        assert attained == pytest.approx(res.value)

    def test_zero_objective(self):
        res = zl.zono_linmax(random_zonotope(rng(3), 4, 6), np.zeros(4))
        assert res.value == 0.0

    def test_tie_break_positive(self):
        res = zl.zono_linmax(zl.Zonotope([0.0], [[0.0]]), [1.0])
        assert res.witness[0] == 1.0

    @given(st.integers(0, 10_000))
    def test_matches_brute_force(self, seed):
        gen = rng(seed)
        d = int(gen.integers(1, 5))
        m = int(gen.integers(0, 13))
        z = random_zonotope(gen, d, m)
        a = gen.uniform(-3, 3, size=d)
        res = zl.zono_linmax(z, a)
        assert res.value == pytest.approx(brute_zono_linmax(z, a), rel=1e-12, abs=1e-12)
        assert a @ z.point_at(res.witness) == pytest.approx(res.value, rel=1e-12, abs=1e-12)

    @given(st.integers(0, 10_000))
    def test_upper_bounds_samples(self, seed):
        gen = rng(seed)
        z = random_zonotope(gen, 3, 6)
        a = gen.uniform(-2, 2, size=3)
        bound = zl.zono_linmax(z, a).value
        pts = z.sample(gen, 200)
        assert float((pts @ a).max()) <= bound + 1e-9


class TestIntervalHull:
    def test_example(self):
        h = zl.zono_interval_hull(zl.Zonotope([0, 0], [[1, 1], [1, -1]]))
        np.testing.assert_allclose(h.center, [0, 0])
        np.testing.assert_allclose(h.radius, [2, 2])

    def test_point(self):
        h = zl.zono_interval_hull(zl.Zonotope.point([3.0]))
        np.testing.assert_allclose(h.center, [3.0])
        np.testing.assert_allclose(h.radius, [0.0])

    def test_single_generator(self):
        h = zl.zono_interval_hull(zl.Zonotope([0.5, 0.5], [[1], [-1]]))
        np.testing.assert_allclose(h.radius, [1, 1])

    @given(st.integers(0, 10_000))
    def test_matches_coordinate_linmax(self, seed):
        gen = rng(seed)
        d = int(gen.integers(1, 5))
        z = random_zonotope(gen, d, int(gen.integers(0, 7)))
        h = zl.zono_interval_hull(z)
        for i in range(d):
            e = np.zeros(d)
            e[i] = 1.0
            assert h.upper[i] == pytest.approx(zl.zono_linmax(z, e).value, abs=1e-12)
            assert h.lower[i] == pytest.approx(-zl.zono_linmax(z, -e).value, abs=1e-12)


class TestAffineMaps:
    def test_zono_identity(self):
        z = random_zonotope(rng(5), 3, 4)
        out = zl.affine_map_zono(np.eye(3), np.zeros(3), z)
        np.testing.assert_array_equal(out.center, z.center)
        np.testing.assert_array_equal(out.generators, z.generators)

    def test_zono_unit_box_image(self):
        out = zl.affine_map_zono([[1, 2], [3, 4]], [0, 0], zl.Zonotope([0, 0], np.eye(2)))
        np.testing.assert_allclose(out.generators, [[1, 2], [3, 4]])

    @given(st.integers(0, 10_000))
    def test_zono_exact_on_witnesses(self, seed):
        gen = rng(seed)
        z = random_zonotope(gen, 3, 5)
        W = gen.uniform(-2, 2, size=(2, 3))
        b = gen.uniform(-1, 1, size=2)
        out = zl.affine_map_zono(W, b, z)
        for y in gen.uniform(-1, 1, size=(20, 5)):
            np.testing.assert_allclose(out.point_at(y), W @ z.point_at(y) + b, atol=1e-10)

    def test_box_translation(self):
        h = zl.Hyperbox([1.0, 2.0], [0.5, 0.5])
        out = zl.affine_map_box(np.eye(2), [1.0, -1.0], h)
        np.testing.assert_allclose(out.center, [2.0, 1.0])
        np.testing.assert_allclose(out.radius, h.radius)

    def test_box_corner_enumeration(self):
        out = zl.affine_map_box([[1.0, -1.0]], [0.0], zl.Hyperbox([0, 0], [1, 1]))
        np.testing.assert_allclose(out.radius, [2.0])

    def test_box_constant_map(self):
        out = zl.affine_map_box(np.zeros((2, 3)), [1.0, 2.0], zl.Hyperbox(np.zeros(3), np.ones(3)))
        np.testing.assert_allclose(out.center, [1.0, 2.0])
        np.testing.assert_allclose(out.radius, [0.0, 0.0])

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatch):
            zl.affine_map_zono(np.eye(3), np.zeros(3), random_zonotope(rng(0), 2, 2))


class TestMinkowskiAndScaling:
    def test_sum_with_point_translates(self):
        z = random_zonotope(rng(7), 3, 4)
        p = zl.Zonotope.point([1.0, -1.0, 0.5])
        out = zl.minkowski_sum(z, p)
        np.testing.assert_allclose(out.center, z.center + p.center)
        np.testing.assert_array_equal(out.generators, z.generators)

    def test_sum_of_segments(self):
        one = zl.Zonotope([0.0], [[1.0]])
        out = zl.minkowski_sum(one, one)
        np.testing.assert_allclose(out.generators, [[1.0, 1.0]])
        np.testing.assert_allclose(zl.zono_interval_hull(out).radius, [2.0])

    def test_dof_adds(self):
        z1 = random_zonotope(rng(8), 2, 3)
        z2 = random_zonotope(rng(9), 2, 5)
        assert zl.minkowski_sum(z1, z2).dof == 8

    def test_hadamard_identity_and_zero(self):
        z = random_zonotope(rng(10), 3, 4)
        same = zl.hadamard_scale_zono(np.ones(3), z)
        np.testing.assert_array_equal(same.generators, z.generators)
        origin = zl.hadamard_scale_zono(np.zeros(3), z)
        assert np.all(origin.center == 0) and np.all(origin.generators == 0)

    def test_hadamard_hull(self):
        out = zl.hadamard_scale_zono([2.0, -1.0], zl.Zonotope([0, 0], np.eye(2)))
        np.testing.assert_allclose(zl.zono_interval_hull(out).radius, [2.0, 1.0])

    @given(st.integers(0, 10_000))
    def test_commute_with_concretization(self, seed):
        gen = rng(seed)
        z1 = random_zonotope(gen, 3, 4)
        z2 = random_zonotope(gen, 3, 2)
        lam = gen.uniform(-2, 2, size=3)
        y1 = gen.uniform(-1, 1, size=4)
        y2 = gen.uniform(-1, 1, size=2)
        summed = zl.minkowski_sum(z1, z2)
        np.testing.assert_allclose(
            summed.point_at(np.concatenate([y1, y2])),
            z1.point_at(y1) + z2.point_at(y2), atol=1e-12)
        scaled = zl.hadamard_scale_zono(lam, z1)
        np.testing.assert_allclose(scaled.point_at(y1), lam * z1.point_at(y1), atol=1e-12)


class TestReduceGenerators:
    def test_under_budget_unchanged(self):
        z = random_zonotope(rng(11), 3, 5)
        assert zl.reduce_generators(z, 5) is z

    def test_respects_budget(self):
        z = random_zonotope(rng(12), 3, 12)
        out = zl.reduce_generators(z, 7)
        assert out.dof == 7

    def test_bad_budget(self):
        with pytest.raises(ValueError):
            zl.reduce_generators(random_zonotope(rng(0), 2, 2), 0)

    @given(st.integers(0, 10_000))
    def test_sampled_containment(self, seed):
        gen = rng(seed)
        d = int(gen.integers(1, 4))
        m = int(gen.integers(d + 1, 10))
        budget = int(gen.integers(d, m))
        z = random_zonotope(gen, d, m)
        out = zl.reduce_generators(z, budget)
        assert out.dof <= max(budget, d)
        hull = zl.zono_interval_hull(out)
        for y in gen.uniform(-1, 1, size=(50, m)):
            assert hull.contains(z.point_at(y), tol=1e-9)

    @given(st.integers(0, 10_000))
    def test_hull_grows_only(self, seed):
        gen = rng(seed)
        z = random_zonotope(gen, 3, 9)
        out = zl.reduce_generators(z, 5)
        before = zl.zono_interval_hull(z)
        after = zl.zono_interval_hull(out)
        assert np.all(after.lower <= before.lower + 1e-12)
        assert np.all(after.upper >= before.upper - 1e-12)
        # collapsed directions keep the exact hull width
        np.testing.assert_allclose(after.radius, before.radius, atol=1e-12)

    def test_deterministic_tie_break(self):
        gens = np.array([[1.0, 1.0, 1.0, 1.0, 1.0]])
        z = zl.Zonotope([0.0], gens)
        out1 = zl.reduce_generators(z, 3)
        out2 = zl.reduce_generators(z, 3)
        np.testing.assert_array_equal(out1.generators, out2.generators)


def test_drop_zero_generators():
    z = zl.Zonotope([0.0, 0.0], [[1.0, 0.0, 2.0], [0.0, 0.0, 1.0]])
    out = zl.drop_zero_generators(z)
    assert out.dof == 2
    np.testing.assert_allclose(out.generators, [[1.0, 2.0], [0.0, 1.0]])
