import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from epikit.geometry import (NEG_INF, POS_INF, Inner, NormSpec, PointCloud, excess, nearest_brute,
                             nearest_indexed, norm_eval, truncated_hausdorff, xr_add)

L2_2 = NormSpec.of((2, "L2"))
MIXED = NormSpec.of((2, "L1"), (1, "L2"), (1, "ABS"))


class TestExtendedAddition:
    def test_opposite_infinities_give_plus_infinity(self):
        assert xr_add(POS_INF, NEG_INF) == POS_INF
        assert xr_add(NEG_INF, POS_INF) == POS_INF

    def test_finite(self):
        assert xr_add(1.5, 2.5) == 4.0

    def test_minus_infinity_absorbs_finite(self):
        assert xr_add(NEG_INF, 3.0) == NEG_INF

    def test_vectorised(self):
        a = np.array([1.0, POS_INF, NEG_INF, NEG_INF])
        b = np.array([2.0, NEG_INF, 3.0, NEG_INF])
        np.testing.assert_array_equal(xr_add(a, b), [3.0, POS_INF, NEG_INF, NEG_INF])


class TestNorms:
    def test_block_max(self):
        assert norm_eval(MIXED, [0.3, 0.4, 0.5, 0.2]) == pytest.approx(0.7)

    def test_euclidean(self):
        assert norm_eval(L2_2, [3.0, 4.0]) == pytest.approx(5.0)

    def test_zero(self):
        assert norm_eval(MIXED, np.zeros(4)) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            norm_eval(L2_2, [1.0, 2.0, 3.0])

    def test_abs_block_must_be_scalar(self):
        with pytest.raises(ValueError):
            NormSpec(((2, Inner.ABS),))

    @given(arrays(float, 4, elements=st.floats(-10, 10)), arrays(float, 4, elements=st.floats(-10, 10)),
           st.floats(-5, 5))
    def test_norm_axioms(self, a, b, t):
        assert norm_eval(MIXED, a + b) <= norm_eval(MIXED, a) + norm_eval(MIXED, b) + 1e-9
        assert norm_eval(MIXED, t * a) == pytest.approx(abs(t) * norm_eval(MIXED, a), abs=1e-9)


class TestExcess:
    def test_empty_source_is_zero(self):
        assert excess(PointCloud.empty(2), PointCloud.from_points([[1, 1]]), L2_2) == 0.0

    def test_empty_target_is_infinite(self):
        assert excess(PointCloud.from_points([[0, 0]]), PointCloud.empty(2), L2_2) == POS_INF

    def test_single_pair(self):
        assert excess(PointCloud.from_points([[0, 0]]), PointCloud.from_points([[1, 0]]), L2_2) == 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            excess(PointCloud.from_points([[0, 0]]), PointCloud.from_points([[1, 0, 0]]), L2_2)

    def test_shifted_epigraph_clouds(self):
        # sampled epi of 0 and of 0.25 on [-1, 1]; brute-force value 0.25 (tools/derive_oracles.py)
        xs = np.linspace(-1, 1, 41)
        alphas = np.arange(-2, 2.001, 0.05)
        base = PointCloud.from_points([(x, a) for x in xs for a in alphas if a >= 0])
        up = PointCloud.from_points([(x, a) for x in xs for a in alphas if a >= 0.25 - 1e-12])
        d = truncated_hausdorff(base, up, 1.0, NormSpec.of((1, "ABS"), (1, "ABS")))
        assert d == pytest.approx(0.25, abs=0.05)


def _cloud(draw_pts):
    return PointCloud.from_points(draw_pts)


cloud_pts = arrays(float, st.tuples(st.integers(1, 25), st.just(4)), elements=st.floats(-3, 3))


class TestTruncatedHausdorff:
    @settings(max_examples=200, deadline=None)
    @given(cloud_pts, cloud_pts, st.floats(0, 4), st.floats(0, 4))
    def test_symmetry_self_zero_and_rho_monotone(self, a, b, r1, r2):
        c, d = _cloud(a), _cloud(b)
        assert truncated_hausdorff(c, d, r1, MIXED) == truncated_hausdorff(d, c, r1, MIXED)
        assert truncated_hausdorff(c, c, r1, MIXED) == 0.0
        lo, hi = sorted((r1, r2))
        assert truncated_hausdorff(c, d, lo, MIXED) <= truncated_hausdorff(c, d, hi, MIXED)

    @settings(max_examples=100, deadline=None)
    @given(cloud_pts, cloud_pts, cloud_pts)
    def test_excess_triangle(self, a, b, e):
        c, d, m = _cloud(a), _cloud(b), _cloud(e)
        assert excess(c, d, MIXED) <= excess(c, m, MIXED) + excess(m, d, MIXED) + 1e-12

    def test_negative_rho_rejected(self):
        c = PointCloud.from_points([[0.0, 0.0]])
        with pytest.raises(ValueError):
            truncated_hausdorff(c, c, -1.0, L2_2)


@pytest.mark.parametrize("norm", [MIXED, NormSpec.of((4, "L2")), NormSpec.of((1, "ABS"), (3, "L1"))])
def test_indexed_matches_brute(norm):
    rng = np.random.default_rng(7)
    for _ in range(100):
        src = rng.normal(size=(int(rng.integers(1, 300)), 4))
        tgt = rng.normal(size=(int(rng.integers(1, 300)), 4)) * rng.uniform(0.2, 3)
        np.testing.assert_allclose(nearest_indexed(src, tgt, norm), nearest_brute(src, tgt, norm),
                                   rtol=0, atol=1e-12)


def test_auto_switches_to_index_for_large_clouds():
    rng = np.random.default_rng(0)
    c = PointCloud.from_points(rng.uniform(-1, 1, size=(5000, 4)))
    d = PointCloud.from_points(rng.uniform(-1, 1, size=(5000, 4)))
    assert math.isclose(truncated_hausdorff(c, d, 1.0, MIXED, method="auto"),
                        truncated_hausdorff(c, d, 1.0, MIXED, method="brute"), abs_tol=1e-12)
