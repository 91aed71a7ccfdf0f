import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epikit.funcgrid import Grid, conjugate, grid_sample
from epikit.lagrangian import (ambiguity_terms, dual_affine_closed, dual_numeric, lagrangian_ambiguity_closed,
                               lagrangian_composite_closed, lagrangian_numeric, lagrangian_splitting_closed,
                               lagrangian_table, weak_duality_check)
from epikit.rockafellian import (AugmentationSpec, Box, Family, RockafellianModel, augment, build_ambiguity,
                                 build_composite, build_splitting)


def cubic(x):
    return (x - 1) ** 2 * (x + 1)


def ind_nonpos(z):
    return np.where(z <= 1e-9, 0.0, np.inf)


def cubic_composite():
    return build_composite(Box((-2.0,), (2.0,)), lambda X: -X[:, 0], lambda X: cubic(X[:, 0])[:, None],
                           lambda Z: ind_nonpos(Z[:, 0]), n=1, m=1)


def const(c):
    return lambda X: np.full(len(X), float(c))


U_FINE = Grid.from_spacing([(-3, 1)], 1e-3)


class TestNumericLagrangian:
    def test_cubic_at_unit_multiplier(self):
        assert lagrangian_numeric(cubic_composite(), [1.0], [1.0], U_FINE) == pytest.approx(-1.0)

    @pytest.mark.parametrize("x, y", [(0.5, 2.0), (-0.5, 0.3), (1.5, 0.7)])
    def test_cubic_matches_composite_form(self, x, y):
        # u* = -G(x) is a grid node only up to rounding, which costs at most y * u-step
        want = -x + y * cubic(x)
        assert lagrangian_numeric(cubic_composite(), [x], [y], U_FINE) == pytest.approx(want, abs=y * 1e-3)

    def test_negative_multiplier_truncated(self):
        assert lagrangian_numeric(cubic_composite(), [0.5], [-1.0], U_FINE) == -np.inf

    def test_indicator_zero_freezes_u(self):
        f = augment(cubic_composite(), AugmentationSpec("INDICATOR_ZERO"))
        for y in (-3.0, 0.0, 4.0):
            assert lagrangian_numeric(f, [1.0], [y], Grid.from_spacing([(-1, 1)], 0.1)) == -1.0

    def test_table_matches_pointwise(self):
        f = cubic_composite()
        xg = Grid.from_spacing([(-1, 1.5)], 0.25)
        tab = lagrangian_table(f, [0.8], xg, Grid.from_spacing([(-3, 1)], 0.01))
        for x, v in zip(xg.points()[:, 0], tab.values.values):
            assert v == lagrangian_numeric(f, [x], [0.8], Grid.from_spacing([(-3, 1)], 0.01))


class TestCompositeClosed:
    hconj = conjugate(grid_sample(lambda z: ind_nonpos(z[:, 0]), [(-4, 4)], [801]), [(-2, 2)], [401],
                      boundary="inf")

    def test_nonnegative_multiplier(self):
        val = lagrangian_composite_closed(lambda X: -X[:, 0], lambda X: cubic(X[:, 0])[:, None], self.hconj,
                                          [0.5], [1.5])
        assert val == pytest.approx(-0.5 + 1.5 * cubic(0.5))

    def test_negative_multiplier(self):
        val = lagrangian_composite_closed(lambda X: -X[:, 0], lambda X: cubic(X[:, 0])[:, None], self.hconj,
                                          [0.5], [-0.5])
        assert val == -np.inf

    def test_outside_set(self):
        val = lagrangian_composite_closed(lambda X: -X[:, 0], lambda X: cubic(X[:, 0])[:, None], self.hconj,
                                          [3.0], [1.0], X=Box((-2.0,), (2.0,)))
        assert val == np.inf

    def test_multiplier_off_table(self):
        with pytest.raises(ValueError):
            lagrangian_composite_closed(lambda X: -X[:, 0], lambda X: X, self.hconj, [0.0], [5.0])


class TestAmbiguityClosed:
    def test_zero_theta_example(self):
        model = build_ambiguity(const(0), [lambda X: X[:, 0] ** 2, lambda X: (X[:, 0] - 1) ** 2], [0.5, 0.5], 0.0,
                                n=1)
        assert lagrangian_ambiguity_closed(model, [0.0], [1.0, 1.0]) == pytest.approx(0.5)
        num = lagrangian_numeric(model, [0.0], [1.0, 1.0], Grid.from_spacing([(-0.5, 0)] * 2, 1e-3))
        assert num == pytest.approx(0.5, abs=1e-9)

    def test_positive_theta_low_component(self):
        np.testing.assert_allclose(ambiguity_terms(np.array([0.2]), np.array([1.0]), np.array([0.5]), 1.0), [0.1])

    def test_branches_continuous(self):
        y, p, theta = np.array([0.7]), np.array([0.4]), 2.0
        for g in (y[0], y[0] + theta * p[0]):
            lo = ambiguity_terms(np.array([g - 1e-9]), y, p, theta)
            hi = ambiguity_terms(np.array([g + 1e-9]), y, p, theta)
            assert abs(lo[0] - hi[0]) < 1e-8

    def test_zero_weight_collapses(self):
        vals = ambiguity_terms(np.array([-2.0, 0.3, 5.0]), np.full(3, 0.5), np.zeros(3), 1.0)
        np.testing.assert_array_equal(vals, [0.0, 0.0, 0.0])
        np.testing.assert_allclose(ambiguity_terms(np.array([-2.0, 0.3]), np.full(2, 0.5), np.zeros(2), 0.0), 0.0)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(-2, 3), st.floats(-1, 2), st.floats(0.05, 1), st.sampled_from([0.0, 0.5, 2.0]))
    def test_against_scalar_scan(self, g, y, p, theta):
        u = np.linspace(-p, 0, 20001)
        scan = np.min((p + u) * g + 0.5 * theta * u * u - y * u)
        closed = ambiguity_terms(np.array([g]), np.array([y]), np.array([p]), theta)[0]
        assert closed == pytest.approx(scan, abs=1e-6)

    def test_family_checked(self):
        with pytest.raises(ValueError):
            lagrangian_ambiguity_closed(cubic_composite(), [0.0], [1.0])


class TestSplittingClosed:
    def test_half_square_single_block(self):
        model = build_splitting([lambda Z: 0.5 * Z[:, 0] ** 2], [1.0], n=1)
        tab = conjugate(grid_sample(lambda z: 0.5 * z[:, 0] ** 2, [(-4, 4)], [801]), [(-2, 2)], [401])
        assert lagrangian_splitting_closed(model, [0.0], [[1.0]], [tab]) == pytest.approx(-0.5, abs=1e-4)
        num = lagrangian_numeric(model, [0.0], [1.0], Grid.from_spacing([(-3, 3)], 1e-3))
        assert num == pytest.approx(-0.5, abs=1e-6)

    def test_zero_multipliers_give_weighted_infima(self):
        gs = [lambda Z: Z[:, 0] ** 2 + 1, lambda Z: (Z[:, 0] - 1) ** 2 + 3]
        model = build_splitting(gs, [0.25, 0.75], n=1)
        tabs = [conjugate(grid_sample(g, [(-4, 4)], [801]), [(-2, 2)], [401]) for g in gs]
        val = lagrangian_splitting_closed(model, [0.7], [[0.0], [0.0]], tabs)
        assert val == pytest.approx(0.25 * 1 + 0.75 * 3, abs=1e-9)

    def test_zero_weight_rejected(self):
        model = build_splitting([lambda Z: Z[:, 0] ** 2, lambda Z: Z[:, 0] ** 2], [1.0, 0.0], n=1)
        with pytest.raises(ValueError):
            lagrangian_splitting_closed(model, [0.0], [[0.0], [0.0]], [None, None])


class TestDual:
    def test_cubic_dual_at_zero(self):
        psi = dual_numeric(cubic_composite(), Grid.from_spacing([(0, 0.5)], 0.5), Grid.from_spacing([(-12, 0)], 0.01),
                           Grid.from_spacing([(-2, 2)], 0.01))
        assert psi.values.values[0] == pytest.approx(-2.0)

    def test_cubic_weak_duality(self):
        psi = dual_numeric(cubic_composite(), Grid.from_spacing([(0, 2)], 0.1), Grid.from_spacing([(-12, 1)], 0.01),
                           Grid.from_spacing([(-2, 2)], 0.01))
        rep = weak_duality_check(psi, -1.0)
        assert rep.passed and rep.sup_psi <= -1.0

    def test_indicator_zero_dual_is_flat(self):
        f = augment(cubic_composite(), AugmentationSpec("INDICATOR_ZERO"))
        psi = dual_numeric(f, Grid.from_spacing([(-2, 2)], 0.5), Grid.from_spacing([(-1, 1)], 0.1),
                           Grid.from_spacing([(-2, 2)], 0.01))
        np.testing.assert_allclose(psi.values.values, -1.0)
        assert not psi.suspect.any()

    def test_boundary_minimiser_flagged(self):
        f = RockafellianModel(1, 1, Family.CUSTOM, lambda U, X: U[:, 0] ** 2 + X[:, 0] ** 2)
        psi = dual_numeric(f, Grid.from_spacing([(0, 4)], 1.0), Grid.from_spacing([(-1, 1)], 0.1),
                           Grid.from_spacing([(-1, 1)], 0.1))
        # y = 2 puts the true minimiser u = 1 on the edge without truncation
        assert psi.suspect.ravel().tolist() == [False, False, False, True, True]
        assert np.isneginf(psi.values.values[-1])

    def test_affine_closed(self):
        g0c = conjugate(grid_sample(lambda z: 0.5 * z[:, 0] ** 2, [(-4, 4)], [801]), [(-2, 2)], [401])
        assert dual_affine_closed(g0c, [[1.0]], [0.0], [1.0]) == pytest.approx(-0.5, abs=1e-4)
        assert dual_affine_closed(g0c, [[1.0]], [1.0], [0.0]) == pytest.approx(-float(g0c.interp([[0.0]])[0]))

    def test_affine_closed_off_table(self):
        g0c = conjugate(grid_sample(lambda z: 0.5 * z[:, 0] ** 2, [(-4, 4)], [81]), [(-1, 1)], [21])
        with pytest.raises(ValueError):
            dual_affine_closed(g0c, [[1.0]], [0.0], [3.0])


class TestWeakDuality:
    def test_violation(self):
        grid = Grid.from_spacing([(0, 1)], 0.5)
        rep = weak_duality_check(grid_sample(lambda y: y[:, 0], None, grid), 0.5)
        assert not rep.passed and rep.violation == pytest.approx(0.5)

    def test_degenerate_infinite_problem(self):
        grid = Grid.from_spacing([(0, 1)], 0.5)
        rep = weak_duality_check(grid_sample(lambda y: np.full(len(y), np.inf), None, grid), np.inf)
        assert rep.passed and rep.degenerate
