import numpy as np
import pytest

from epikit.bounds import (Status, bound_ambiguity, bound_augmentation, bound_composite, bound_constraint_family,
                           bound_dual, bound_lagrangian, bound_minval, bound_splitting, bound_tilted, epi_norm)
from epikit.funcgrid import Grid, GriddedFunction, grid_sample
from epikit.geometry import PointCloud
from epikit.lagrangian import dual_numeric
from epikit.rockafellian import (AugmentationSpec, Family, RockafellianModel, build_ambiguity, build_composite,
                                 build_constraint_family, build_splitting)

X1 = Grid.from_spacing([(-2, 2)], 0.05)


def quad_model(c=0.0):
    return RockafellianModel(1, 1, Family.CUSTOM, lambda U, X: U[:, 0] ** 2 + (X[:, 0] - 0.3) ** 2 + c)


def table(model, ugrid, xgrid=X1):
    return model.tabulate(ugrid, xgrid)


class TestMinval:
    def test_identical(self):
        g = grid_sample(lambda z: z[:, 0] ** 2 - 0.5, None, X1)
        rep = bound_minval(g, g, 1.0, 0.1, epi_norm(1))
        assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.status is Status.PASS

    def test_random_piecewise_pairs(self):
        rng = np.random.default_rng(21)
        grid = Grid.from_spacing([(-1, 1)], 0.05)
        violations = 0
        for _ in range(200):
            knots = rng.uniform(-1, 1, size=(2, 5))
            g = GriddedFunction(grid, np.interp(grid.points()[:, 0], np.linspace(-1, 1, 5), knots[0]))
            h = GriddedFunction(grid, np.interp(grid.points()[:, 0], np.linspace(-1, 1, 5), knots[1]))
            rep = bound_minval(g, h, float(rng.uniform(0.5, 2)), float(rng.uniform(0, 0.3)), epi_norm(1), tol=0.0)
            violations += rep.status is Status.FAIL
        assert violations == 0

    def test_shift(self):
        g = grid_sample(lambda z: z[:, 0] ** 2 - 0.5, None, X1)
        h = g.with_values(g.values + 0.1)
        rep = bound_minval(g, h, 1.0, 0.0, epi_norm(1))
        assert rep.rhs == pytest.approx(0.1) and rep.ingredients["inf_gap"] == pytest.approx(0.1)
        assert rep.status is Status.PASS

    def test_no_admissible_part(self):
        g = grid_sample(lambda z: z[:, 0] ** 2, None, X1)
        rep = bound_minval(g, g, 1.0, 5.0, epi_norm(1))
        assert rep.status is Status.INAPPLICABLE


class TestTilted:
    U = Grid.from_spacing([(-2, 2)], 0.05)

    def test_identical(self):
        F = table(quad_model(), self.U)
        rep = bound_tilted(F, F, 1, [1.0], [1.0], 2.0)
        assert rep.lhs == 0.0 and rep.rhs == 0.0

    def test_multiplier_shift(self):
        F = table(quad_model(), self.U)
        rep = bound_tilted(F, F, 1, [1.0], [1.1], 2.0)
        assert rep.rhs == pytest.approx(0.2)
        assert rep.lhs <= 0.2 + rep.tol and rep.status is Status.PASS

    def test_tolerance_override_flips(self):
        F = table(quad_model(), self.U)
        Fn = table(quad_model(0.3), self.U)
        rep = bound_tilted(F, Fn, 1, [0.0], [0.0], 1.0)
        assert rep.status is Status.PASS
        assert rep.with_tol(-1.0).status is Status.FAIL


def cubic(x):
    return (x - 1) ** 2 * (x + 1)


class TestComposite:
    def test_identical_and_shift(self):
        ugrid = Grid.from_spacing([(-2, 2)], 0.05)
        xgrid = Grid.from_spacing([(-2.5, 2.5)], 0.05)

        def inst(c):
            g0 = lambda X: -X[:, 0]
            G = lambda X: (cubic(X[:, 0]) + c)[:, None]
            h = lambda Z: np.where(Z[:, 0] <= 1e-9, 0.0, np.inf)
            f = build_composite(None, g0, G, h, n=1, m=1)
            tabs = [grid_sample(g0, None, xgrid), grid_sample(lambda X: G(X)[:, 0], None, xgrid)]
            return f.tabulate(ugrid, xgrid), tabs

        zgrid = Grid.from_spacing([(-3, 3)], 0.05)
        H = grid_sample(lambda Z: np.where(Z[:, 0] <= 1e-9, 0.0, np.inf), None, zgrid)
        X = PointCloud.from_points(xgrid.points())
        F, tabs = inst(0.0)
        rep = bound_composite(F, F, 1, X, X, tabs, tabs, H, H, 1.0)
        assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.status is Status.PASS
        Fn, tabs_n = inst(0.125)
        rep = bound_composite(F, Fn, 1, X, X, tabs, tabs_n, H, H, 1.0)
        assert rep.rhs == pytest.approx(0.125) and rep.status is Status.PASS


class TestConstraintFamily:
    U3 = Grid.from_spacing([(-1, 1)] * 3, 0.25)
    XG = Grid.from_spacing([(-2, 2)], 0.05)

    def parts(self, c0=0.0, c1=0.0):
        g0 = lambda X: X[:, 0] ** 2 + c0
        g1 = lambda X: X[:, 0] - 0.5 + c1
        f = build_constraint_family("INEQUALITY", 1, g0=g0, gs=[g1])
        xs = Grid.from_spacing([(-1, 1)], 0.05)
        return f.tabulate(self.U3, xs), [grid_sample(g0, None, self.XG), grid_sample(g1, None, self.XG)]

    def test_identical(self):
        F, tabs = self.parts()
        rep = bound_constraint_family("INEQUALITY", F, F, epi_norm(3, 1), 1.0, tabs, tabs)
        assert rep.lhs == 0.0 and rep.rhs == 0.0

    def test_objective_shift(self):
        F, tabs = self.parts()
        Fn, tabs_n = self.parts(c0=0.2)
        rep = bound_constraint_family("INEQUALITY", F, Fn, epi_norm(3, 1), 1.0, tabs, tabs_n)
        assert rep.rhs == pytest.approx(0.2) and rep.status is Status.PASS

    def test_unknown_kind(self):
        F, tabs = self.parts()
        with pytest.raises(ValueError):
            bound_constraint_family("SPLITTING", F, F, epi_norm(3, 1), 1.0, tabs, tabs)


class TestAmbiguity:
    U = Grid.from_spacing([(-1, 0)] * 2, 0.05)
    XG = Grid.from_spacing([(-1, 1)], 0.05)
    gs = [lambda X: X[:, 0] ** 2 / 4, lambda X: (X[:, 0] - 1) ** 2 / 10]

    def F(self, p, theta):
        return build_ambiguity(lambda X: 0 * X[:, 0], self.gs, p, theta, n=1).tabulate(self.U, self.XG)

    def tabs(self):
        return [grid_sample(g, None, self.XG) for g in self.gs]

    def test_identical(self):
        F = self.F([0.5, 0.5], 0.0)
        rep = bound_ambiguity(F, F, 2, [0.5, 0.5], [0.5, 0.5], 0.0, 0.0, 1.0, self.tabs(), 1.0)
        assert rep.lhs == 0.0 and rep.rhs == 0.0

    def test_weight_shift(self):
        rep = bound_ambiguity(self.F([0.5, 0.5], 0.0), self.F([0.6, 0.4], 0.0), 2, [0.5, 0.5], [0.6, 0.4],
                              0.0, 0.0, 1.0, self.tabs(), 1.0)
        assert rep.rhs == pytest.approx(0.2) and rep.status is Status.PASS

    def test_theta_shift(self):
        rep = bound_ambiguity(self.F([0.5, 0.5], 0.0), self.F([0.5, 0.5], 1.0), 2, [0.5, 0.5], [0.5, 0.5],
                              0.0, 1.0, 1.0, self.tabs(), 1.0)
        assert rep.rhs == pytest.approx(0.5) and rep.status is Status.PASS

    def test_eta_too_small(self):
        low = [grid_sample(lambda X: X[:, 0] - 5, None, self.XG)]
        F = self.F([0.5, 0.5], 0.0)
        rep = bound_ambiguity(F, F, 2, [0.5, 0.5], [0.5, 0.5], 0.0, 0.0, 1.0, low, 1.0)
        assert rep.status is Status.INAPPLICABLE


class TestSplitting:
    XG = Grid.from_spacing([(-6, 6)], 0.05)
    U = Grid.from_spacing([(-1, 1)] * 2, 0.1)
    gs = [lambda Z: Z[:, 0] ** 2, lambda Z: (Z[:, 0] - 1) ** 2]

    def F(self, p, c=0.0):
        gs = [self.gs[0], lambda Z: self.gs[1](Z) + c]
        return build_splitting(gs, p, n=1).tabulate(self.U, Grid.from_spacing([(-1, 1)], 0.1))

    def tabs(self, c=0.0):
        return [grid_sample(self.gs[0], None, self.XG), grid_sample(lambda Z: self.gs[1](Z) + c, None, self.XG)]

    def test_identical(self):
        F = self.F([0.5, 0.5])
        rep = bound_splitting(F, F, 2, [0.5, 0.5], [0.5, 0.5], 0.0, self.tabs(), self.tabs(), 1.0)
        assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.status is Status.PASS

    def test_weight_shift(self):
        rep = bound_splitting(self.F([0.5, 0.5]), self.F([0.6, 0.4]), 2, [0.5, 0.5], [0.6, 0.4], 0.0,
                              self.tabs(), self.tabs(), 1.0)
        assert rep.rhs == pytest.approx(rep.radii.derived["lam"] * 0.1 * np.sqrt(2))
        assert rep.status is Status.PASS

    def test_component_shift(self):
        rep = bound_splitting(self.F([0.5, 0.5]), self.F([0.5, 0.5], 0.25), 2, [0.5, 0.5], [0.5, 0.5], 0.0,
                              self.tabs(), self.tabs(0.25), 1.0)
        assert rep.rhs >= 0.25 - 1e-12 and rep.status is Status.PASS


class TestAugmentation:
    U = Grid.from_spacing([(-2, 2)], 0.05)

    def test_identical(self):
        F = table(quad_model(), self.U)
        a = AugmentationSpec("PROX", theta=1.0)
        rep = bound_augmentation(F, F, 1, a, a, 0.0, 1.0)
        assert rep.lhs == 0.0 and rep.rhs == 0.0

    def test_theta_shift(self):
        F = table(quad_model(), self.U)
        rep = bound_augmentation(F, F, 1, AugmentationSpec("PROX", theta=1.0), AugmentationSpec("PROX", theta=1.1),
                                 0.0, 1.0)
        assert rep.ingredients["sup_gap"] == pytest.approx(0.1, abs=1e-6)
        assert rep.lhs <= 0.1 + rep.tol and rep.status is Status.PASS

    def test_power_augmentation(self):
        F = table(quad_model(), self.U)
        rep = bound_augmentation(F, table(quad_model(0.05), self.U), 1, AugmentationSpec("POWER", theta=1.0),
                                 AugmentationSpec("POWER", theta=1.2), 0.0, 1.0)
        assert rep.status is Status.PASS

    def test_indicator_zero_inapplicable(self):
        F = table(quad_model(), self.U)
        rep = bound_augmentation(F, F, 1, AugmentationSpec("INDICATOR_ZERO"), AugmentationSpec("PROX", theta=1),
                                 0.0, 1.0)
        assert rep.status is Status.INAPPLICABLE


class TestLagrangianAndDual:
    U = Grid.from_spacing([(-2, 2)], 0.05)

    def test_lagrangian_identical(self):
        F = table(quad_model(), self.U)
        rep = bound_lagrangian(F, F, 1, [0.5], [0.5], 1.0)
        assert rep.lhs == 0.0 and rep.rhs == 0.0

    def test_lagrangian_multiplier_shift(self):
        F = table(quad_model(), self.U)
        rep = bound_lagrangian(F, F, 1, [1.0], [1.2], 1.0)
        assert rep.status is Status.PASS
        assert rep.rhs == pytest.approx(rep.radii.derived["rho_hat"] * 0.2)

    def test_small_rho_hat_refuted(self):
        F = table(quad_model(), self.U)
        rep = bound_lagrangian(F, F, 1, [3.0], [3.0], 1.0, rho_hat=1.0)
        assert rep.status is Status.INAPPLICABLE and rep.notes

    @pytest.mark.parametrize("mode", ["A", "B"])
    def test_dual_identical(self, mode):
        f = quad_model()
        ygrid = Grid.from_spacing([(-1, 1)], 0.1)
        psi = dual_numeric(f, ygrid, self.U, X1)
        rep = bound_dual(psi, psi, table(f, self.U), table(f, self.U), 1, 1.0, mode)
        assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.status is Status.PASS

    @pytest.mark.parametrize("mode", ["A", "B"])
    def test_dual_shift(self, mode):
        ygrid = Grid.from_spacing([(-1, 1)], 0.1)
        psi = dual_numeric(quad_model(), ygrid, self.U, X1)
        psi_n = dual_numeric(quad_model(0.1), ygrid, self.U, X1)
        rep = bound_dual(psi, psi_n, table(quad_model(), self.U), table(quad_model(0.1), self.U), 1, 1.0, mode)
        assert rep.status is Status.PASS

    def test_dual_empty_domain(self):
        ygrid = Grid.from_spacing([(-1, 1)], 0.5)
        bad = RockafellianModel(1, 1, Family.CUSTOM, lambda U, X: -5 * U[:, 0] ** 3 + 0 * X[:, 0])
        psi = dual_numeric(bad, ygrid, Grid.from_spacing([(-1, 1)], 0.5), Grid.from_spacing([(-1, 1)], 0.5))
        assert psi.suspect.all()
        F = table(bad, Grid.from_spacing([(-1, 1)], 0.5), Grid.from_spacing([(-1, 1)], 0.5))
        assert bound_dual(psi, psi, F, F, 1, 1.0, "B").status is Status.INAPPLICABLE

    def test_dual_grids_must_match(self):
        psi = dual_numeric(quad_model(), Grid.from_spacing([(-1, 1)], 0.5), self.U, X1)
        psi2 = dual_numeric(quad_model(), Grid.from_spacing([(-1, 1)], 0.25), self.U, X1)
        with pytest.raises(ValueError):
            bound_dual(psi, psi2, table(quad_model(), self.U), table(quad_model(), self.U), 1, 1.0, "A")
