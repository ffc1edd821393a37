import dataclasses
import math

import numpy as np
import pytest

from derangetropy.distributions import (
    Arcsin,
    Exponential,
    Normal,
    Semicircle,
    Uniform,
)
from derangetropy.errors import DomainError, GridMismatch, InvalidGrid
from derangetropy.recursion import (
    GridFunction,
    apply_derangetropy,
    convergence_metrics,
    discretize,
    iterate,
    l2_distance,
)

RHO_FLAT_CENTER = 1.4051959565836603

# tail truncation that keeps each family's grid honest; the arcsin edges
# need a wide margin because the density is unbounded there
SEED_EPS = {
    "Uniform": 1e-9,
    "Normal": 1e-6,
    "Exponential": 1e-9,
    "Semicircle": 1e-9,
    "Arcsin": 1e-2,
}

ZOO = [
    Uniform(0.0, 1.0),
    Normal(0.0, 1.0),
    Exponential(1.0),
    Semicircle(-1.0, 1.0),
    Arcsin(-1.0, 1.0),
]


def _ids(d):
    return type(d).__name__


def _grid(d, n=2001):
    return discretize(d, n_points=n, tail_eps=SEED_EPS[type(d).__name__])


class TestDiscretize:
    def test_flat_density(self):
        g = discretize(Uniform(0.0, 1.0), n_points=1001, tail_eps=1e-9)
        assert g.level == 0
        assert g.xs[0] == pytest.approx(0.0, abs=1e-8)
        assert g.xs[-1] == pytest.approx(1.0, abs=1e-8)
        assert np.allclose(g.density, 1.0, atol=1e-6)
        assert g.cdf[0] == 0.0
        assert g.cdf[-1] == 1.0

    def test_gaussian_window(self):
        g = discretize(Normal(0.0, 1.0), n_points=501, tail_eps=1e-6)
        assert g.xs[0] == pytest.approx(-4.75342430882277, abs=1e-9)
        assert g.xs[-1] == pytest.approx(4.75342430882277, abs=1e-9)
        assert abs(float(np.trapezoid(g.density, g.xs)) - 1.0) < 1e-8

    def test_arcsin_edges_stay_finite(self):
        g = discretize(Arcsin(0.0, 1.0), n_points=2001, tail_eps=1e-6)
        assert np.all(np.isfinite(g.density))
        assert abs(float(np.trapezoid(g.density, g.xs)) - 1.0) < 1e-8
        # edge density towers over the interior
        assert g.density[0] > 50.0 * g.density[g.density.size // 2]

    def test_validate_passes(self):
        _grid(Uniform(0.0, 1.0)).validate()

    @pytest.mark.parametrize("n", [2, 100])
    def test_too_few_points(self, n):
        with pytest.raises(DomainError):
            discretize(Uniform(0.0, 1.0), n_points=n, tail_eps=1e-6)

    @pytest.mark.parametrize("eps", [0.0, -1e-9, 0.1, 0.2])
    def test_bad_tail_eps(self, eps):
        with pytest.raises(DomainError):
            discretize(Uniform(0.0, 1.0), n_points=1001, tail_eps=eps)


class TestApply:
    def test_first_level_flat_density(self):
        g0 = discretize(Uniform(0.0, 1.0), n_points=4001, tail_eps=1e-9)
        g1 = apply_derangetropy(g0)
        assert g1.level == 1
        assert abs(g1.prenorm_mass - 1.0) < 1e-6
        mid = g1.xs.size // 2
        assert g1.density[mid] == pytest.approx(RHO_FLAT_CENTER, rel=1e-5)
        # cdf hits 0 and 1 at the window edges, so the weight vanishes there
        assert g1.density[0] == 0.0
        assert g1.density[-1] == 0.0

    @pytest.mark.parametrize("d", ZOO, ids=_ids)
    def test_mass_renormalized_each_level(self, d):
        g = _grid(d)
        for _ in range(3):
            g = apply_derangetropy(g)
            assert abs(float(np.trapezoid(g.density, g.xs)) - 1.0) < 1e-8

    @pytest.mark.parametrize("d", ZOO, ids=_ids)
    def test_prenorm_mass_near_one(self, d):
        # the weight already integrates to 1 against any density, so the
        # discrete defect should be small at 2001 points
        g = _grid(d)
        for _ in range(5):
            g = apply_derangetropy(g)
            assert abs(g.prenorm_mass - 1.0) < 1e-3

    @pytest.mark.parametrize("d", ZOO, ids=_ids)
    def test_endpoints_pinned(self, d):
        g = apply_derangetropy(_grid(d))
        assert g.density[0] == 0.0
        assert g.density[-1] == 0.0

    @pytest.mark.parametrize(
        "d", [Uniform(0.0, 1.0), Normal(0.0, 1.0), Semicircle(-1.0, 1.0), Arcsin(-1.0, 1.0)],
        ids=_ids,
    )
    def test_median_anchored_for_symmetric_seeds(self, d):
        g = _grid(d)
        m0 = g.median()
        step = float(g.xs[1] - g.xs[0])
        for _ in range(5):
            g = apply_derangetropy(g)
            assert abs(g.median() - m0) <= step

    def test_level_counter(self):
        g = _grid(Uniform(0.0, 1.0))
        assert apply_derangetropy(apply_derangetropy(g)).level == 2


class TestIterate:
    def test_returns_all_levels(self):
        g0 = _grid(Uniform(0.0, 1.0))
        out = iterate(g0, 3)
        assert [g.level for g in out] == [0, 1, 2, 3]
        assert out[0] is g0

    def test_zero_rounds_rejected(self):
        with pytest.raises(DomainError):
            iterate(_grid(Uniform(0.0, 1.0)), 0)

    def test_variance_contracts_for_flat_seed(self):
        out = iterate(_grid(Uniform(0.0, 1.0)), 4)
        center = out[0].median()
        delta = 0.05
        variances = [convergence_metrics(g, delta, center=center).variance for g in out]
        assert all(b < a for a, b in zip(variances, variances[1:]))

    def test_central_mass_grows_for_flat_seed(self):
        out = iterate(_grid(Uniform(0.0, 1.0)), 4)
        center = out[0].median()
        masses = [convergence_metrics(g, 0.05, center=center).central_mass for g in out]
        assert all(b > a for a, b in zip(masses, masses[1:]))


class TestGridFunctionValidation:
    def _flat(self):
        return _grid(Uniform(0.0, 1.0))

    def test_corrupt_mass(self):
        g = self._flat()
        bad = dataclasses.replace(g, density=g.density * 1.5)
        with pytest.raises(InvalidGrid):
            bad.validate()

    def test_non_monotone_grid(self):
        g = self._flat()
        xs = g.xs.copy()
        xs[5], xs[6] = xs[6], xs[5]
        with pytest.raises(InvalidGrid):
            dataclasses.replace(g, xs=xs).validate()

    def test_negative_density(self):
        g = self._flat()
        density = g.density.copy()
        density[100] = -0.5
        with pytest.raises(InvalidGrid):
            dataclasses.replace(g, density=density).validate()

    def test_cdf_must_end_at_one(self):
        g = self._flat()
        cdf = g.cdf.copy()
        cdf[-1] = 0.9
        with pytest.raises(InvalidGrid):
            dataclasses.replace(g, cdf=cdf).validate()

    def test_apply_revalidates_input(self):
        g = self._flat()
        bad = dataclasses.replace(g, density=g.density * 2.0)
        with pytest.raises(InvalidGrid):
            apply_derangetropy(bad)


class TestQuantileAndMedian:
    def test_flat_quantiles(self):
        g = _grid(Uniform(0.0, 1.0), n=4001)
        assert g.quantile(0.5) == pytest.approx(0.5, abs=1e-6)
        assert g.quantile(0.25) == pytest.approx(0.25, abs=1e-6)
        assert g.median() == pytest.approx(0.5, abs=1e-6)

    def test_cdf_at_interpolates(self):
        g = _grid(Uniform(0.0, 1.0), n=4001)
        assert g.cdf_at(0.3) == pytest.approx(0.3, abs=1e-6)
        assert g.cdf_at(-5.0) == 0.0
        assert g.cdf_at(5.0) == 1.0

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.2, 1.3])
    def test_quantile_domain(self, p):
        with pytest.raises(DomainError):
            _grid(Uniform(0.0, 1.0)).quantile(p)


class TestConvergenceMetrics:
    def test_flat_seed_level_zero(self):
        g = _grid(Uniform(0.0, 1.0), n=4001)
        m = convergence_metrics(g, 0.1)
        assert m.level == 0
        assert m.median == pytest.approx(0.5, abs=1e-6)
        assert m.variance == pytest.approx(1.0 / 12.0, abs=1e-6)
        assert m.central_mass == pytest.approx(0.2, abs=1e-6)
        assert m.iqr == pytest.approx(0.5, abs=1e-5)

    def test_center_override(self):
        g = _grid(Uniform(0.0, 1.0), n=4001)
        shifted = convergence_metrics(g, 0.1, center=0.3)
        assert shifted.central_mass == pytest.approx(0.2, abs=1e-6)
        assert shifted.median == pytest.approx(0.5, abs=1e-6)

    @pytest.mark.parametrize("delta", [0.0, -0.1, math.nan])
    def test_delta_domain(self, delta):
        with pytest.raises(DomainError):
            convergence_metrics(_grid(Uniform(0.0, 1.0)), delta)


class TestL2Distance:
    def test_identity(self):
        g = _grid(Uniform(0.0, 1.0))
        assert l2_distance(g, g) == pytest.approx(0.0, abs=1e-14)

    def test_refinement_stability(self):
        coarse = apply_derangetropy(discretize(Uniform(0.0, 1.0), 2001, 1e-9))
        fine = apply_derangetropy(discretize(Uniform(0.0, 1.0), 4001, 1e-9))
        assert l2_distance(coarse, fine) < 1e-4

    def test_disjoint_windows(self):
        a = discretize(Uniform(0.0, 1.0), 1001, 1e-9)
        b = discretize(Uniform(2.0, 3.0), 1001, 1e-9)
        with pytest.raises(GridMismatch):
            l2_distance(a, b)

    def test_symmetric(self):
        a = apply_derangetropy(_grid(Uniform(0.0, 1.0)))
        b = apply_derangetropy(_grid(Normal(0.0, 1.0)))
        assert l2_distance(a, b) == pytest.approx(l2_distance(b, a), rel=1e-12)


class TestDeepLevels:
    def test_level_three_stable_under_refinement(self):
        coarse = iterate(discretize(Uniform(0.0, 1.0), 2001, 1e-9), 3)[-1]
        fine = iterate(discretize(Uniform(0.0, 1.0), 4001, 1e-9), 3)[-1]
        xs = np.linspace(0.05, 0.95, 301)
        dc = np.interp(xs, coarse.xs, coarse.density)
        df = np.interp(xs, fine.xs, fine.density)
        assert float(np.max(np.abs(dc - df))) < 1e-3


class TestArcsinIdentity:
    def test_analytic_cdf_identity(self):
        # the arcsine cdf turns the oscillatory factor into the semicircle
        # shape: sin(pi F(x)) = 2 sqrt(x (1 - x)) on (0, 1)
        d = Arcsin(0.0, 1.0)
        xs = np.linspace(0.0, 1.0, 1001)
        lhs = np.sin(np.pi * d.cdf(xs))
        rhs = 2.0 * np.sqrt(xs * (1.0 - xs))
        assert float(np.max(np.abs(lhs - rhs))) < 1e-12

    def test_grid_cdf_identity_is_coarser(self):
        # the grid route is truncation-limited: renormalizing over the
        # clipped window shifts the cdf by O(pi * tail_eps) everywhere, so
        # only a bound of that order holds (the analytic route above is exact)
        g = discretize(Arcsin(0.0, 1.0), 4001, 1e-2)
        lhs = np.sin(np.pi * g.cdf)
        rhs = 2.0 * np.sqrt(np.clip(g.xs * (1.0 - g.xs), 0.0, None))
        defect = float(np.max(np.abs(lhs - rhs)))
        assert defect < 5e-2
        assert defect > 1e-3
