import math
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gssdecon import (
    BandwidthSearch,
    ErrorModel,
    GssModel,
    cv_score,
    mise_approx,
    mise_exact,
    minimize_bandwidth,
    plugin_bandwidth,
    select_bandwidth,
)
from gssdecon.errors import InsufficientDataError
from tests.conftest import draw_contaminated, make_model

NORMAL1 = ErrorModel("normal", 1.0)


def trapezoid_cv_oracle(h, wstar, var_u, omega, n_pts=10_001):
    """Independent trapezoid-rule evaluation of the CV criterion."""
    wstar = np.asarray(wstar, dtype=float)
    n = wstar.size
    t = np.linspace(-1.0 / h, 1.0 / h, n_pts)
    psi = np.exp(-0.5 * var_u * (t / omega) ** 2)
    kt = (np.abs(h * t) <= 1.0).astype(float)
    s = np.sin(np.multiply.outer(t, wstar))
    S = s.sum(axis=1)
    Q = (s**2).sum(axis=1)
    integrand = kt / psi**2 * (kt * (S / n) ** 2 - 2.0 * (S * S - Q) / (n * (n - 1.0)))
    return float(np.trapezoid(integrand, t))


def trapezoid_mise_oracle(h, wstar, var_u, omega, kappa, n_pts=10_001):
    """Independent trapezoid-rule evaluation of the MISE criterion."""
    wstar = np.asarray(wstar, dtype=float)
    n = wstar.size
    u = np.linspace(-1.0, 1.0, n_pts)
    psi = np.exp(-0.5 * var_u * (u / (h * omega)) ** 2)
    ku = (np.abs(u) <= 1.0).astype(float)
    var_term = ku * ku / (n * psi**2) * 0.5 * (
        1.0 - np.exp(-0.5 * var_u * (2 * u / (h * omega)) ** 2) * np.exp(-0.5 * (2 * u / h) ** 2)
    )
    t = u / h
    s = np.sin(np.multiply.outer(t, wstar))
    S = s.sum(axis=1)
    Q = (s**2).sum(axis=1)
    s2 = np.clip((S * S - Q) / (n * (n - 1.0) * psi**2), 0.0, None) * (np.abs(t) <= kappa)
    bias_term = ((n - 1.0) / n * ku - 2.0) * ku * s2
    return float(np.trapezoid(var_term + bias_term, u)) / h


class TestCvScore:
    def test_matches_trapezoid_oracle(self):
        wstar = np.array([1.0, 2.0])
        val = cv_score(1.0, wstar, NORMAL1, 1.0)
        oracle = trapezoid_cv_oracle(1.0, wstar, 1.0, 1.0)
        assert abs(val - oracle) < 1e-6

    def test_antithetic_reduces_to_diagonal_term(self):
        # the single-sum part vanishes; only the j != k correction remains
        wstar = np.array([0.8, -0.8])
        val = cv_score(0.7, wstar, NORMAL1, 1.0)
        oracle = trapezoid_cv_oracle(0.7, wstar, 1.0, 1.0)
        assert abs(val - oracle) < 1e-6
        assert val > 0.0

    def test_vanishes_as_h_grows(self, rng):
        wstar = rng.normal(size=30)
        assert abs(cv_score(1e6, wstar, NORMAL1, 1.0)) < 1e-6

    def test_needs_two_points(self):
        with pytest.raises(InsufficientDataError):
            cv_score(0.5, [1.0], NORMAL1, 1.0)


class TestMiseApprox:
    def test_matches_trapezoid_oracle(self):
        w, _, err = draw_contaminated("pi1", "normal", 0.2, 60, 5)
        for h in (0.3, 0.8):
            val = mise_approx(h, w, err, 1.0, kappa=5.0)
            oracle = trapezoid_mise_oracle(h, w, err.variance, 1.0, 5.0)
            assert abs(val - oracle) < 1e-6

    def test_antithetic_variance_only(self):
        wstar = np.array([0.5, -0.5, 1.4, -1.4])
        vals = [mise_approx(h, wstar, NORMAL1, 1.0) for h in (0.3, 0.6, 1.2, 2.4)]
        assert all(v > 0.0 for v in vals)
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_argmin_in_sane_window(self):
        w, _, err = draw_contaminated("pi1", "normal", 0.2, 200, 88)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            h = minimize_bandwidth(lambda hh: mise_approx(hh, w, err, 1.0))
        assert 0.05 < h < 1.5


class TestMiseExact:
    def test_symmetric_case_closed_form(self):
        truth = make_model("pi0")
        err = ErrorModel("normal", 0.2)
        h, n = 0.4, 150
        t = np.linspace(-1 / h, 1 / h, 40_001)
        psi = err.cf(t)
        kt = (np.abs(h * t) <= 1.0).astype(float)
        direct = np.trapezoid(kt / n * (1 - np.exp(-2 * t * t) * err.cf(2 * t)) / (2 * psi * psi), t) / (2 * math.pi)
        assert_allclose(mise_exact(h, truth, err, n), direct, rtol=1e-5)

    def test_large_h_limit_is_s0_energy(self):
        truth = make_model("pi1")
        err = ErrorModel("laplace", 0.1)
        from gssdecon import gauss_legendre_grid, implied_cf

        grid = gauss_legendre_grid(60.0, n_nodes=4096, n_panels=16)
        s0 = np.atleast_1d(implied_cf(GssModel(skew=truth.skew), grid.nodes)).imag
        energy = float((s0 * s0) @ grid.weights) / (2 * math.pi)
        assert_allclose(mise_exact(1e4, truth, err, 200), energy, rtol=1e-3)

    def test_monte_carlo_validation(self):
        # mean ISE of the uncorrected estimator over replicates matches the
        # exact MISE within 5%
        truth = make_model("pi1")
        err = ErrorModel("normal", 0.2 * 0.3697304605)
        h, n, reps = 0.4, 200, 2000
        from gssdecon import gauss_legendre_grid, gss_sample, implied_cf, s0_smoothed

        grid = gauss_legendre_grid(60.0, n_nodes=2048, n_panels=16)
        s0_true = np.atleast_1d(implied_cf(truth, grid.nodes)).imag
        rng = np.random.default_rng(2468)
        total = 0.0
        for _ in range(reps):
            x = gss_sample(n, truth, rng)
            w = x + err.sample(n, rng)
            s0_hat = np.atleast_1d(s0_smoothed(grid.nodes, w, err, 1.0, h))
            total += float(((s0_hat - s0_true) ** 2) @ grid.weights) / (2 * math.pi)
        mc = total / reps
        exact = mise_exact(h, truth, err, n)
        assert abs(mc - exact) / exact < 0.05


class TestMinimizer:
    def test_quadratic(self):
        search = BandwidthSearch(h_min=0.05, h_max=1.0, grid_size=25, tol=1e-8)
        assert abs(minimize_bandwidth(lambda h: (h - 0.3) ** 2, search) - 0.3) < 1e-6

    def test_global_choice_between_two_minima(self):
        def objective(h):
            return min(1.0 + 50 * (h - 0.2) ** 2, 0.5 + 50 * (h - 0.8) ** 2)

        search = BandwidthSearch(h_min=0.05, h_max=1.5, grid_size=40, tol=1e-6)
        assert abs(minimize_bandwidth(objective, search) - 0.8) < 1e-3

    def test_boundary_warning(self):
        search = BandwidthSearch(h_min=0.1, h_max=2.0, grid_size=20, tol=1e-4)
        with pytest.warns(RuntimeWarning, match="boundary"):
            h = minimize_bandwidth(lambda hh: 1.0 / hh, search)
        assert h == 2.0

    def test_flat_objective_warning(self):
        search = BandwidthSearch(h_min=0.1, h_max=2.0, grid_size=21, tol=1e-4)
        with pytest.warns(RuntimeWarning, match="flat"):
            h = minimize_bandwidth(lambda hh: 7.0, search)
        assert 0.1 < h < 2.0

    def test_search_validation(self):
        with pytest.raises(ValueError):
            BandwidthSearch(h_min=1.0, h_max=0.5)
        with pytest.raises(ValueError):
            BandwidthSearch(grid_size=10)


class TestPlugin:
    def test_scale_equivariance(self):
        w, _, err = draw_contaminated("pi0", "normal", 0.2, 500, 17)
        h1 = plugin_bandwidth(w, err)
        c = 2.7
        h2 = plugin_bandwidth(c * w, ErrorModel("normal", c * c * err.variance))
        assert_allclose(h2, c * h1, rtol=1e-9)

    def test_sane_window_for_normal_data(self):
        w, _, err = draw_contaminated("pi0", "normal", 0.2, 500, 17)
        assert 0.1 < plugin_bandwidth(w, err) < 1.0

    def test_deterministic(self):
        w, _, err = draw_contaminated("pi1", "laplace", 0.5, 300, 4)
        assert plugin_bandwidth(w, err) == plugin_bandwidth(w, err)

    def test_needs_enough_data(self):
        with pytest.raises(InsufficientDataError):
            plugin_bandwidth(np.arange(5.0), NORMAL1)


class TestSelectBandwidth:
    @pytest.mark.parametrize("method", ["cv", "mise", "plugin"])
    def test_dispatch_returns_interior_value(self, method):
        w, _, err = draw_contaminated("pi1", "laplace", 0.2, 300, 12)
        h = select_bandwidth(method, w, err, 1.0)
        assert 0.02 <= h <= 3.0

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            select_bandwidth("oracle", [1.0, 2.0], NORMAL1, 1.0)
