import math

import numpy as np
import pytest

import spherecurve as sc
from spherecurve import classify, goodbands as gb, homotopy as ho
from spherecurve.errors import DomainError


@pytest.fixture(scope="module")
def band_tol():
    return sc.DEFAULT_TOL.replace(band_k_nodes=1024)


@pytest.fixture(scope="module")
def circle_band(band_tol):
    bounds = sc.CurvatureBounds(-0.4, math.inf)
    curve = sc.make_circle(math.pi / 2 - 0.15, 2, bounds, n=512)
    return gb.band_from_condensed(curve, band_tol)


class TestBandFromCondensed:
    def test_rejects_nonnegative_kappa0(self):
        c = sc.make_circle(0.7, 1, sc.CurvatureBounds(0.0, math.inf), n=128)
        with pytest.raises(DomainError):
            gb.band_from_condensed(c)

    def test_circle_gives_constant_profiles(self, circle_band):
        assert circle_band.nu == 2
        assert circle_band.theta_plus.max() - circle_band.theta_plus.min() < 2e-2
        assert circle_band.theta_minus.max() - circle_band.theta_minus.min() < 2e-2

    def test_width_is_pi_minus_rho0(self, circle_band, band_tol):
        d_plus, d_minus = circle_band.boundary_distances()
        R = circle_band.R
        assert abs(R - (math.pi - sc.arccot(-0.4))) < 1e-12
        assert np.abs(d_plus - R).max() < 1e-3
        assert np.abs(d_minus - R).max() < 1e-3

    def test_profile_ranges(self, circle_band):
        assert np.all(circle_band.theta_plus >= 0.0)
        assert np.all(circle_band.theta_plus <= circle_band.R + 1e-12)
        assert np.all(circle_band.theta_minus <= 0.0)
        assert np.all(circle_band.theta_minus >= -circle_band.R - 1e-12)

    def test_monodromy_sheet_count(self, band_tol):
        # the lifted boundary closes only after nu circuits
        bounds = sc.CurvatureBounds(-0.4, math.inf)
        for nu in (1, 2, 3):
            curve = sc.make_circle(math.pi / 2 - 0.2, nu, bounds, n=512)
            band = gb.band_from_condensed(curve, band_tol)
            assert band.nu == nu
            assert band.lam[-1] + band.lam[1] == pytest.approx(2 * math.pi * nu)


class TestContractRetract:
    def test_contract_endpoints(self, circle_band):
        same = gb.contract_band(circle_band, 0.0)
        assert np.array_equal(same.theta_plus, circle_band.theta_plus)
        full = gb.contract_band(circle_band, 1.0)
        assert np.abs(full.theta_plus - circle_band.R).max() < 1e-12
        assert np.abs(full.theta_minus + circle_band.R).max() < 1e-12

    def test_contract_stays_acceptable(self, circle_band):
        for s in (0.25, 0.5, 0.75):
            mid = gb.contract_band(circle_band, s)
            assert np.all(mid.theta_plus >= -1e-12)
            assert np.all(mid.theta_plus <= mid.R + 1e-12)
            d_plus, d_minus = mid.boundary_distances()
            assert d_plus.min() >= mid.R - 1e-3

    def test_good_band_is_fixed_point(self, circle_band, band_tol):
        out = gb.retract_to_good(circle_band, tol=band_tol)
        assert np.abs(out.theta_plus - circle_band.theta_plus).max() < band_tol.band_tol
        assert np.abs(out.theta_minus - circle_band.theta_minus).max() < band_tol.band_tol

    def test_maximal_band_retracts_with_monotone_profiles(self, circle_band, band_tol):
        maximal = gb.contract_band(circle_band, 1.0)
        good, hist = gb.retract_to_good(maximal, tol=band_tol,
                                        return_history=True)
        assert len(hist) - 1 <= 60
        tp = np.array([h[0] for h in hist])
        tm = np.array([h[1] for h in hist])
        assert np.all(np.diff(tp, axis=0) <= 1e-12)
        assert np.all(np.diff(tm, axis=0) >= -1e-12)
        assert good.is_good(2 * band_tol.band_tol)

    def test_retracted_width(self, circle_band, band_tol):
        maximal = gb.contract_band(circle_band, 1.0)
        good = gb.retract_to_good(maximal, tol=band_tol)
        d_plus, d_minus = good.boundary_distances()
        R = good.R
        assert R - 2 * band_tol.band_tol <= d_plus.min()
        assert d_plus.max() <= R + 2 * band_tol.band_tol


class TestCentralCurve:
    def test_rotationally_symmetric_band_gives_midlatitude_circle(
            self, circle_band, band_tol):
        maximal = gb.contract_band(circle_band, 1.0)
        good = gb.retract_to_good(maximal, tol=band_tol)
        # rotational symmetry: constant profiles, hence a circle of constant
        # latitude halfway between the boundaries
        assert good.theta_plus.max() - good.theta_plus.min() < 1e-9
        central = gb.central_curve(good, tol=band_tol)
        h = circle_band.frame[2]
        lat = np.arcsin(np.clip(central.gamma @ h, -1, 1))
        mid = 0.5 * (good.theta_plus[0] + good.theta_minus[0])
        assert np.abs(lat - mid).max() < 2e-2
        assert central.closed

    def test_radius_of_curvature_bound(self, circle_band, band_tol):
        central = gb.central_curve(circle_band, tol=band_tol)
        R = circle_band.R
        margin = 1e-3
        assert central.rho.min() >= R / 2 - margin
        assert central.rho.max() <= math.pi - R / 2 + margin

    def test_translates_stay_inside_band(self, circle_band, band_tol):
        from spherecurve.bands import translate_curve
        central = gb.central_curve(circle_band, tol=band_tol)
        R = circle_band.R
        h = circle_band.frame[2]
        for sgn in (1.0, -1.0):
            moved = translate_curve(central, sgn * (R / 2 - 0.05))
            lat = np.arcsin(np.clip(moved.gamma @ h, -1, 1))
            lo = circle_band.theta_minus.min() - 0.05
            hi = circle_band.theta_plus.max() + 0.05
            assert lat.min() > lo - 1e-6
            assert lat.max() < hi + 1e-6


class TestCollapsePipeline:
    def test_collapse_path_validates(self, band_tol):
        bounds = sc.CurvatureBounds(-0.4, math.inf)
        curve = sc.make_circle(math.pi / 2 - 0.15, 2, bounds, n=512)
        path = gb.collapse_condensed_negative(curve, steps=5, tol=band_tol)
        rep = ho.validate_path(path, tol=band_tol)
        assert rep.passed
        assert rep.min_margin > 0
        # ends at a geodesic circle traversed nu times
        final = path.curves[-1]
        assert np.abs(final.kappa).max() < 2e-2
        assert abs(sc.total_curvature(final) - 2 * math.pi * 2) < 0.05


class TestTrackDiagnostics:
    def test_lipschitz_estimate_reported(self, circle_band):
        lip = gb.track_field_lipschitz(circle_band)
        assert np.isfinite(lip) and lip >= 0.0
        # rotationally symmetric bands have slowly varying tracks
        assert lip < 10.0
