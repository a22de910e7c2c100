import json
import math

import numpy as np
import pytest

import spherecurve as sc
from spherecurve import curves as cur
from spherecurve import sphere
from spherecurve.errors import (
    AmbiguousParity,
    CurvatureOutOfBounds,
    NotClosed,
    RadiusOutOfBounds,
)


def newton_inverse(f, y, lo, hi, iters=100):
    """Bracketed Newton oracle for a monotone increasing diffeomorphism."""
    x = 0.5 * (lo + hi)
    for _ in range(iters):
        h = 1e-7 * max(1.0, abs(x))
        h = min(h, 0.25 * (hi - lo))
        df = (f(x + h) - f(x - h)) / (2 * h)
        step = (f(x) - y) / df
        x_new = x - step
        if not lo < x_new < hi:            # fall back to bisection
            x_new = 0.5 * (lo + x) if f(x) > y else 0.5 * (x + hi)
        if f(x) > y:
            hi = x
        else:
            lo = x
        x = x_new
        if hi - lo < 1e-13 * max(1.0, abs(x)):
            break
    return x


class TestControlTransforms:
    def test_h_of_one_is_zero(self):
        h, h_inv, _, _ = sc.control_transforms(sc.UNBOUNDED)
        assert h(1.0) == 0.0
        assert float(h_inv(0.0)) == 1.0

    def test_unbounded_passthrough(self):
        _, _, hb, hb_inv = sc.control_transforms(sc.UNBOUNDED)
        assert float(hb(0.7)) == 0.7
        assert float(hb_inv(0.7)) == 0.7

    @pytest.mark.parametrize("bounds", [
        sc.CurvatureBounds(-1.3, 2.4),
        sc.CurvatureBounds(0.0, math.inf),
        sc.CurvatureBounds(-math.inf, 0.5),
        sc.CurvatureBounds(5.0, 9.0),
    ])
    def test_round_trip_against_newton_oracle(self, bounds, rng):
        _, _, hb, hb_inv = sc.control_transforms(bounds)
        lo = bounds.kappa1 if math.isfinite(bounds.kappa1) else bounds.kappa2 - 50
        hi = bounds.kappa2 if math.isfinite(bounds.kappa2) else bounds.kappa1 + 50
        lo += 1e-9
        hi -= 1e-9
        for x in rng.normal(scale=3.0, size=100):
            t = float(hb_inv(x))
            assert bounds.kappa1 < t < bounds.kappa2
            assert abs(float(hb(t)) - x) < 1e-10 * max(1.0, abs(x))
            # independent oracle
            t_newton = newton_inverse(lambda u: float(hb(u)), x, lo, hi)
            assert abs(t - t_newton) < 1e-6 * max(1.0, abs(t))

    def test_speed_inverse_positive(self, rng):
        _, h_inv, _, _ = sc.control_transforms(sc.UNBOUNDED)
        xs = rng.normal(scale=50.0, size=1000)
        assert np.all(h_inv(xs) > 0)


class TestCircles:
    def test_matches_analytic_circle(self, bounds_k0):
        rho, k = 0.9, 1
        c = sc.make_circle(rho, k, bounds_k0, n=256)
        t = c.grid
        ref = (math.cos(rho) * np.array([math.cos(rho), 0, math.sin(rho)])[None, :]
               + math.sin(rho) * np.stack([
                   math.sin(rho) * np.cos(2 * math.pi * k * t),
                   np.sin(2 * math.pi * k * t),
                   -math.cos(rho) * np.cos(2 * math.pi * k * t)], axis=1))
        assert np.abs(c.gamma - ref).max() < 1e-12

    def test_constant_curvature(self, bounds_k0):
        c = sc.make_circle(0.4, 3, bounds_k0, n=256)
        assert np.abs(c.kappa - sc.cot(0.4)).max() < 1e-12

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
    def test_parity_alternates(self, k, bounds_k0):
        c = sc.make_circle(0.8, k, bounds_k0, n=256)
        assert sc.lift_parity(c).sign == (-1) ** k

    @pytest.mark.parametrize("k", [1, 2, 5])
    def test_total_curvature_closed_form(self, k, bounds_k0):
        # oracle: tot = csc(rho) * length = csc(rho) * 2 pi k sin(rho) = 2 pi k
        c = sc.make_circle(1.1, k, bounds_k0, n=256)
        assert abs(sc.total_curvature(c) - 2 * math.pi * k) < 1e-6

    def test_rejects_radius_outside_bounds(self):
        with pytest.raises(RadiusOutOfBounds):
            sc.make_circle(2.0, 1, sc.CurvatureBounds(0.0, math.inf), n=64)

    def test_rigid_rotation_invariance_of_tot(self, bounds_k0, rng):
        from conftest import random_rotation
        c = sc.make_circle(0.7, 2, bounds_k0, n=256)
        r = c.rotated(random_rotation(rng))
        assert abs(sc.total_curvature(c) - sc.total_curvature(r)) < 1e-12


class TestIntegration:
    def test_frame_consistency(self, bounds_k0):
        c = sc.make_circle(0.5, 1, bounds_k0, n=128)
        f = c.frames
        assert np.abs(f[:, :, 0] - c.gamma).max() < 1e-9
        assert np.abs(f[:, :, 1] - c.tangent).max() < 1e-9
        assert np.abs(np.cross(c.gamma, c.tangent) - c.normal).max() < 1e-10

    def test_curvature_recovered_from_controls(self, rng):
        from spherecurve.factory import random_open_curve
        bounds = sc.CurvatureBounds(-2.0, 3.0)
        c = random_open_curve(bounds, rng, n=128)
        v, kap = c.interval_vk()
        w = v * kap
        assert np.abs(kap - w / v).max() < 1e-14
        assert bounds.contains(kap)

    def test_self_convergence_order(self):
        # Richardson step-halving oracle on smooth controls: with errors
        # C h^p and the n=512 run as reference, e(128)/e(256) = 2^p + 1
        bounds = sc.CurvatureBounds(-3.0, 3.0)
        f_v = lambda t: 1.0 + 0.5 * np.sin(2 * math.pi * t)
        f_w = lambda t: 2.0 * np.cos(2 * math.pi * t)
        ends = {}
        for n in (128, 256, 512):
            controls = sc.controls_from_functions(f_v, f_w, n)
            ends[n] = sc.integrate_curve(controls, bounds).frames[-1]
        e1 = np.abs(ends[128] - ends[512]).max()
        e2 = np.abs(ends[256] - ends[512]).max()
        p = math.log2(e1 / e2 - 1.0)
        assert 1.7 <= p <= 2.3

    def test_unit_quaternion_norms(self, bounds_k0):
        c = sc.make_circle(0.6, 2, bounds_k0, n=512)
        assert np.abs(np.linalg.norm(c.lift, axis=1) - 1.0).max() < 1e-12

    def test_closed_flag_requires_closure(self, rng):
        from spherecurve.factory import random_open_controls
        bounds = sc.CurvatureBounds(-2.0, 2.0)
        controls = random_open_controls(bounds, rng, n=64)
        with pytest.raises(NotClosed):
            sc.integrate_curve(controls, bounds, require_closed=True)


class TestReparametrization:
    def test_curvature_param_domain_is_tot(self, bounds_k0):
        c = sc.make_circle(0.9, 1, bounds_k0, n=256)
        cp = sc.reparametrize_by_curvature(c)
        assert abs(cp.domain - 2 * math.pi) < 1e-9
        # |lifted frame speed| = 1/2: frame rate = sqrt(2) K v = sqrt(2)
        v, kap = cp.interval_vk()
        assert np.abs(np.sqrt(1 + kap ** 2) * v - 1.0).max() < 1e-4

    def test_idempotent(self, bounds_k0):
        c = sc.make_circle(0.9, 2, bounds_k0, n=256)
        c1 = sc.reparametrize_by_curvature(c)
        c2 = sc.reparametrize_by_curvature(c1)
        assert abs(c1.domain - c2.domain) < 1e-9
        assert np.abs(c1.gamma - c2.gamma).max() < 1e-8

    def test_arclength_speed_variance(self, rng):
        from spherecurve.factory import random_open_curve
        c = random_open_curve(sc.CurvatureBounds(-2.0, 2.0), rng, n=256)
        ca = sc.reparametrize_arclength(c)
        assert float(np.var(ca.speed)) < 1e-10

    def test_image_preserved_hausdorff(self, rng):
        # nearest-neighbor oracle: distance of each sample to a dense
        # polyline of the other curve (point-to-segment, both directions)
        from spherecurve.factory import random_open_curve

        def to_polyline(samples, poly):
            from scipy.spatial import cKDTree
            idx = cKDTree(poly).query(samples)[1]
            worst = 0.0
            for p, j in zip(samples, idx):
                best = np.inf
                for a, b in ((max(j - 1, 0), j), (j, min(j + 1, len(poly) - 1))):
                    seg = poly[b] - poly[a]
                    L2 = seg @ seg
                    f = 0.0 if L2 == 0 else np.clip((p - poly[a]) @ seg / L2, 0, 1)
                    best = min(best, np.linalg.norm(p - (poly[a] + f * seg)))
                worst = max(worst, best)
            return worst

        c = random_open_curve(sc.CurvatureBounds(-1.5, 1.5), rng, n=512)
        dense_t = np.linspace(0.0, c.domain, 16 * c.n + 1)
        dense = np.array([sphere.quat_to_rotation(z)[:, 0]
                          for z in c.eval_lift(dense_t)])
        for new in (sc.reparametrize_by_curvature(c),
                    sc.reparametrize_arclength(c)):
            assert to_polyline(new.gamma, dense) < 1e-6

    def test_curvature_param_exact_on_nodes(self, bounds_k0):
        c = sc.make_circle(0.7, 1, bounds_k0, n=256)
        cp = sc.reparametrize_by_curvature(c)
        # tot up to node u equals u (piecewise cumulative oracle)
        v, kap = cp.interval_vk()
        cum = np.cumsum(np.sqrt(1 + kap ** 2) * v) * cp.dt
        assert np.abs(cum - cp.grid[1:]).max() < 1e-6

    def test_closure_preserved(self, bounds_k0):
        c = sc.make_circle(0.7, 3, bounds_k0, n=256)
        assert sc.reparametrize_by_curvature(c).closure_defect() < 1e-12
        assert sc.reparametrize_arclength(c).closure_defect() < 1e-12


class TestLiftParity:
    def test_requires_closed(self, rng):
        from spherecurve.factory import random_open_curve
        c = random_open_curve(sc.CurvatureBounds(-2.0, 2.0), rng, n=64)
        if not c.closed:
            with pytest.raises(NotClosed):
                sc.lift_parity(c)

    def test_ambiguous_parity_raises(self, bounds_k0):
        import dataclasses
        c = sc.make_circle(0.7, 1, bounds_k0, n=64)
        lift = c.lift.copy()
        lift[-1] = sphere.quat_normalize([0.5, 0.5, 0.5, 0.5])
        broken = dataclasses.replace(c, lift=lift)
        with pytest.raises(AmbiguousParity):
            sc.lift_parity(broken)


class TestJsonInterchange:
    def test_round_trip(self, bounds_k0, tmp_path):
        c = sc.make_circle(0.8, 2, bounds_k0, n=64)
        doc = sc.curve_to_json(c)
        text = json.dumps(doc)
        c2 = sc.curve_from_json(json.loads(text))
        assert np.abs(c.gamma - c2.gamma).max() < 1e-12
        assert c2.bounds.kappa2 == math.inf

    def test_infinite_bound_sentinels(self):
        c = sc.make_circle(2.0, 1, sc.UNBOUNDED, n=64)
        doc = sc.curve_to_json(c)
        assert doc["kappa1"] == "-inf"
        assert doc["kappa2"] == "+inf"

    def test_q0_round_trip(self, rng):
        from conftest import random_rotation
        c = sc.make_circle(0.8, 1, sc.CurvatureBounds(0.0, math.inf), n=64)
        r = c.rotated(random_rotation(rng))
        c2 = sc.curve_from_json(sc.curve_to_json(r))
        assert np.abs(r.gamma - c2.gamma).max() < 1e-9

    def test_raw_gamma_import(self, bounds_k0):
        c = sc.make_circle(0.8, 1, bounds_k0, n=256)
        doc = {"kappa1": 0.0, "kappa2": "+inf",
               "gamma": [list(p) for p in c.gamma]}
        c2 = sc.curve_from_json(doc)
        assert c2.closed
        assert np.abs(c2.kappa - sc.cot(0.8)).max() < 1e-2

    def test_raw_import_rejects_wrong_bounds(self, bounds_k0):
        c = sc.make_circle(1.2, 1, sc.CurvatureBounds(0.0, math.inf), n=256)
        doc = {"kappa1": 1.0, "kappa2": "+inf",
               "gamma": [list(p) for p in c.gamma]}
        with pytest.raises(CurvatureOutOfBounds):
            sc.curve_from_json(doc)

    def test_nonunit_domain_relabels(self, bounds_k0):
        c = sc.reparametrize_by_curvature(sc.make_circle(0.8, 1, bounds_k0, n=64))
        c2 = sc.curve_from_json(sc.curve_to_json(c))
        assert c2.domain == 1.0
        assert np.abs(c2.gamma[0] - c.gamma[0]).max() < 1e-9
        assert abs(sc.total_curvature(c2) - sc.total_curvature(c)) < 1e-6
