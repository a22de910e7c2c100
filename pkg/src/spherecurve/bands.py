"""Translations of a curve along its normal, and the bands they sweep out.

The translation by theta is cos(theta) gamma + sin(theta) n; collecting all
admissible translations over a theta-interval gives the regular band, and
the translations toward the center of curvature give the caustic band whose
outer edge is the caustic curve chi = cos(rho) gamma + sin(rho) n.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import sphere
from .curves import (
    AdmissibleCurve,
    ControlPair,
    CurvatureBounds,
    control_transforms,
    cot,
)
from .errors import ThetaOutOfRange
from .tolerances import DEFAULT_TOL, ToleranceProfile

_PAD = 1e-9


def _rotation_r_theta(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]])


def _quat_r_theta(theta: float) -> np.ndarray:
    # R_theta is the rotation by -theta about e2
    return np.array([math.cos(theta / 2.0), 0.0, -math.sin(theta / 2.0), 0.0])


def theta_range(curve: AdmissibleCurve) -> tuple[float, float]:
    """Admissible translation offsets, from the sampled curvature extrema."""
    rho = curve.rho
    return float(rho.max() - math.pi - _PAD), float(rho.min() + _PAD)


def translate_curve(curve: AdmissibleCurve, theta: float,
                    tol: ToleranceProfile = DEFAULT_TOL) -> AdmissibleCurve:
    """Translation gamma_theta = cos(theta) gamma + sin(theta) n.

    The frame transforms by right multiplication with R_theta, the radius of
    curvature shifts to rho - theta, and the curvature bounds shift with it.
    """
    lo, hi = theta_range(curve)
    if not lo <= theta <= hi:
        raise ThetaOutOfRange(
            f"theta={theta:.6f} outside [{lo:.6f}, {hi:.6f}]")
    if theta == 0.0:
        return curve

    c, s = math.cos(theta), math.sin(theta)
    v_int, k_int = curve.interval_vk()
    w_int = v_int * k_int
    v_new = c * v_int - s * w_int
    w_new = c * w_int + s * v_int
    if np.any(v_new <= 0):
        raise ThetaOutOfRange("translation degenerates (non-positive speed)")

    rho1 = min(curve.bounds.rho1 - theta, math.pi)
    rho2 = max(curve.bounds.rho2 - theta, 0.0)
    new_bounds = CurvatureBounds(cot(rho1), cot(rho2))

    h, _, hb, _ = control_transforms(new_bounds)
    controls = ControlPair(h(v_new), hb(w_new / v_new))

    q_theta = _quat_r_theta(theta)
    lift = np.array([sphere.quat_mul(z, q_theta) for z in curve.lift])
    rho_nodes = np.arctan2(1.0, curve.kappa) - theta
    kappa_nodes = np.cos(rho_nodes) / np.sin(rho_nodes)
    v_nodes = curve.speed * (np.cos(theta) - np.sin(theta) * curve.kappa)

    return AdmissibleCurve(
        bounds=new_bounds, controls=controls, domain=curve.domain, lift=lift,
        gamma=c * curve.gamma + s * curve.normal,
        tangent=curve.tangent.copy(),
        normal=-s * curve.gamma + c * curve.normal,
        speed=v_nodes, kappa=kappa_nodes, closed=curve.closed)


@dataclasses.dataclass(frozen=True)
class BandGrid:
    """Evaluations of the band map on a (t, theta) grid.

    samples[i, j] = cos(theta_j) gamma(t_i) + sin(theta_j) n(t_i); the fiber
    over fixed t lies on the great circle orthogonal to the tangent there.
    """

    t: np.ndarray            # (nt,)
    theta: np.ndarray        # (m,)
    samples: np.ndarray      # (nt, m, 3)

    @property
    def points(self) -> np.ndarray:
        """Flat (nt * m, 3) view of the grid samples."""
        return self.samples.reshape(-1, 3)

    def to_csv(self, path) -> None:
        nt, m, _ = self.samples.shape
        with open(path, "w") as fh:
            fh.write("t,theta,x,y,z\n")
            for i in range(nt):
                for j in range(m):
                    x, y, z = self.samples[i, j]
                    fh.write(f"{self.t[i]:.17g},{self.theta[j]:.17g},"
                             f"{x:.17g},{y:.17g},{z:.17g}\n")


def _band(curve: AdmissibleCurve, thetas: np.ndarray, t_stride: int) -> BandGrid:
    sl = slice(None, None, t_stride) if t_stride > 1 else slice(None)
    g, nrm = curve.gamma[sl], curve.normal[sl]
    cos_t, sin_t = np.cos(thetas), np.sin(thetas)
    samples = (cos_t[None, :, None] * g[:, None, :]
               + sin_t[None, :, None] * nrm[:, None, :])
    return BandGrid(t=curve.grid[sl], theta=thetas, samples=samples)


def _theta_grid(lo: float, hi: float, m: int, extra=()) -> np.ndarray:
    grid = np.linspace(lo, hi, m)
    grid = np.union1d(grid, [x for x in extra if lo <= x <= hi])
    if not np.any(grid == 0.0) and lo <= 0.0 <= hi:
        grid = np.union1d(grid, [0.0])
    return grid


def regular_band(curve: AdmissibleCurve, m: int | None = None,
                 t_stride: int = 1,
                 tol: ToleranceProfile = DEFAULT_TOL) -> BandGrid:
    """Band over theta in [rho1 - pi, rho2]: every fiber stays immersed."""
    m = m or tol.band_theta_nodes
    b = curve.bounds
    thetas = _theta_grid(b.rho1 - math.pi, b.rho2, m)
    return _band(curve, thetas, t_stride)


def caustic_band(curve: AdmissibleCurve, m: int | None = None,
                 t_stride: int = 1,
                 tol: ToleranceProfile = DEFAULT_TOL) -> BandGrid:
    """Band over theta in [0, rho0] for a curve in (kappa0, +inf) form.

    The theta grid is refined near the sampled radii of curvature, where the
    band map stops being an immersion (along the caustic).
    """
    m = m or tol.band_theta_nodes
    rho0 = curve.bounds.rho1
    qs = np.quantile(curve.rho, np.linspace(0.02, 0.98, max(m // 4, 9)))
    thetas = _theta_grid(0.0, rho0, m, extra=qs)
    return _band(curve, thetas, t_stride)


@dataclasses.dataclass(frozen=True)
class CausticCurve:
    """Centers of curvature chi(t) = cos(rho) gamma + sin(rho) n."""

    t: np.ndarray
    chi: np.ndarray

    def diameter(self) -> float:
        pts = self.chi
        return float(max(np.linalg.norm(pts - pts[i], axis=1).max()
                         for i in range(0, len(pts), max(1, len(pts) // 64))))


def caustic_curve(curve: AdmissibleCurve) -> CausticCurve:
    rho = curve.rho
    chi = (np.cos(rho)[:, None] * curve.gamma
           + np.sin(rho)[:, None] * curve.normal)
    return CausticCurve(t=curve.grid, chi=chi)


def classification_cloud(curve: AdmissibleCurve,
                         tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Decimated caustic-band point cloud used by the classifiers.

    The cloud always contains the exact caustic points chi(t) so that the
    boundary of the band image is represented at full t-resolution.
    """
    stride = max(1, curve.n // tol.classify_t_nodes)
    band = caustic_band(curve, m=tol.band_theta_nodes // 2 + 1,
                        t_stride=stride, tol=tol)
    chi = caustic_curve(curve).chi
    return np.vstack([band.points, chi])
