"""Acceptable and good bands on the nu-sheeted covering cylinder.

A condensed curve with kappa0 < 0 spans a regular band whose lift to the
nu-sheeted cover of the sphere minus two poles is a good band of width
pi - rho0: both boundaries are exactly equidistant.  Bands are stored as
latitude profiles theta+/theta- over a grid of covering meridians; the
covering metric is evaluated by unrolling (relevant distances never wrap
more than one turn in longitude).
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import sphere
from .classify import (
    classification_cloud,
    condensed_status,
    reduce_to_k0,
    rotation_number_condensed,
)
from .curves import AdmissibleCurve, CurvatureBounds, cot, curve_from_points
from .errors import (
    DomainError,
    MeridianMiss,
    NonConvergence,
    NotCondensed,
    TrackCrossing,
)
from .homotopy import HomotopyPath, normalize_initial_frame
from .tolerances import DEFAULT_TOL, ToleranceProfile


@dataclasses.dataclass(frozen=True)
class AcceptableBand:
    """Latitude profiles over covering meridians, with half-width bounds R."""

    nu: int
    R: float
    frame: np.ndarray          # rows u1, u2, h: world -> band coordinates
    lam: np.ndarray            # (K,) covering longitudes in [0, 2 pi nu)
    theta_plus: np.ndarray     # (K,) in [0, R]
    theta_minus: np.ndarray    # (K,) in [-R, 0]

    @property
    def k_nodes(self) -> int:
        return self.lam.size

    def embed(self, lam, phi) -> np.ndarray:
        """Project covering coordinates down to points of S^2."""
        lam = np.asarray(lam, dtype=float)
        phi = np.asarray(phi, dtype=float)
        u1, u2, h = self.frame
        return (np.multiply.outer(np.cos(phi) * np.cos(lam), u1)
                + np.multiply.outer(np.cos(phi) * np.sin(lam), u2)
                + np.multiply.outer(np.sin(phi), h))

    def boundary_distances(self) -> tuple[np.ndarray, np.ndarray]:
        """d(p, dA-) for p on dA+ and d(q, dA+) for q on dA-, per meridian."""
        s = max(1, self.k_nodes // 1024)
        d_plus = _dist_to_profile(self.lam, self.theta_plus,
                                  self.lam[::s], self.theta_minus[::s], self.nu)
        d_minus = _dist_to_profile(self.lam, self.theta_minus,
                                   self.lam[::s], self.theta_plus[::s], self.nu)
        return d_plus, d_minus

    def is_good(self, tol_band: float) -> bool:
        d_plus, d_minus = self.boundary_distances()
        return bool(np.abs(d_plus - self.R).max() <= tol_band
                    and np.abs(d_minus - self.R).max() <= tol_band)


@dataclasses.dataclass(frozen=True)
class GoodBand(AcceptableBand):
    """An acceptable band whose boundaries are exactly width-R equidistant."""


def _wrap_dlam(dlam: np.ndarray, nu: int) -> np.ndarray:
    period = 2.0 * math.pi * nu
    return (dlam + period / 2.0) % period - period / 2.0


def _dist_to_profile(lam_p, phi_p, lam_q, phi_q, nu) -> np.ndarray:
    """min over q of the covering distance from each p to the profile."""
    dlam = _wrap_dlam(lam_p[:, None] - lam_q[None, :], nu)
    usable = np.abs(dlam) <= math.pi
    cosd = (np.sin(phi_p)[:, None] * np.sin(phi_q)[None, :]
            + np.cos(phi_p)[:, None] * np.cos(phi_q)[None, :] * np.cos(dlam))
    cosd = np.where(usable, cosd, -1.0)
    return np.arccos(np.clip(cosd.max(axis=1), -1.0, 1.0))


# ------------------------------------------------------------------ #
# Band extraction from a condensed curve
# ------------------------------------------------------------------ #

def _meridian_profile(lam_curve, phi_curve, lam_grid, nu, take_max):
    """Latitude of the curve over each covering meridian.

    lam_curve is the unwrapped covering longitude of a closed boundary
    curve (total increase 2 pi nu); each meridian of the grid is crossed at
    least once, and repeated crossings are resolved by max/min latitude.
    """
    period = 2.0 * math.pi * nu
    k = lam_grid.size
    step = period / k
    out = np.full(k, -np.inf if take_max else np.inf)
    for i in range(lam_curve.size - 1):
        a, b = lam_curve[i], lam_curve[i + 1]
        pa, pb = phi_curve[i], phi_curve[i + 1]
        lo, hi = (a, b) if a <= b else (b, a)
        j0 = int(math.ceil(lo / step - 1e-12))
        j1 = int(math.floor(hi / step + 1e-12))
        for j in range(j0, j1 + 1):
            z = j * step
            f = 0.5 if b == a else (z - a) / (b - a)
            if -1e-9 <= f <= 1.0 + 1e-9:
                phi = pa + min(max(f, 0.0), 1.0) * (pb - pa)
                jj = j % k
                out[jj] = max(out[jj], phi) if take_max else min(out[jj], phi)
    if not np.all(np.isfinite(out)):
        raise MeridianMiss("a covering meridian was never crossed")
    return out


def band_from_condensed(curve: AdmissibleCurve,
                        tol: ToleranceProfile = DEFAULT_TOL) -> GoodBand:
    """Lift the regular band of a condensed curve (kappa0 < 0) to the cover.

    The hemisphere axis comes from the caustic-cloud barycenter; the band
    boundaries are the curve itself and its antipodal edge, and the result
    is a good band of width pi - rho0.
    """
    reduced, kappa0 = reduce_to_k0(curve, tol)
    if kappa0 >= 0:
        raise DomainError("band extraction requires kappa0 < 0 after reduction")
    rho0 = reduced.bounds.rho1
    status = condensed_status(reduced, tol)
    if not status.condensed:
        raise NotCondensed("caustic cloud is not contained in a hemisphere")
    cloud = classification_cloud(reduced, tol)
    h = sphere.containing_hemisphere(cloud, tol)
    nu = rotation_number_condensed(reduced, h=h, tol=tol)

    u1, u2 = sphere.plane_basis(h)
    frame = np.vstack([u1, u2, h])

    def coords(pts):
        b = pts @ frame.T
        lam = np.unwrap(np.arctan2(b[:, 1], b[:, 0]))
        phi = np.arcsin(np.clip(b[:, 2], -1.0, 1.0))
        return lam, phi

    gam = reduced.gamma
    hat = -(math.cos(rho0) * reduced.gamma + math.sin(rho0) * reduced.normal)
    lam_g, phi_g = coords(gam)
    turn = lam_g[-1] - lam_g[0]
    if abs(abs(turn) - 2.0 * math.pi * nu) > 0.5:
        raise MeridianMiss(
            f"boundary winds {turn / (2 * math.pi):.3f} turns, expected {nu}")
    if turn < 0:
        frame = np.vstack([u1, -u2, h])
        lam_g, phi_g = coords(gam)
    lam_h, phi_h = coords(hat)
    lam_g -= 2.0 * math.pi * nu * np.floor(lam_g[0] / (2.0 * math.pi * nu))
    lam_h += lam_g[0] - lam_h[0] - _wrap_dlam(np.array([lam_g[0] - lam_h[0]]), nu)[0]

    K = tol.band_k_nodes
    lam_grid = np.arange(K) * (2.0 * math.pi * nu / K)
    theta_plus = _meridian_profile(lam_g, phi_g, lam_grid, nu, take_max=True)
    theta_minus = _meridian_profile(lam_h, phi_h, lam_grid, nu, take_max=False)
    R = math.pi - rho0
    return GoodBand(nu=nu, R=R, frame=frame, lam=lam_grid,
                    theta_plus=np.clip(theta_plus, 0.0, R),
                    theta_minus=np.clip(theta_minus, -R, 0.0))


# ------------------------------------------------------------------ #
# Contraction and retraction
# ------------------------------------------------------------------ #

def contract_band(band: AcceptableBand, s: float) -> AcceptableBand:
    """Linear interpolation of the profiles toward the maximal band."""
    if not 0.0 <= s <= 1.0:
        raise DomainError("contraction parameter must lie in [0, 1]")
    return AcceptableBand(
        nu=band.nu, R=band.R, frame=band.frame, lam=band.lam,
        theta_plus=(1.0 - s) * band.theta_plus + s * band.R,
        theta_minus=(1.0 - s) * band.theta_minus - s * band.R)


def _trim_profile(lam_grid, theta_move, lam_bdry, phi_bdry, cutoff, nu, upper):
    """Largest (smallest) latitude within `cutoff` of the opposite boundary.

    Closed form per boundary sample: the cutoff circle around (lam_q, phi_q)
    meets the meridian lam in latitudes atan2(B, A) +- acos(cos c / r); by
    the monotonicity of the distance in latitude the reachable set on each
    meridian is an interval, so its extreme is a max (min) over samples.
    """
    dlam = _wrap_dlam(lam_grid[:, None] - lam_bdry[None, :], nu)
    usable = np.abs(dlam) <= math.pi
    A = np.cos(phi_bdry)[None, :] * np.cos(dlam)
    B = np.sin(phi_bdry)[None, :] * np.ones_like(dlam)
    r = np.hypot(A, B)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = math.cos(cutoff) / r
        ok = usable & (np.abs(ratio) <= 1.0)
        half = np.arccos(np.clip(ratio, -1.0, 1.0))
        center = np.arctan2(B, A)
        cand = center + half if upper else center - half
    cand = np.where(ok, cand, -np.inf if upper else np.inf)
    return cand.max(axis=1) if upper else cand.min(axis=1)


def retract_to_good(band: AcceptableBand, max_iter: int = 60,
                    tol: ToleranceProfile = DEFAULT_TOL,
                    return_history: bool = False):
    """Alternate trimming toward equidistant boundaries (geometric rate).

    Iterate n trims the + boundary to within R + 2^-n of the - boundary for
    odd n and vice versa for even n; theta+ is nonincreasing and theta-
    nondecreasing along the way.  Converges when consecutive profiles move
    less than band_tol / 4.
    """
    R = band.R
    tp = band.theta_plus.copy()
    tm = band.theta_minus.copy()
    history = [(tp.copy(), tm.copy())]
    for n in range(1, max_iter + 1):
        cutoff = R + 2.0 ** (-n)
        s = max(1, band.k_nodes // 1024)
        if n % 2 == 1:
            new = _trim_profile(band.lam, tp, band.lam[::s], tm[::s], cutoff,
                                band.nu, upper=True)
            tp_new = np.minimum(tp, new)
            delta = np.abs(tp_new - tp).max()
            tp = tp_new
        else:
            new = _trim_profile(band.lam, tm, band.lam[::s], tp[::s], cutoff,
                                band.nu, upper=False)
            tm_new = np.maximum(tm, new)
            delta = np.abs(tm_new - tm).max()
            tm = tm_new
        history.append((tp.copy(), tm.copy()))
        if n >= 2 and delta < tol.band_tol / 4.0 and 2.0 ** (-n) < tol.band_tol:
            good = GoodBand(nu=band.nu, R=R, frame=band.frame, lam=band.lam,
                            theta_plus=tp, theta_minus=tm)
            return (good, history) if return_history else good
    raise NonConvergence(f"retraction did not settle in {max_iter} iterations")


# ------------------------------------------------------------------ #
# Tracks and the central curve
# ------------------------------------------------------------------ #

def _nearest_indices(lam_p, phi_p, lam_q, phi_q, nu):
    """Nearest profile position for each point, with parabolic refinement.

    Returns (indices, fractional offsets in [-1/2, 1/2]) so that callers can
    interpolate the boundary between samples; this keeps adjacent tracks
    ordered instead of snapping to shared grid points.
    """
    dlam = _wrap_dlam(lam_p[:, None] - lam_q[None, :], nu)
    usable = np.abs(dlam) <= math.pi
    cosd = (np.sin(phi_p)[:, None] * np.sin(phi_q)[None, :]
            + np.cos(phi_p)[:, None] * np.cos(phi_q)[None, :] * np.cos(dlam))
    cosd = np.where(usable, cosd, -1.0)
    idx = np.argmax(cosd, axis=1)
    k = cosd.shape[1]
    left = cosd[np.arange(len(idx)), (idx - 1) % k]
    mid = cosd[np.arange(len(idx)), idx]
    right = cosd[np.arange(len(idx)), (idx + 1) % k]
    denom = left - 2.0 * mid + right
    frac = np.where(np.abs(denom) > 1e-15,
                    0.5 * (left - right) / np.where(np.abs(denom) > 1e-15, denom, 1.0),
                    0.0)
    return idx, np.clip(frac, -0.5, 0.5)


def central_curve(band: GoodBand, n: int | None = None,
                  tol: ToleranceProfile = DEFAULT_TOL) -> AdmissibleCurve:
    """The equidistant mid-locus of a good band.

    For every meridian node on the + boundary, shoot the minimizing
    geodesic to the - boundary and keep its midpoint; the locus projects to
    a closed admissible curve with radius of curvature in
    [R/2, pi - R/2].  Neighboring tracks are checked for crossings inside
    the band, which would signal a resolution failure.
    """
    K = band.k_nodes
    nu = band.nu
    mids = np.empty((K, 2))              # (lam, phi) on the cover
    ends = np.empty((K, 2))
    idx, frac = _nearest_indices(band.lam, band.theta_plus,
                                 band.lam, band.theta_minus, nu)
    for k in range(K):
        lp, pp = band.lam[k], band.theta_plus[k]
        j = int(idx[k])
        f = float(frac[k])
        j2 = (j + 1) % K if f >= 0 else (j - 1) % K
        w = abs(f)
        # interpolate the boundary point between samples j and j2
        lq_base = band.lam[j] + np.sign(f) * (2.0 * math.pi * nu / K) * w
        pq = (1 - w) * band.theta_minus[j] + w * band.theta_minus[j2]
        lq = lp + _wrap_dlam(np.array([lq_base - lp]), nu)[0]
        p3 = band.embed(lp % (2 * math.pi), pp)
        q3 = band.embed(lq % (2 * math.pi), pq)
        ang = math.acos(max(-1.0, min(1.0, float(p3 @ q3))))
        if ang < 1e-12:
            raise TrackCrossing("degenerate track of zero length")
        m3 = (math.sin(0.5 * ang) * p3 + math.sin(0.5 * ang) * q3) / math.sin(ang)
        m3 /= np.linalg.norm(m3)
        b = band.frame @ m3
        lam_m = math.atan2(b[1], b[0])
        target = 0.5 * (lp + lq)
        lam_m += 2.0 * math.pi * round((target - lam_m) / (2.0 * math.pi))
        mids[k] = (lam_m, math.asin(max(-1.0, min(1.0, b[2]))))
        ends[k] = (lq, pq)

    # neighboring tracks must not cross inside the band beyond the grid
    # quantization (clearance of half a meridian spacing)
    spacing = 2.0 * math.pi * nu / K
    for k in range(K):
        k2 = (k + 1) % K
        shift = 2.0 * math.pi * nu if k2 == 0 else 0.0
        a0 = np.array([band.lam[k], band.theta_plus[k]])
        a1 = ends[k]
        b0 = np.array([band.lam[k2] + shift, band.theta_plus[k2]])
        b1 = ends[k2] + np.array([shift, 0.0])
        if _segment_gap(a0, a1, b0, b1) < -1e-9:
            depth = min(np.linalg.norm(a1 - b1), np.linalg.norm(a0 - b0))
            if depth > 0.5 * spacing:
                raise TrackCrossing(
                    f"tracks {k} and {k2} cross inside the band")

    pts = band.embed(mids[:, 0] % (2 * math.pi), mids[:, 1])
    R = band.R
    pad = max(tol.band_tol, 1e-3)
    kap1 = cot(R / 2.0 - pad)
    bounds = CurvatureBounds(-kap1, kap1)
    return curve_from_points(pts, bounds, n=n or tol.default_n, tol=tol)


def _segment_gap(a0, a1, b0, b1) -> float:
    """Signed separation proxy of two chart segments; negative = crossing."""
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    d1 = orient(a0, a1, b0)
    d2 = orient(a0, a1, b1)
    d3 = orient(b0, b1, a0)
    d4 = orient(b0, b1, a1)
    if (d1 * d2 < 0) and (d3 * d4 < 0):
        return -1.0
    return 1.0


# ------------------------------------------------------------------ #
# The circle-collapse pipeline for kappa0 < 0
# ------------------------------------------------------------------ #

def collapse_condensed_negative(curve: AdmissibleCurve,
                                steps: int | None = None,
                                tol: ToleranceProfile = DEFAULT_TOL) -> HomotopyPath:
    """Deform the central curve of a condensed kappa0 < 0 band to a circle.

    Interpolates the band profiles toward the symmetric band, retracts to a
    good band at every step and takes central curves; the last curve is a
    geodesic circle traversed nu times on the cover.
    """
    steps = steps or max(9, tol.path_steps // 4)
    band = band_from_condensed(curve, tol)
    band = retract_to_good(band, tol=tol)
    target_p = np.full(band.k_nodes, band.R / 2.0)
    target_m = np.full(band.k_nodes, -band.R / 2.0)

    curves = []
    for s in np.linspace(0.0, 1.0, steps):
        prof = AcceptableBand(
            nu=band.nu, R=band.R, frame=band.frame, lam=band.lam,
            theta_plus=(1.0 - s) * band.theta_plus + s * target_p,
            theta_minus=(1.0 - s) * band.theta_minus + s * target_m)
        good = retract_to_good(prof, tol=tol)
        curves.append(normalize_initial_frame(central_curve(good, tol=tol)))
    bounds = curves[0].bounds
    return HomotopyPath(bounds=bounds, s_values=np.linspace(0.0, 1.0, steps),
                        curves=tuple(curves), provenance="custom")


def track_field_lipschitz(band: GoodBand) -> float:
    """Worst local Lipschitz estimate of the track direction field.

    The track directions vary Lipschitz-continuously with constant of order
    1/sin(d0) near the boundary; since no a-priori constant is available,
    the measured worst ratio |delta direction| / |delta base point| over
    neighboring meridians is reported for diagnostics.
    """
    idx, frac = _nearest_indices(band.lam, band.theta_plus,
                                 band.lam, band.theta_minus, band.nu)
    K = band.k_nodes
    dirs = np.empty((K, 3))
    base = np.empty((K, 3))
    for k in range(K):
        j = int(idx[k])
        f = float(frac[k])
        j2 = (j + 1) % K if f >= 0 else (j - 1) % K
        w = abs(f)
        lq = band.lam[j] + np.sign(f) * (2.0 * math.pi * band.nu / K) * w
        pq = (1 - w) * band.theta_minus[j] + w * band.theta_minus[j2]
        p3 = band.embed(band.lam[k] % (2 * math.pi), band.theta_plus[k])
        q3 = band.embed(lq % (2 * math.pi), pq)
        d = q3 - p3 * float(p3 @ q3)
        n = np.linalg.norm(d)
        dirs[k] = d / n if n > 1e-15 else 0.0
        base[k] = p3
    num = np.linalg.norm(np.diff(dirs, axis=0), axis=1)
    den = np.linalg.norm(np.diff(base, axis=0), axis=1)
    good = den > 1e-12
    return float(np.max(num[good] / den[good]))
