"""Explicit homotopies between closed admissible curves.

Paths are discrete families of curves sharing one curvature-bound contract;
every construction normalizes initial frames to the identity so that paths
stay inside the based curve space.  Validation re-checks curvature margins,
closure and parity conservation on every frame.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import sphere
from .bands import translate_curve
from .classify import classification_cloud, condensed_status, rotation_number_condensed
from .curves import (
    AdmissibleCurve,
    ControlPair,
    CurvatureBounds,
    cot,
    control_transforms,
    curve_from_node_data,
    integrate_curve,
    lift_parity,
    reparametrize_by_curvature,
)
from .errors import (
    CurvatureBoundTooTight,
    DomainError,
    NonpositiveRotation,
    NotCondensed,
    ParameterOverlap,
    RadiusOutOfBounds,
    StageToleranceFailure,
)
from .tolerances import DEFAULT_TOL, ToleranceProfile


# ------------------------------------------------------------------ #
# Paths and validation
# ------------------------------------------------------------------ #

@dataclasses.dataclass(frozen=True)
class HomotopyPath:
    """Ordered family of closed curves inside one curvature-bound contract."""

    bounds: CurvatureBounds
    s_values: np.ndarray
    curves: tuple
    provenance: str

    def __len__(self):
        return len(self.curves)


@dataclasses.dataclass(frozen=True)
class ValidationReport:
    min_margin: float
    max_closure_defect: float
    parities: tuple
    passed: bool
    notes: str = ""


def normalize_initial_frame(curve: AdmissibleCurve) -> AdmissibleCurve:
    """Left-translate so that Phi(0) = I and z(0) = 1."""
    out = curve.rotated(curve.frames[0].T)
    lift = out.lift if out.lift[0, 0] > 0 else -out.lift
    return dataclasses.replace(out, lift=lift)


def kappa_margin(curve: AdmissibleCurve, bounds: CurvatureBounds) -> float:
    """Distance of the sampled curvature to the open interval's ends."""
    lo = np.inf if math.isinf(bounds.kappa1) else float(np.min(curve.kappa) - bounds.kappa1)
    hi = np.inf if math.isinf(bounds.kappa2) else float(bounds.kappa2 - np.max(curve.kappa))
    return min(lo, hi)


def validate_path(path: HomotopyPath, bounds: CurvatureBounds | None = None,
                  tol: ToleranceProfile = DEFAULT_TOL) -> ValidationReport:
    """Curvature margin, closure and parity conservation along a path."""
    bounds = bounds or path.bounds
    margin = np.inf
    defect = 0.0
    parities = []
    notes = []
    for c in path.curves:
        margin = min(margin, kappa_margin(c, bounds))
        defect = max(defect, c.closure_defect())
        try:
            parities.append(lift_parity(c).sign)
        except Exception as exc:  # reported, not thrown
            parities.append(0)
            notes.append(str(exc))
    constant = len(set(parities)) == 1 and (not parities or parities[0] != 0)
    passed = bool(margin > 0 and defect < tol.closure and constant)
    return ValidationReport(min_margin=float(margin),
                            max_closure_defect=float(defect),
                            parities=tuple(parities), passed=passed,
                            notes="; ".join(notes))


# ------------------------------------------------------------------ #
# Bending of the k-equator
# ------------------------------------------------------------------ #

def _bend_arc_data(k: int, alpha: float):
    """Length and signed curvature of one even arc of the bent k-equator.

    The arc joins consecutive division points P_i, P_i+1 of the k-fold
    equator through the point Q_i(alpha) seen from the chord midpoint
    (P_i + P_i+1)/2 at elevation alpha; the diameter of the arc's circle is
    then shortest at alpha = pi/2, where the curvature peaks at
    tan(pi/(2k+2)).  Odd arcs are the mirror image with the opposite
    curvature sign.
    """
    delta = k * math.pi / (k + 1)          # equator angle between P_i, P_i+1
    if min(abs(alpha), abs(math.pi - alpha)) < 1e-9:
        if alpha < math.pi / 2:
            return delta, 0.0
        return 2.0 * math.pi - delta, 0.0

    p0 = np.array([1.0, 0.0, 0.0])
    p1 = np.array([math.cos(delta), math.sin(delta), 0.0])
    qmid = np.array([math.cos(delta / 2), math.sin(delta / 2), 0.0])
    north = np.array([0.0, 0.0, 1.0])
    mid = math.cos(delta / 2) * qmid       # euclidean chord midpoint
    d = math.cos(alpha) * qmid + math.sin(alpha) * north
    md = float(mid @ d)
    t_ray = -md + math.sqrt(md * md + 1.0 - float(mid @ mid))
    qa = mid + t_ray * d

    m = np.cross(qa - p0, p1 - p0)
    m /= np.linalg.norm(m)
    d = float(m @ p0)
    if d < 0:
        m, d = -m, -d
    center = d * m
    r_e = math.sqrt(max(0.0, 1.0 - d * d))
    e1 = (p0 - center) / r_e
    e2 = np.cross(m, e1)

    def u_of(p):
        return math.atan2(float((p - center) @ e2), float((p - center) @ e1)) % (2 * math.pi)

    u_q, u_p1 = u_of(qa), u_of(p1)
    if u_q < u_p1:                          # sweep counterclockwise through qa
        sweep, direction = u_p1, 1.0
    else:
        sweep, direction = 2.0 * math.pi - u_p1, -1.0
    length = r_e * sweep

    tangent = direction * e2                # d/du at u = 0, normalized
    normal = np.cross(p0, tangent)
    s = float(m @ normal)
    c_center = m if s > 0 else -m
    rho = math.atan2(abs(s), float(c_center @ p0))
    return length, cot(rho)


def bend_frame(k: int, s: float, kappa1: float | None = None,
               n: int | None = None,
               tol: ToleranceProfile = DEFAULT_TOL) -> AdmissibleCurve:
    """One member of the bending family, normalized to start frame I.

    s = 0 is the equator traversed k times, s = 1 the equator traversed
    k + 2 times; in between the curve is a concatenation of 2k + 2 circle
    arcs with alternating curvature signs.
    """
    if k < 1:
        raise ValueError("k must be positive")
    kmax = math.tan(math.pi / (2 * k + 2))
    if kappa1 is None:
        kappa1 = 2.0 * kmax
    if kappa1 <= kmax:
        raise CurvatureBoundTooTight(
            f"need kappa1 > tan(pi/(2k+2)) = {kmax:.6f}")
    arcs = 2 * k + 2
    n = n or tol.default_n
    per_arc = max(1, -(-n // arcs))        # ceil division
    n = per_arc * arcs
    length, kap = _bend_arc_data(k, s * math.pi)
    speed = length * arcs
    bounds = CurvatureBounds(-kappa1, kappa1)
    h, _, hb, _ = control_transforms(bounds)
    v_hat = np.full(n, h(speed))
    signs = np.repeat([(-1.0) ** i for i in range(arcs)], per_arc)
    w_hat = hb(kap * signs)
    return integrate_curve(ControlPair(v_hat, w_hat), bounds, tol=tol,
                           require_closed=True)


def bend_k_equator(k: int, steps: int | None = None,
                   kappa1: float | None = None, n: int | None = None,
                   tol: ToleranceProfile = DEFAULT_TOL) -> HomotopyPath:
    """The bending homotopy from the k-equator to the (k+2)-equator."""
    steps = steps or tol.path_steps
    s_values = np.linspace(0.0, 1.0, steps)
    curves = tuple(bend_frame(k, float(s), kappa1, n, tol) for s in s_values)
    return HomotopyPath(bounds=curves[0].bounds, s_values=s_values,
                        curves=curves, provenance="bending")


# ------------------------------------------------------------------ #
# Loops: local insertion and global spreading
# ------------------------------------------------------------------ #

def _loop_lift(u: float, n_loops: int, rho: float) -> np.ndarray:
    """Lift of the rho-circle traversed n_loops times, at parameter u."""
    axis = math.pi * n_loops * u
    return sphere.quat_exp([axis * math.cos(rho), 0.0, axis * math.sin(rho)])


def add_loops(curve: AdmissibleCurve, t0: float, n_loops: int,
              rho_small: float, epsilon: float,
              tol: ToleranceProfile = DEFAULT_TOL) -> AdmissibleCurve:
    """Insert n_loops copies of a small circle at gamma(t0).

    The curve is compressed by a factor of two on the two windows adjacent
    to t0 to make room; endpoint frames are untouched and the lift parity
    flips by (-1)^n_loops.  t0 and epsilon are snapped to the grid so that
    the construction is exact; the result lives on a doubled grid.
    """
    if n_loops == 0:
        return curve
    if n_loops < 0:
        raise ValueError("n_loops must be nonnegative")
    if not 0.0 < rho_small < curve.bounds.rho1:
        raise RadiusOutOfBounds("loop radius must lie in (0, rho1)")
    h_step = curve.dt
    t0_i = int(round(t0 / h_step))
    eps_i = max(1, int(round(epsilon / h_step)))
    if not (0 < t0_i - 2 * eps_i and t0_i + 2 * eps_i < curve.n):
        raise ParameterOverlap("insertion window leaves the parameter domain")

    n_src = curve.n
    v_src, k_src = curve.interval_vk()
    n_tgt = 2 * n_src
    v_tgt = np.empty(n_tgt)
    k_tgt = np.empty(n_tgt)
    lift = np.empty((n_tgt + 1, 4))
    v_nodes = np.empty(n_tgt + 1)
    k_nodes = np.empty(n_tgt + 1)

    a_end = 2 * (t0_i - 2 * eps_i)          # plain copy, halves of intervals
    b_end = a_end + 2 * eps_i               # pre-window, compressed 2:1
    c_end = b_end + 4 * eps_i               # inserted loops
    d_end = c_end + 2 * eps_i               # post-window, compressed 2:1

    loop_speed = 2.0 * math.pi * n_loops * math.sin(rho_small) / (2.0 * eps_i * h_step)
    loop_kappa = cot(rho_small)
    z_ins = curve.lift[t0_i]
    sign = (-1.0) ** n_loops

    for j in range(n_tgt):
        if j < a_end:
            src = j // 2
            v_tgt[j], k_tgt[j] = v_src[src], k_src[src]
        elif j < b_end:
            src = (t0_i - 2 * eps_i) + (j - a_end)
            v_tgt[j], k_tgt[j] = 2.0 * v_src[src], k_src[src]
        elif j < c_end:
            v_tgt[j], k_tgt[j] = loop_speed, loop_kappa
        elif j < d_end:
            src = t0_i + (j - c_end)
            v_tgt[j], k_tgt[j] = 2.0 * v_src[src], k_src[src]
        else:
            src = j // 2
            v_tgt[j], k_tgt[j] = v_src[src], k_src[src]

    for j in range(n_tgt + 1):
        if j <= a_end:
            t_src = j * 0.5 * h_step
            lift[j] = curve.eval_lift(t_src)[0]
        elif j <= b_end:
            src_node = (t0_i - 2 * eps_i) + (j - a_end)
            lift[j] = curve.lift[src_node]
        elif j <= c_end:
            u = (j - b_end) / (4.0 * eps_i)
            lift[j] = sphere.quat_mul(z_ins, _loop_lift(u, n_loops, rho_small))
        elif j <= d_end:
            src_node = t0_i + (j - c_end)
            lift[j] = sign * curve.lift[src_node]
        else:
            t_src = j * 0.5 * h_step
            lift[j] = sign * curve.eval_lift(t_src)[0]

    v_nodes[:-1], k_nodes[:-1] = v_tgt, k_tgt
    v_nodes[-1], k_nodes[-1] = v_tgt[-1], k_tgt[-1]
    out = curve_from_node_data(curve.bounds, lift, v_nodes, k_nodes,
                               domain=curve.domain, closed=curve.closed, tol=tol)
    h, _, hb, _ = control_transforms(curve.bounds)
    controls = ControlPair(h(v_tgt), hb(k_tgt))
    return dataclasses.replace(out, controls=controls)


def _sigma_and_derivatives(u: np.ndarray, rho: float):
    """The based circle of radius rho and its first two u-derivatives."""
    cr, sr = math.cos(rho), math.sin(rho)
    tw = 2.0 * math.pi
    cu, su = np.cos(tw * u), np.sin(tw * u)
    base = np.array([cr * cr, 0.0, cr * sr])
    sig = base[None, :] + sr * np.stack([sr * cu, su, -cr * cu], axis=1)
    dsig = sr * tw * np.stack([-sr * su, cu, cr * su], axis=1)
    d2sig = -sr * tw * tw * np.stack([sr * cu, su, -cr * cu], axis=1)
    return sig, dsig, d2sig


def spread_loops(curve: AdmissibleCurve, n: int, rho1: float,
                 bounds: CurvatureBounds | None = None,
                 n_out: int | None = None,
                 tol: ToleranceProfile = DEFAULT_TOL) -> AdmissibleCurve:
    """Compose the frame with a small circle traversed n times ("phone wire").

    The result winds n extra loops along the curve, keeps both endpoint
    frames, flips parity by (-1)^n and has curvature tending to cot(rho1)
    uniformly as n grows.  The input is put in constant-|Lambda| (curvature)
    parametrization first.
    """
    if n < 1:
        raise ValueError("need n >= 1 loops")
    if not 0.0 < rho1 < math.pi:
        raise RadiusOutOfBounds("loop radius must lie in (0, pi)")
    bounds = bounds or curve.bounds

    n_grid = n_out or max(curve.n, 64 * n, tol.default_n)
    base = reparametrize_by_curvature(curve, n_out=n_grid, tol=tol)
    T = base.domain
    t_nodes = base.grid / T                  # unit parameter
    v_int, k_int = base.interval_vk()
    v_n = np.append(v_int, v_int[0] if base.closed else v_int[-1]) * T
    w_n = v_n * np.append(k_int, k_int[0] if base.closed else k_int[-1])

    sig, dsig, d2sig = _sigma_and_derivatives(n * t_nodes, rho1)

    def lam_apply(x):
        return np.stack([-v_n * x[:, 1],
                         v_n * x[:, 0] - w_n * x[:, 2],
                         w_n * x[:, 1]], axis=1)

    a = sig
    b = lam_apply(sig) + n * dsig
    c = lam_apply(lam_apply(sig)) + 2.0 * n * lam_apply(dsig) + n * n * d2sig

    frames = base.frames
    F = np.einsum("nij,nj->ni", frames, a)
    Fd = np.einsum("nij,nj->ni", frames, b)
    speed = np.linalg.norm(Fd, axis=1)
    det = np.einsum("ni,ni->n", a, np.cross(b, c))
    kappa = det / speed ** 3
    if not bounds.contains(kappa):
        from .errors import CurvatureOutOfBounds
        raise CurvatureOutOfBounds(
            f"spread curvature range [{kappa.min():.4f}, {kappa.max():.4f}] "
            f"escapes ({bounds.kappa1:.4f}, {bounds.kappa2:.4f}); increase n")

    tangent = Fd / speed[:, None]
    if base.closed:
        F[-1], tangent[-1] = F[0], tangent[0]
        speed[-1], kappa[-1] = speed[0], kappa[0]
    normal = np.cross(F, tangent)
    new_frames = np.stack([F, tangent, normal], axis=-1)
    lift = _tracked_lift(new_frames, closed=base.closed)
    return curve_from_node_data(bounds, lift, speed, kappa, domain=1.0,
                                closed=base.closed, tol=tol)


def _tracked_lift(frames: np.ndarray, closed: bool) -> np.ndarray:
    """Sign-continuous lift; for closed inputs the endpoint frame is exact."""
    from .curves import lift_from_frames

    lift = lift_from_frames(frames)
    if closed:
        # frames[-1] == frames[0] exactly; keep the tracked sign
        sign = 1.0 if np.dot(lift[-1], lift[0]) > 0 else -1.0
        lift[-1] = sign * lift[0]
    return lift


# ------------------------------------------------------------------ #
# Planar Whitney-Graustein stage
# ------------------------------------------------------------------ #

@dataclasses.dataclass(frozen=True)
class PlanarCurve:
    """Closed plane curve with analytic velocity and acceleration samples."""

    xy: np.ndarray        # (m+1, 2)
    vel: np.ndarray       # (m+1, 2)
    acc: np.ndarray       # (m+1, 2)

    @property
    def m(self) -> int:
        return self.xy.shape[0] - 1

    @property
    def speed(self) -> np.ndarray:
        return np.linalg.norm(self.vel, axis=1)

    @property
    def curvature(self) -> np.ndarray:
        v = self.vel
        a = self.acc
        return (v[:, 0] * a[:, 1] - v[:, 1] * a[:, 0]) / self.speed ** 3

    def closure_defect(self) -> float:
        return float(np.linalg.norm(self.xy[-1] - self.xy[0]))

    def scaled(self, factor: float) -> "PlanarCurve":
        return PlanarCurve(self.xy * factor, self.vel * factor, self.acc * factor)

    def winding(self, tol: ToleranceProfile = DEFAULT_TOL) -> int:
        from .classify import winding_number_planar
        return winding_number_planar(self.vel, tol)


@dataclasses.dataclass(frozen=True)
class PlanarPath:
    s_values: np.ndarray
    curves: tuple


def _curve_from_angles(theta: np.ndarray, length: float, start: np.ndarray,
                       theta_dot: np.ndarray) -> PlanarCurve:
    """Closed curve with tangent angle profile theta and total length ~length.

    The mean of the raw tangent field is subtracted before integrating, so
    closure is exact by construction.
    """
    m = theta.size - 1
    raw = length * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    mean = raw[:-1].mean(axis=0)
    vel = raw - mean
    xy = np.empty_like(vel)
    xy[0] = start
    # trapezoidal cumulative integral; the periodic tangent field keeps the
    # closure exact after the mean correction
    xy[1:] = start + np.cumsum(0.5 * (vel[:-1] + vel[1:]), axis=0) / m
    xy[-1] = xy[0]
    acc = length * theta_dot[:, None] * np.stack([-np.sin(theta), np.cos(theta)], axis=1)
    return PlanarCurve(xy, vel, acc)


def planar_wg_homotopy(curve: PlanarCurve, kappa0: float = 0.0,
                       steps: int | None = None, recenter: bool = False,
                       tol: ToleranceProfile = DEFAULT_TOL) -> PlanarPath:
    """Deform a positively-curved closed plane curve into a round circle.

    Whitney-Graustein style: normalize the start point and the length, then
    interpolate the tangent angle linearly toward 2 pi N t with a closure
    correction, scaling when needed to keep the curvature above kappa0.
    The rotation number N must be positive; the final frame is a round
    circle traversed N times.
    """
    if kappa0 < 0:
        raise DomainError("kappa0 must be nonnegative")
    steps = steps or tol.path_steps
    m = curve.m
    N = curve.winding(tol)
    if N <= 0:
        raise NonpositiveRotation(f"rotation number {N} <= 0")

    speed = curve.speed
    L_in = float(np.sum(0.5 * (speed[1:] + speed[:-1])) / m)
    rho0 = math.inf if kappa0 == 0 else 1.0 / kappa0
    R1 = 0.9 * min(L_in / (2.0 * math.pi * N), rho0)
    L = 2.0 * math.pi * N * R1
    f_scale = L / L_in

    # normalized start data: the curve should begin at -i z in direction z;
    # with recenter=True the curves are kept centered at the origin instead,
    # which is what the spherical lift needs.
    z0 = curve.vel[0] / np.linalg.norm(curve.vel[0])
    if recenter:
        centroid = curve.xy[:-1].mean(axis=0)
        start = curve.xy[0] - centroid
        shift = -centroid
    else:
        start = np.array([z0[1], -z0[0]])    # -i z0
        shift = start - curve.xy[0]

    frames = []
    s_vals = []
    n_a = max(2, steps // 4)
    for i in range(n_a):                     # translate + shrink, no endpoint
        s = i / n_a
        fac = (1.0 - s) + s * f_scale
        xy = (curve.xy[0] + s * shift) + fac * (curve.xy - curve.xy[0])
        frames.append(PlanarCurve(xy, curve.vel * fac, curve.acc * fac))
        s_vals.append(0.5 * s)

    # angle profile of the tangent, resampled by arc length
    ang = np.unwrap(np.arctan2(curve.vel[:, 1], curve.vel[:, 0]))
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) / m)])
    sigma = np.linspace(0.0, cum[-1], m + 1)
    theta_a = np.interp(sigma, cum, ang) - ang[0]
    kappa_a = np.interp(sigma, cum, curve.curvature)
    theta_lin = 2.0 * math.pi * N * np.linspace(0.0, 1.0, m + 1)

    n_b = steps - n_a
    for i in range(n_b):
        s = i / (n_b - 1) if n_b > 1 else 1.0
        th = ang[0] + (1.0 - s) * theta_a + s * theta_lin
        # d theta / dt: input part scales with the resampled arclength rate
        rate = (1.0 - s) * kappa_a * L_in + s * 2.0 * math.pi * N
        pc = _curve_from_angles(th, L, start, rate)
        kmin = float(np.min(pc.curvature))
        if kmin <= 0:
            raise StageToleranceFailure("planar curvature lost positivity")
        if kappa0 > 0.0:
            lam = min(1.0, 0.95 * kmin / kappa0)   # scaled curvature = kappa/lam
            pc = pc.scaled(lam)
        if recenter:
            mid = pc.xy[:-1].mean(axis=0)
            pc = PlanarCurve(pc.xy - mid, pc.vel, pc.acc)
        frames.append(pc)
        s_vals.append(0.5 + 0.5 * s)
    return PlanarPath(np.asarray(s_vals), tuple(frames))


# ------------------------------------------------------------------ #
# Mobius shrinking of condensed curves (kappa0 >= 0)
# ------------------------------------------------------------------ #

def _node_derivatives(curve: AdmissibleCurve):
    """Exact first and second parameter derivatives at the nodes."""
    v = curve.speed[:, None]
    kap = curve.kappa[:, None]
    d1 = v * curve.tangent
    d2 = v * v * (-curve.gamma + kap * curve.normal)
    return d1, d2


def _frames_from_point_data(p, dp, d2p, bounds, domain, closed, tol):
    """Assemble an admissible curve from pointwise samples and derivatives."""
    speed = np.linalg.norm(dp, axis=1)
    tangent = dp / speed[:, None]
    kappa = np.einsum("ni,ni->n", p, np.cross(dp, d2p)) / speed ** 3
    if closed:
        p = p.copy()
        tangent = tangent.copy()
        p[-1], tangent[-1] = p[0], tangent[0]
        speed[-1], kappa[-1] = speed[0], kappa[0]
    p = p / np.linalg.norm(p, axis=1, keepdims=True)
    tangent = tangent - p * np.einsum("ni,ni->n", tangent, p)[:, None]
    tangent /= np.linalg.norm(tangent, axis=1, keepdims=True)
    normal = np.cross(p, tangent)
    frames = np.stack([p, tangent, normal], axis=-1)
    lift = _tracked_lift(frames, closed)
    return curve_from_node_data(bounds, lift, speed, kappa, domain=domain,
                                closed=closed, tol=tol)


def mobius_shrink_curve(curve: AdmissibleCurve, r: float, h,
                        bounds: CurvatureBounds | None = None,
                        tol: ToleranceProfile = DEFAULT_TOL) -> AdmissibleCurve:
    """Apply the dilatation T_r toward h (projection center -h) to a curve."""
    bounds = bounds or curve.bounds
    chart = sphere.StereoChart(-np.asarray(h, dtype=float), tol)
    d1, d2 = _node_derivatives(curve)
    x = chart.project(curve.gamma)
    dx = chart.project_d(curve.gamma, d1)
    d2x = chart.project_d2(curve.gamma, d1, d1) + chart.project_d(curve.gamma, d2)
    p = chart.unproject(r * x)
    dp = chart.unproject_d(r * x, r * dx)
    d2p = (chart.unproject_d2(r * x, r * dx, r * dx)
           + chart.unproject_d(r * x, r * d2x))
    return _frames_from_point_data(p, dp, d2p, bounds, curve.domain,
                                   curve.closed, tol)


def project_to_tangent_plane(curve: AdmissibleCurve, h) -> PlanarCurve:
    """Orthogonal projection onto the tangent plane at h (right-handed)."""
    u1, u2 = sphere.plane_basis(h)
    d1, d2 = _node_derivatives(curve)

    def coords(w):
        return np.stack([w @ u1, w @ u2], axis=1)

    return PlanarCurve(coords(curve.gamma), coords(d1), coords(d2))


def lift_from_tangent_plane(planar: PlanarCurve, h, bounds: CurvatureBounds,
                            tol: ToleranceProfile = DEFAULT_TOL) -> AdmissibleCurve:
    """Inverse orthogonal projection back to the hemisphere around h."""
    h = sphere.unit_vector(h)
    u1, u2 = sphere.plane_basis(h)
    x, v, a = planar.xy, planar.vel, planar.acc
    r2 = np.sum(x * x, axis=1)
    if np.max(r2) >= 1.0:
        raise StageToleranceFailure("planar curve leaves the unit disk")
    w = np.sqrt(1.0 - r2)
    xv = np.sum(x * v, axis=1)
    xa = np.sum(x * a, axis=1)
    vv = np.sum(v * v, axis=1)

    def embed(c):
        return np.multiply.outer(c[:, 0], u1) + np.multiply.outer(c[:, 1], u2)

    p = embed(x) + w[:, None] * h
    dp = embed(v) - (xv / w)[:, None] * h
    d2p = embed(a) - ((vv + xa) / w + xv * xv / w ** 3)[:, None] * h
    return _frames_from_point_data(p, dp, d2p, bounds, 1.0, True, tol)


def shrink_condensed(curve: AdmissibleCurve, steps: int | None = None,
                     tol: ToleranceProfile = DEFAULT_TOL) -> HomotopyPath:
    """Deform a condensed curve (kappa0 >= 0 after reduction) into a circle.

    Stage 1 shrinks the curve toward the barycenter hemisphere axis through
    Mobius dilatations, which can only raise the curvature of a condensed
    curve; stage 2 projects the small curve to the tangent plane, runs the
    planar Whitney-Graustein deformation and lifts the result back.  The
    path ends at a circle traversed nu times.
    """
    from .classify import reduce_to_k0

    steps = steps or tol.path_steps
    reduced, kappa0 = reduce_to_k0(curve, tol)
    if kappa0 < 0:
        raise DomainError("shrink_condensed requires kappa0 >= 0 after reduction")
    status = condensed_status(reduced, tol)
    if not status.condensed:
        raise NotCondensed("caustic cloud is not contained in a hemisphere")
    cloud = classification_cloud(reduced, tol)
    h = sphere.containing_hemisphere(cloud, tol)
    nu = rotation_number_condensed(reduced, h=h, tol=tol)
    bounds = reduced.bounds

    # find the shrink factor: small image plus a planar curvature margin
    cap = 0.30
    kappa_target = kappa0 + max(0.02, 0.05 * abs(kappa0))
    delta = 1.0
    for _ in range(60):
        delta *= 0.5
        cand = mobius_shrink_curve(reduced, delta, h, bounds, tol)
        radius = float(np.arccos(np.clip(cand.gamma @ h, -1.0, 1.0)).max())
        if radius > cap:
            continue
        planar = project_to_tangent_plane(cand, h)
        if float(np.min(planar.curvature)) > kappa_target:
            break
    else:
        raise StageToleranceFailure("no shrink factor reached the planar margin")

    n_a = max(2, steps // 2)
    frames = [reduced]
    for i in range(1, n_a):
        r = 1.0 + (delta - 1.0) * i / (n_a - 1)
        frames.append(mobius_shrink_curve(reduced, r, h, bounds, tol))

    planar = project_to_tangent_plane(frames[-1], h)
    ppath = planar_wg_homotopy(planar, kappa0=kappa_target,
                               steps=steps - n_a + 1, recenter=True, tol=tol)
    if ppath.curves[-1].winding(tol) != nu:
        raise StageToleranceFailure("planar stage changed the rotation number")
    for pc in ppath.curves[1:]:
        lifted = lift_from_tangent_plane(pc, h, bounds, tol)
        if kappa_margin(lifted, bounds) <= 0:
            raise StageToleranceFailure("lifted curvature fell below kappa0")
        frames.append(lifted)

    frames = [normalize_initial_frame(c) for c in frames]
    s_values = np.linspace(0.0, 1.0, len(frames))
    return HomotopyPath(bounds=bounds, s_values=s_values,
                        curves=tuple(frames), provenance="shrink")
