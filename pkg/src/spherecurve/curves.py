"""Representation, construction and frame integration of admissible curves.

A curve is carried on a uniform grid over [0, T] by per-interval constant
controls (v_hat, w_hat) together with exact node samples of the frame lift
z in S^3.  Piecewise-constant controls integrate exactly: each step is one
quaternion exponential, so the lift never drifts off S^3 and closed curves
built analytically close to roundoff.
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

from . import sphere
from .errors import (
    AmbiguousParity,
    CurvatureOutOfBounds,
    NonPositiveSpeed,
    NotClosed,
    RadiusOutOfBounds,
)
from .tolerances import DEFAULT_TOL, ToleranceProfile


def arccot(kappa: float) -> float:
    """Radius of curvature in [0, pi]; arccot(+inf) = 0, arccot(-inf) = pi."""
    if math.isinf(kappa):
        return 0.0 if kappa > 0 else math.pi
    return math.atan2(1.0, kappa)


def cot(rho: float) -> float:
    if rho <= 0.0:
        return math.inf
    if rho >= math.pi:
        return -math.inf
    return math.cos(rho) / math.sin(rho)


@dataclasses.dataclass(frozen=True)
class CurvatureBounds:
    """Open curvature interval (kappa1, kappa2); infinities allowed."""

    kappa1: float
    kappa2: float

    def __post_init__(self):
        if not self.kappa1 < self.kappa2:
            raise ValueError("need kappa1 < kappa2")

    @property
    def rho1(self) -> float:
        return arccot(self.kappa1)

    @property
    def rho2(self) -> float:
        return arccot(self.kappa2)

    @property
    def width(self) -> float:
        """rho1 - rho2, the only parameter the topology depends on."""
        return self.rho1 - self.rho2

    def contains(self, kappa) -> bool:
        return bool(np.all(kappa > self.kappa1) and np.all(kappa < self.kappa2))

    def reduced_kappa0(self) -> float:
        """cot(rho1 - rho2): the lower bound after translating by rho2."""
        return cot(self.width)


UNBOUNDED = CurvatureBounds(-math.inf, math.inf)


# ------------------------------------------------------------------ #
# Control transforms (the four h-diffeomorphisms and their inverses)
# ------------------------------------------------------------------ #

def _h(t):
    return t - 1.0 / t


def _h_inv(x):
    # positive root of t^2 - x t - 1 = 0, stable for large |x|
    x = np.asarray(x, dtype=float)
    root = np.sqrt(x * x + 4.0)
    return np.where(x >= 0, (x + root) / 2.0, 2.0 / (root - x))


def control_transforms(bounds: CurvatureBounds):
    """(h, h_inv, h_bounds, h_bounds_inv) mapping controls to (speed, kappa).

    h: (0, inf) -> R reparametrizes speed, h(t) = t - 1/t.  h_bounds maps
    the open curvature interval onto R; its inverse is closed-form in all
    four finite/infinite cases.
    """
    k1, k2 = bounds.kappa1, bounds.kappa2
    if math.isinf(k1) and math.isinf(k2):
        hb = lambda t: np.asarray(t, dtype=float)
        hb_inv = lambda x: np.asarray(x, dtype=float)
    elif math.isinf(k2):
        hb = lambda t: t + 1.0 / (k1 - t)
        hb_inv = lambda x: k1 + _h_inv(np.asarray(x, dtype=float) - k1)
    elif math.isinf(k1):
        hb = lambda t: t + 1.0 / (k2 - t)
        hb_inv = lambda x: k2 - _h_inv(k2 - np.asarray(x, dtype=float))
    else:
        c = k1 - k2

        def hb(t):
            return 1.0 / (k1 - t) + 1.0 / (k2 - t)

        def hb_inv(x):
            x = np.asarray(x, dtype=float)
            root = np.sqrt(x * x * c * c + 4.0)
            return (k1 + k2) / 2.0 + x * c * c / (2.0 * (2.0 + root))

    return _h, _h_inv, hb, hb_inv


@dataclasses.dataclass(frozen=True)
class ControlPair:
    """Per-interval constant controls on a uniform grid of n intervals."""

    v_hat: np.ndarray
    w_hat: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v_hat, dtype=float)
        w = np.asarray(self.w_hat, dtype=float)
        if v.shape != w.shape or v.ndim != 1:
            raise ValueError("control arrays must be 1-d and equal length")
        if v.size < 16:
            raise ValueError("need at least 16 control intervals")
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(w))):
            raise ValueError("controls must be finite")
        object.__setattr__(self, "v_hat", v)
        object.__setattr__(self, "w_hat", w)

    @property
    def n(self) -> int:
        return self.v_hat.size


def controls_from_functions(f_vhat, f_what, n: int, domain: float = 1.0) -> ControlPair:
    """Sample smooth control functions at interval midpoints.

    Midpoint sampling makes the piecewise-constant integrator second-order
    accurate in the grid spacing for smooth controls.
    """
    mid = (np.arange(n) + 0.5) * (domain / n)
    return ControlPair(np.asarray(f_vhat(mid), dtype=float) + np.zeros(n),
                       np.asarray(f_what(mid), dtype=float) + np.zeros(n))


# ------------------------------------------------------------------ #
# Quaternion step kernels
# ------------------------------------------------------------------ #

def _step_quats(v, w, dt) -> np.ndarray:
    """exp(dt/2 (w i + v k)) for per-interval arrays v, w."""
    hx = 0.5 * dt * np.asarray(w, dtype=float)
    hz = 0.5 * dt * np.asarray(v, dtype=float)
    a = np.hypot(hx, hz)
    s = np.where(a > 1e-14, np.sin(np.where(a > 1e-14, a, 1.0)) / np.where(a > 1e-14, a, 1.0), 1.0)
    out = np.empty((np.size(a), 4))
    out[:, 0] = np.cos(a)
    out[:, 1] = s * hx
    out[:, 2] = 0.0
    out[:, 3] = s * hz
    return out


def _chain_quats(z0, steps: np.ndarray) -> np.ndarray:
    """Cumulative right-products z_{i+1} = z_i * steps_i, renormalized."""
    n = steps.shape[0]
    out = np.empty((n + 1, 4))
    w, x, y, z = float(z0[0]), float(z0[1]), float(z0[2]), float(z0[3])
    out[0] = (w, x, y, z)
    for i in range(n):
        w2, x2, y2, z2 = steps[i]
        nw = w * w2 - x * x2 - y * y2 - z * z2
        nx = w * x2 + x * w2 + y * z2 - z * y2
        ny = w * y2 - x * z2 + y * w2 + z * x2
        nz = w * z2 + x * y2 - y * x2 + z * w2
        inv = 1.0 / math.sqrt(nw * nw + nx * nx + ny * ny + nz * nz)
        w, x, y, z = nw * inv, nx * inv, ny * inv, nz * inv
        out[i + 1] = (w, x, y, z)
    return out


def frames_from_lift(lift: np.ndarray) -> np.ndarray:
    """Rotation matrices (m, 3, 3) for an array of unit quaternions."""
    w, x, y, z = lift[:, 0], lift[:, 1], lift[:, 2], lift[:, 3]
    R = np.empty((lift.shape[0], 3, 3))
    R[:, 0, 0] = 1 - 2 * (y * y + z * z)
    R[:, 0, 1] = 2 * (x * y - w * z)
    R[:, 0, 2] = 2 * (x * z + w * y)
    R[:, 1, 0] = 2 * (x * y + w * z)
    R[:, 1, 1] = 1 - 2 * (x * x + z * z)
    R[:, 1, 2] = 2 * (y * z - w * x)
    R[:, 2, 0] = 2 * (x * z - w * y)
    R[:, 2, 1] = 2 * (y * z + w * x)
    R[:, 2, 2] = 1 - 2 * (x * x + y * y)
    return R


def lift_from_frames(frames: np.ndarray, z0=None) -> np.ndarray:
    """Continuous quaternion lift of a frame path, sign-tracked node to node."""
    m = frames.shape[0]
    out = np.empty((m, 4))
    q = sphere.rotation_to_quat(frames[0])
    if z0 is not None:
        if np.dot(q, z0) < 0:
            q = -q
    elif q[0] < 0:
        q = -q
    out[0] = q
    for i in range(1, m):
        q = sphere.rotation_to_quat(frames[i])
        if np.dot(q, out[i - 1]) < 0:
            q = -q
        out[i] = q
    return out


# ------------------------------------------------------------------ #
# The curve record
# ------------------------------------------------------------------ #

@dataclasses.dataclass(frozen=True)
class LiftParity:
    """Endpoint sign of the frame lift: +1 iff z(T) = z(0)."""

    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("parity sign must be +1 or -1")


@dataclasses.dataclass(frozen=True)
class AdmissibleCurve:
    """Sampled admissible curve with frame, lift and curvature profile.

    All arrays live on the n+1 nodes of the uniform grid over [0, domain];
    controls are the n per-interval constants.  Instances are immutable.
    """

    bounds: CurvatureBounds
    controls: ControlPair
    domain: float
    lift: np.ndarray        # (n+1, 4) unit quaternions
    gamma: np.ndarray       # (n+1, 3)
    tangent: np.ndarray     # (n+1, 3)
    normal: np.ndarray      # (n+1, 3)
    speed: np.ndarray       # (n+1,)
    kappa: np.ndarray       # (n+1,)
    closed: bool

    @property
    def n(self) -> int:
        return self.controls.n

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.domain, self.n + 1)

    @property
    def dt(self) -> float:
        return self.domain / self.n

    @property
    def frames(self) -> np.ndarray:
        return np.stack([self.gamma, self.tangent, self.normal], axis=-1)

    @property
    def rho(self) -> np.ndarray:
        return np.arctan2(1.0, self.kappa)

    def interval_vk(self):
        """Per-interval (speed, kappa) recovered from the controls."""
        _, h_inv, _, hb_inv = control_transforms(self.bounds)
        v = h_inv(self.controls.v_hat)
        kap = hb_inv(self.controls.w_hat)
        return v, kap

    def closure_defect(self) -> float:
        return float(np.abs(self.frames[-1] - self.frames[0]).max())

    def eval_lift(self, ts) -> np.ndarray:
        """Exact lift at arbitrary parameters for piecewise-constant controls.

        Between nodes the lift is z_i * exp(delta * Lambda_i); for curves
        whose samples were constructed pointwise this is a local (one-step)
        approximation that never accumulates.
        """
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        v, kap = self.interval_vk()
        w = v * kap
        h = self.dt
        snap = 1e-12 * max(1.0, self.domain)
        idx = np.clip((ts / h).astype(int), 0, self.n - 1)
        delta = ts - idx * h
        near = np.clip(np.round(ts / h).astype(int), 0, self.n)
        out = np.empty((ts.size, 4))
        for j, (i, d, k) in enumerate(zip(idx, delta, near)):
            if abs(ts[j] - k * h) <= snap:
                out[j] = self.lift[k]       # stored node samples are exact
            else:
                step = sphere.quat_exp([0.5 * d * w[i], 0.0, 0.5 * d * v[i]])
                out[j] = sphere.quat_mul(self.lift[i], step)
        return out

    def rotated(self, rotation) -> "AdmissibleCurve":
        """Left action of a rotation; controls and curvature are unchanged."""
        R = np.asarray(rotation, dtype=float)
        q = sphere.rotation_to_quat(R)
        lift = np.array([sphere.quat_mul(q, z) for z in self.lift])
        return dataclasses.replace(
            self,
            lift=lift,
            gamma=self.gamma @ R.T,
            tangent=self.tangent @ R.T,
            normal=self.normal @ R.T,
        )

    def with_bounds(self, bounds: CurvatureBounds) -> "AdmissibleCurve":
        """Reinterpret the curve inside wider (or equal) curvature bounds."""
        v, kap = self.interval_vk()
        if not bounds.contains(kap) or not bounds.contains(self.kappa):
            raise CurvatureOutOfBounds("curve does not fit in the new bounds")
        h, _, hb, _ = control_transforms(bounds)
        controls = ControlPair(h(v), hb(kap))
        return dataclasses.replace(self, bounds=bounds, controls=controls)


def curve_from_node_data(bounds, lift, v_nodes, kappa_nodes, domain=1.0,
                         closed=None, tol: ToleranceProfile = DEFAULT_TOL,
                         require_closed=False, interval_vk=None) -> AdmissibleCurve:
    """Assemble a curve from exact node samples of the lift and controls.

    Per-interval controls default to averaged node values (pass exact ones
    via `interval_vk` when available); they are only used for in-between
    evaluation and re-integration, the stored node samples stay
    authoritative.
    """
    lift = np.asarray(lift, dtype=float)
    v_nodes = np.asarray(v_nodes, dtype=float)
    kappa_nodes = np.asarray(kappa_nodes, dtype=float)
    if np.any(v_nodes <= 0):
        raise NonPositiveSpeed("node speeds must be positive")
    if not bounds.contains(kappa_nodes):
        raise CurvatureOutOfBounds("node curvature escapes the open bounds")
    if interval_vk is None:
        v_int = 0.5 * (v_nodes[:-1] + v_nodes[1:])
        k_int = 0.5 * (kappa_nodes[:-1] + kappa_nodes[1:])
    else:
        v_int, k_int = (np.asarray(a, dtype=float) for a in interval_vk)
    h, _, hb, _ = control_transforms(bounds)
    controls = ControlPair(h(v_int), hb(k_int))
    frames = frames_from_lift(lift)
    curve = AdmissibleCurve(
        bounds=bounds, controls=controls, domain=float(domain), lift=lift,
        gamma=frames[:, :, 0], tangent=frames[:, :, 1], normal=frames[:, :, 2],
        speed=v_nodes, kappa=kappa_nodes, closed=False)
    defect = curve.closure_defect()
    if closed is None:
        closed = defect <= tol.closure
    if require_closed and not closed:
        raise NotClosed(f"frame closure defect {defect:.3e} exceeds {tol.closure:.1e}")
    return dataclasses.replace(curve, closed=bool(closed))


def integrate_curve(controls: ControlPair, bounds: CurvatureBounds,
                    q0=None, domain: float = 1.0,
                    tol: ToleranceProfile = DEFAULT_TOL,
                    require_closed: bool = False) -> AdmissibleCurve:
    """Integrate the lifted frame equation for piecewise-constant controls.

    Each grid interval contributes the exact exponential of
    (dt/2)(w i + v k) in S^3, so the result has no renormalization drift
    and analytic closed curves close to roundoff.
    """
    _, h_inv, _, hb_inv = control_transforms(bounds)
    v = h_inv(controls.v_hat)
    kap = hb_inv(controls.w_hat)
    if np.any(v <= 0):  # h_inv > 0 by construction; guard anyway
        raise NonPositiveSpeed("integrated speed must be positive")
    if not bounds.contains(kap):
        raise CurvatureOutOfBounds("controls map outside the open bounds")
    w = v * kap
    dt = domain / controls.n
    if q0 is None:
        z0 = sphere.QUAT_ONE
    else:
        z0 = sphere.rotation_to_quat(np.asarray(q0, dtype=float))
    lift = _chain_quats(z0, _step_quats(v, w, dt))
    v_nodes = np.append(v, v[-1])
    k_nodes = np.append(kap, kap[-1])
    frames = frames_from_lift(lift)
    curve = AdmissibleCurve(
        bounds=bounds, controls=controls, domain=float(domain), lift=lift,
        gamma=frames[:, :, 0], tangent=frames[:, :, 1], normal=frames[:, :, 2],
        speed=v_nodes, kappa=k_nodes, closed=False)
    defect = curve.closure_defect()
    closed = defect <= tol.closure
    if require_closed and not closed:
        raise NotClosed(f"frame closure defect {defect:.3e} exceeds {tol.closure:.1e}")
    return dataclasses.replace(curve, closed=closed)


def make_circle(rho: float, k: int, bounds: CurvatureBounds,
                n: int | None = None,
                tol: ToleranceProfile = DEFAULT_TOL) -> AdmissibleCurve:
    """The circle of radius of curvature rho traversed k times.

    Starts at e1 in direction e2 with frame I; constant curvature cot(rho),
    speed 2 pi k sin(rho), lift parity (-1)^k.
    """
    if k < 1:
        raise ValueError("need a positive number of traversals")
    if not bounds.rho2 < rho < bounds.rho1:
        raise RadiusOutOfBounds(
            f"rho={rho:.6f} outside ({bounds.rho2:.6f}, {bounds.rho1:.6f})")
    n = n or tol.default_n
    h, _, hb, _ = control_transforms(bounds)
    v = 2.0 * math.pi * k * math.sin(rho)
    controls = ControlPair(np.full(n, h(v)), np.full(n, float(hb(cot(rho)))))
    return integrate_curve(controls, bounds, tol=tol, require_closed=True)


def total_curvature(curve: AdmissibleCurve) -> float:
    """Integral of K |gamma'| with K = sqrt(1 + kappa^2)."""
    v, kap = curve.interval_vk()
    return float(np.sum(np.sqrt(1.0 + kap * kap) * v) * curve.dt)


def _resample(curve: AdmissibleCurve, cumulative: np.ndarray, rate: np.ndarray,
              n_out: int | None, new_speed, tol: ToleranceProfile):
    """Resample the curve so that `cumulative` becomes the uniform parameter.

    `cumulative` is the node profile of the new parameter (piecewise linear
    with per-interval `rate`), `new_speed(kappa)` gives the node speed of the
    reparametrized curve.  Node lifts are evaluated by exact partial steps,
    so closure is preserved to roundoff.
    """
    n_out = n_out or curve.n
    total = float(cumulative[-1])
    u = np.linspace(0.0, total, n_out + 1)
    idx = np.minimum(np.searchsorted(cumulative, u, side="right") - 1, curve.n - 1)
    idx[0] = 0
    t_src = curve.grid[idx] + (u - cumulative[idx]) / rate[idx]
    t_src = np.clip(t_src, 0.0, curve.domain)
    t_src[-1] = curve.domain
    lift = curve.eval_lift(t_src)
    _, kap_int = curve.interval_vk()
    kap_nodes = kap_int[idx]
    v_nodes = np.asarray(new_speed(kap_nodes), dtype=float) + np.zeros(n_out + 1)
    # per-interval values from the interval midpoints keep K*v consistent
    umid = 0.5 * (u[:-1] + u[1:])
    imid = np.minimum(np.searchsorted(cumulative, umid, side="right") - 1,
                      curve.n - 1)
    k_mid = kap_int[imid]
    v_mid = np.asarray(new_speed(k_mid), dtype=float) + np.zeros(n_out)
    return curve_from_node_data(curve.bounds, lift, v_nodes, kap_nodes,
                                domain=total, closed=curve.closed, tol=tol,
                                interval_vk=(v_mid, k_mid))


def reparametrize_by_curvature(curve: AdmissibleCurve, n_out: int | None = None,
                               tol: ToleranceProfile = DEFAULT_TOL) -> AdmissibleCurve:
    """Parametrize so that accumulated total curvature equals the parameter.

    The new domain is [0, tot(curve)] and the lifted frame moves at constant
    speed 1/2; node speed becomes sin(rho).
    """
    v, kap = curve.interval_vk()
    rate = np.sqrt(1.0 + kap * kap) * v
    cumulative = np.concatenate([[0.0], np.cumsum(rate * curve.dt)])
    return _resample(curve, cumulative, rate, n_out,
                     lambda k: 1.0 / np.sqrt(1.0 + k * k), tol)


def reparametrize_arclength(curve: AdmissibleCurve, n_out: int | None = None,
                            tol: ToleranceProfile = DEFAULT_TOL) -> AdmissibleCurve:
    """Constant-speed reparametrization over [0, 1]."""
    v, _ = curve.interval_vk()
    cumulative = np.concatenate([[0.0], np.cumsum(v * curve.dt)])
    length = float(cumulative[-1])
    out = _resample(curve, cumulative, v, n_out, lambda k: length + 0.0 * k, tol)
    # relabel the domain back to [0, 1] (pure rescaling of the parameter)
    return dataclasses.replace(out, domain=1.0)


def lift_parity(curve: AdmissibleCurve) -> LiftParity:
    """Endpoint sign of the lift; a homotopy invariant for closed curves."""
    if not curve.closed:
        raise NotClosed("lift parity requires a closed curve")
    dot = float(np.dot(curve.lift[-1], curve.lift[0]))
    if abs(dot) < 0.9:
        raise AmbiguousParity(f"|<z(1), z(0)>| = {abs(dot):.3f} < 0.9")
    return LiftParity(1 if dot > 0 else -1)


# ------------------------------------------------------------------ #
# JSON and raw-point interchange
# ------------------------------------------------------------------ #

def _bound_to_json(x: float):
    if math.isinf(x):
        return "-inf" if x < 0 else "+inf"
    return x


def _bound_from_json(x) -> float:
    if isinstance(x, str):
        if x in ("-inf", "-Infinity"):
            return -math.inf
        if x in ("+inf", "inf", "Infinity"):
            return math.inf
        raise ValueError(f"bad curvature bound: {x!r}")
    return float(x)


def curve_to_json(curve: AdmissibleCurve) -> dict:
    """Serializable control form; a non-unit domain is relabeled to [0, 1]."""
    v, kap = curve.interval_vk()
    if curve.domain != 1.0:
        h, _, hb, _ = control_transforms(curve.bounds)
        v_hat = h(v * curve.domain)
        w_hat = hb(kap)
    else:
        v_hat, w_hat = curve.controls.v_hat, curve.controls.w_hat
    out = {
        "kappa1": _bound_to_json(curve.bounds.kappa1),
        "kappa2": _bound_to_json(curve.bounds.kappa2),
        "n": curve.n,
        "v_hat": [float(x) for x in v_hat],
        "w_hat": [float(x) for x in w_hat],
    }
    q0 = curve.frames[0]
    if np.abs(q0 - np.eye(3)).max() > 1e-12:
        out["q0"] = [float(x) for x in q0.reshape(-1)]
    return out


def curve_from_json(doc: dict, tol: ToleranceProfile = DEFAULT_TOL) -> AdmissibleCurve:
    """Parse either the control schema or the raw {"gamma": [...]} form."""
    if "gamma" in doc:
        bounds = CurvatureBounds(_bound_from_json(doc.get("kappa1", "-inf")),
                                 _bound_from_json(doc.get("kappa2", "+inf")))
        return curve_from_points(np.asarray(doc["gamma"], dtype=float),
                                 bounds, n=doc.get("n"), tol=tol)
    bounds = CurvatureBounds(_bound_from_json(doc["kappa1"]),
                             _bound_from_json(doc["kappa2"]))
    controls = ControlPair(np.asarray(doc["v_hat"], dtype=float),
                           np.asarray(doc["w_hat"], dtype=float))
    q0 = doc.get("q0")
    q0 = np.asarray(q0, dtype=float).reshape(3, 3) if q0 is not None else None
    return integrate_curve(controls, bounds, q0=q0, tol=tol)


def load_curve(path, tol: ToleranceProfile = DEFAULT_TOL) -> AdmissibleCurve:
    with open(path) as fh:
        return curve_from_json(json.load(fh), tol)


def _slerp(p, q, f):
    ang = math.acos(max(-1.0, min(1.0, float(np.dot(p, q)))))
    if ang < 1e-12:
        return p
    return (math.sin((1 - f) * ang) * p + math.sin(f * ang) * q) / math.sin(ang)


def curve_from_points(points, bounds: CurvatureBounds, n: int | None = None,
                      tol: ToleranceProfile = DEFAULT_TOL,
                      close: bool = True) -> AdmissibleCurve:
    """Fit an admissible curve through raw sphere points.

    A periodic cubic spline through the points is resampled uniformly by
    arc length; curvature comes from discrete frame differences and is
    clamped strictly inside the bounds (within a small slack) or the
    import is rejected.
    """
    from scipy.interpolate import CubicSpline

    pts = np.asarray(points, dtype=float)
    pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    if close and np.linalg.norm(pts[0] - pts[-1]) > 1e-12:
        pts = np.vstack([pts, pts[0]])
    elif close:
        pts = pts.copy()
        pts[-1] = pts[0]
    n = n or tol.default_n

    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    spline = CubicSpline(cum, pts, axis=0,
                         bc_type="periodic" if close else "not-a-knot")

    # uniform arc-length positions via a dense pass over the spline
    dense_u = np.linspace(0.0, cum[-1], 8 * n + 1)
    dense = spline(dense_u)
    dense /= np.linalg.norm(dense, axis=1, keepdims=True)
    dcum = np.concatenate([[0.0], np.cumsum(
        np.linalg.norm(np.diff(dense, axis=0), axis=1))])
    u = np.interp(np.linspace(0.0, dcum[-1], n + 1), dcum, dense_u)

    res = spline(u)
    res /= np.linalg.norm(res, axis=1, keepdims=True)
    tan = spline(u, 1)
    tan -= res * np.sum(tan * res, axis=1, keepdims=True)
    tan /= np.linalg.norm(tan, axis=1, keepdims=True)
    if close:
        res[-1] = res[0]
        tan[-1] = tan[0]
    nor = np.cross(res, tan)
    frames = np.stack([res, tan, nor], axis=-1)
    lift = lift_from_frames(frames)

    # controls from one-step frame logarithms
    v_int = np.empty(n)
    k_int = np.empty(n)
    dt = 1.0 / n
    for i in range(n):
        rel = sphere.quat_mul(sphere.quat_conj(lift[i]), lift[i + 1])
        if rel[0] < 0:
            rel = -rel
        vec = rel[1:]
        norm = np.linalg.norm(vec)
        ang = 2.0 * math.atan2(norm, rel[0])
        omega = (ang / norm) * vec if norm > 1e-15 else np.zeros(3)
        v_int[i] = omega[2] / dt
        k_int[i] = omega[0] / omega[2] if abs(omega[2]) > 1e-15 else 0.0
    if np.any(v_int <= 0):
        raise NonPositiveSpeed("imported points double back on themselves")

    slack = tol.import_kappa_slack
    lo, hi = bounds.kappa1, bounds.kappa2
    margin = 1e-9 if math.isfinite(hi - lo) else 1e-9
    if np.any(k_int <= lo - slack) or np.any(k_int >= hi + slack):
        raise CurvatureOutOfBounds("imported curvature escapes the bounds")
    k_int = np.clip(k_int,
                    lo + margin if math.isfinite(lo) else -np.inf,
                    hi - margin if math.isfinite(hi) else np.inf)
    k_nodes = np.append(k_int, k_int[0] if close else k_int[-1])
    v_nodes = np.append(v_int, v_int[0] if close else v_int[-1])
    return curve_from_node_data(bounds, lift, v_nodes, k_nodes, domain=1.0,
                                closed=close, tol=tol)
