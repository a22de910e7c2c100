"""Grafting: inserting circle arcs while conserving the endpoint frame.

All grafts operate on curves parametrized by total curvature, where the
lifted logarithmic derivative has constant norm 1/2 and inserting an arc of
radius rho at parameter t multiplies the tail of the lift by the constant
quaternion exp(sigma chi / 2), chi the center of the inserted circle.
Because the inserted rotations are computed exactly, endpoint frames are
conserved to the accuracy of the antipodal/simplex witness.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import sphere
from .classify import antipodal_fiber_witness, classification_cloud, condensed_status, rotation_number_nondiffuse
from .curves import (
    AdmissibleCurve,
    cot,
    curve_from_node_data,
    reparametrize_by_curvature,
    total_curvature,
)
from .errors import (
    AntipodalDefect,
    BoundViolation,
    BudgetExceeded,
    ContinuationDiverged,
    DegenerateSimplex,
    DomainError,
    NotDiffuse,
    NotNonCondensed,
)
from .tolerances import DEFAULT_TOL, ToleranceProfile


# ------------------------------------------------------------------ #
# Grafting functions (finite insertion sets)
# ------------------------------------------------------------------ #

@dataclasses.dataclass(frozen=True)
class GraftingFunction:
    """phi(t) = t + sum_{x < t} delta_plus(x) + sum_{x <= t} delta_minus(x)."""

    s0: float
    x_plus: np.ndarray
    d_plus: np.ndarray
    x_minus: np.ndarray
    d_minus: np.ndarray

    def __post_init__(self):
        for name in ("x_plus", "d_plus", "x_minus", "d_minus"):
            object.__setattr__(self, name,
                               np.asarray(getattr(self, name), dtype=float))
        if np.any(self.d_plus <= 0) or np.any(self.d_minus <= 0):
            raise ValueError("insertion weights must be positive")
        if np.any(np.diff(self.x_plus) <= 0) or np.any(np.diff(self.x_minus) <= 0):
            raise ValueError("insertion points must be strictly sorted")

    @property
    def s1(self) -> float:
        return self.s0 + float(self.d_plus.sum() + self.d_minus.sum())

    @classmethod
    def identity(cls, s0: float) -> "GraftingFunction":
        return cls(s0, np.empty(0), np.empty(0), np.empty(0), np.empty(0))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tt = np.atleast_1d(t)
        plus = (tt[:, None] > self.x_plus[None, :]) @ self.d_plus \
            if self.x_plus.size else np.zeros_like(tt)
        minus = (tt[:, None] >= self.x_minus[None, :]) @ self.d_minus \
            if self.x_minus.size else np.zeros_like(tt)
        out = tt + plus + minus
        return float(out[0]) if scalar else out

    def right(self, t: float) -> float:
        return t + float(self.d_plus[self.x_plus <= t].sum()
                         + self.d_minus[self.x_minus <= t].sum())

    def left(self, t: float) -> float:
        return t + float(self.d_plus[self.x_plus < t].sum()
                         + self.d_minus[self.x_minus < t].sum())

    def preimage(self, y: float) -> float:
        """Parameter t with phi reaching y; lands on x if y is in a jump."""
        events = sorted([(x, d, 1) for x, d in zip(self.x_plus, self.d_plus)]
                        + [(x, d, -1) for x, d in zip(self.x_minus, self.d_minus)])
        offset = 0.0
        for x, d, _ in events:
            lo = x + offset          # value of phi just below / at the jump
            if y <= lo:
                return y - offset
            if y <= lo + d:
                return x
            offset += d
        return y - offset


def compose_grafting(phi0: GraftingFunction,
                     phi1: GraftingFunction) -> GraftingFunction:
    """phi1 after phi0; insertion sets merge and weights only grow."""
    if abs(phi0.s1 - phi1.s0) > 1e-9:
        raise DomainError("codomain of phi0 must equal domain of phi1")

    candidates = set(float(x) for x in phi0.x_plus)
    candidates |= set(float(x) for x in phi0.x_minus)
    for y in list(phi1.x_plus) + list(phi1.x_minus):
        candidates.add(float(phi0.preimage(float(y))))

    xp, dp, xm, dm = [], [], [], []
    for x in sorted(candidates):
        at = float(phi1(phi0(x)))
        d_minus = at - phi1.left(phi0.left(x))
        d_plus = phi1.right(phi0.right(x)) - at
        if d_minus > 1e-15:
            xm.append(x)
            dm.append(d_minus)
        if d_plus > 1e-15:
            xp.append(x)
            dp.append(d_plus)
    return GraftingFunction(phi0.s0, np.array(xp), np.array(dp),
                            np.array(xm), np.array(dm))


# ------------------------------------------------------------------ #
# Arc insertion on curvature-parametrized curves
# ------------------------------------------------------------------ #

@dataclasses.dataclass(frozen=True)
class ArcInsertion:
    t: float        # insertion parameter on the base curve (grid node)
    rho: float      # radius of the inserted circle arc, in (0, rho0)
    sigma: float    # inserted length in total-curvature units


@dataclasses.dataclass(frozen=True)
class GraftRecord:
    base: AdmissibleCurve
    result: AdmissibleCurve
    phi: GraftingFunction
    arcs: tuple
    frame_defect: float

    def result_vk_at(self, u: float):
        """(speed, kappa) of the result at parameter u, from the exact
        splice structure rather than the resampled grid."""
        offset = 0.0
        for arc in self.arcs:
            start = self.phi(arc.t)
            if start <= u < start + arc.sigma:
                return math.sin(arc.rho), cot(arc.rho)
            if u >= start + arc.sigma:
                offset += arc.sigma
        t = min(max(u - offset, 0.0), self.base.domain)
        v, k = self.base.interval_vk()
        i = min(int(t / self.base.dt), self.base.n - 1)
        return float(v[i]), float(k[i])


def ensure_curvature_param(curve: AdmissibleCurve,
                           tol: ToleranceProfile = DEFAULT_TOL) -> AdmissibleCurve:
    """Reparametrize by curvature unless the curve already is."""
    dev = np.abs(curve.speed - np.sin(curve.rho)).max()
    if dev < 1e-9 and abs(curve.domain - total_curvature(curve)) < 1e-6:
        return curve
    return reparametrize_by_curvature(curve, tol=tol)


def _splice_arcs(base: AdmissibleCurve, insertions, tol: ToleranceProfile):
    """Insert constant-curvature arcs, evaluating the new lift exactly.

    Returns (curve, frame_defect) where frame_defect is the deviation of the
    final lift from the original one (zero when the inserted rotations
    multiply to the identity).
    """
    ins = sorted(insertions, key=lambda a: a.t)
    if any(not 0.0 < a.t < base.domain for a in ins):
        raise DomainError("insertions must be interior")
    T = base.domain
    total_extra = sum(a.sigma for a in ins)

    # prefix quaternions exp(sigma chi / 2) accumulated left to right
    prefixes = [sphere.QUAT_ONE.copy()]
    arc_starts = []
    for a in ins:
        node = int(round(a.t / base.dt))
        z_t = base.lift[node]
        lam = np.array([math.cos(a.rho), 0.0, math.sin(a.rho)])
        rot = sphere.quat_mul(
            sphere.quat_mul(z_t, sphere.quat_exp(0.5 * a.sigma * lam)),
            sphere.quat_conj(z_t))
        arc_starts.append(sphere.quat_mul(prefixes[-1], z_t))
        prefixes.append(sphere.quat_normalize(sphere.quat_mul(prefixes[-1], rot)))

    # pieces: (u_start, u_end, kind, payload)
    pieces = []
    cursor = 0.0
    src_prev = 0.0
    for idx, a in enumerate(ins):
        pieces.append(("copy", cursor, cursor + (a.t - src_prev),
                       src_prev, prefixes[idx]))
        cursor += a.t - src_prev
        pieces.append(("arc", cursor, cursor + a.sigma, idx, None))
        cursor += a.sigma
        src_prev = a.t
    pieces.append(("copy", cursor, cursor + (T - src_prev), src_prev,
                   prefixes[-1]))

    new_T = T + total_extra
    n_out = max(base.n, int(math.ceil(new_T / base.dt)))
    u = np.linspace(0.0, new_T, n_out + 1)
    lift = np.empty((n_out + 1, 4))
    v_nodes = np.empty(n_out + 1)
    k_nodes = np.empty(n_out + 1)
    v_b, k_b = base.interval_vk()

    def piece_at(uu, start):
        pi = start
        while pi + 1 < len(pieces) and uu > pieces[pi][2] + 1e-15:
            pi += 1
        return pi

    pi = 0
    for j, uj in enumerate(u):
        pi = piece_at(uj, pi)
        kind, lo, hi, payload, pref = pieces[pi]
        if kind == "copy":
            t_src = min(max(payload + (uj - lo), 0.0), T)
            lift[j] = sphere.quat_mul(pref, base.eval_lift(t_src)[0])
            node = min(int(round(t_src / base.dt)), base.n)
            v_nodes[j] = base.speed[node]
            k_nodes[j] = base.kappa[node]
        else:
            a = ins[payload]
            lam = np.array([math.cos(a.rho), 0.0, math.sin(a.rho)])
            step = sphere.quat_exp(0.5 * (uj - lo) * lam)
            lift[j] = sphere.quat_mul(arc_starts[payload], step)
            v_nodes[j] = math.sin(a.rho)
            k_nodes[j] = cot(a.rho)
        lift[j] = sphere.quat_normalize(lift[j])

    # interval controls from the piece at each interval midpoint
    v_int = np.empty(n_out)
    k_int = np.empty(n_out)
    pi = 0
    for j in range(n_out):
        um = 0.5 * (u[j] + u[j + 1])
        pi = piece_at(um, pi)
        kind, lo, hi, payload, _ = pieces[pi]
        if kind == "copy":
            t_src = min(max(payload + (um - lo), 0.0), T)
            node = min(int(t_src / base.dt), base.n - 1)
            v_int[j], k_int[j] = v_b[node], k_b[node]
        else:
            a = ins[payload]
            v_int[j], k_int[j] = math.sin(a.rho), cot(a.rho)

    defect = float(np.linalg.norm(prefixes[-1] - sphere.QUAT_ONE))
    out = curve_from_node_data(base.bounds, lift, v_nodes, k_nodes,
                               domain=new_T, closed=base.closed, tol=tol,
                               interval_vk=(v_int, k_int))
    return out, defect


def _record(base, result, ins, defect):
    xs = np.array([a.t for a in ins])
    ds = np.array([a.sigma for a in ins])
    order = np.argsort(xs)
    phi = GraftingFunction(base.domain, xs[order], ds[order],
                           np.empty(0), np.empty(0))
    return GraftRecord(base=base, result=result, phi=phi,
                       arcs=tuple(ins[i] for i in order),
                       frame_defect=defect)


# ------------------------------------------------------------------ #
# Grafting circles at antipodal caustic points (diffuse curves)
# ------------------------------------------------------------------ #

def graft_antipodal_circles(curve: AdmissibleCurve, s: float,
                            tol: ToleranceProfile = DEFAULT_TOL):
    """Insert two arcs of length s at antipodal caustic points.

    The two inserted rotations exp(s chi/2) exp(-s chi/2) cancel exactly, so
    the endpoint lifted frame is conserved and the total curvature grows by
    exactly 2 s.  Requires a diffuse curve in (kappa0, +inf) form.
    """
    if s < 0:
        raise DomainError("graft length must be nonnegative")
    base = ensure_curvature_param(curve, tol)
    if s == 0.0:
        return base, _record(base, base, (), 0.0)

    margin = 1e-9
    witness = antipodal_fiber_witness(base, lo=margin, hi_margin=margin, tol=tol)
    if witness is None:
        raise NotDiffuse("no antipodal caustic witness at this resolution")
    (i1, th1), (i2, th2), _ = witness
    if i1 == i2:
        raise NotDiffuse("witness pair degenerated to a single fiber")
    chi1 = (math.cos(th1) * base.gamma[i1] + math.sin(th1) * base.normal[i1])
    chi2 = (math.cos(th2) * base.gamma[i2] + math.sin(th2) * base.normal[i2])
    defect_w = float(np.linalg.norm(chi1 + chi2))
    if defect_w > tol.antipodal_chord:
        raise AntipodalDefect(f"witness defect {defect_w:.3e}")

    ins = (ArcInsertion(t=base.grid[i1], rho=th1, sigma=s),
           ArcInsertion(t=base.grid[i2], rho=th2, sigma=s))
    result, defect = _splice_arcs(base, ins, tol)
    return result, _record(base, result, ins, defect)


# ------------------------------------------------------------------ #
# Simplex grafting (non-condensed curves)
# ------------------------------------------------------------------ #

def _caustic_samples_with_tags(curve: AdmissibleCurve, tol: ToleranceProfile):
    """Interior caustic-band samples tagged by (node, theta)."""
    from .classify import _classify_stride

    rho0 = curve.bounds.rho1
    stride = _classify_stride(curve, tol)
    nodes = np.arange(0, curve.n, stride)
    # keep the inserted radii strictly interior but sample essentially the
    # whole fiber: the extreme points of the image sit on its edges
    pad = 1e-6 * rho0
    thetas = np.linspace(pad, rho0 - pad, tol.band_theta_nodes // 2 + 1)
    pts = (np.cos(thetas)[None, :, None] * curve.gamma[nodes, None, :]
           + np.sin(thetas)[None, :, None] * curve.normal[nodes, None, :])
    tags = [(int(i), float(th)) for i in nodes for th in thetas]
    return pts.reshape(-1, 3), tags


def _exp_chain(sigmas, chis_half):
    """Product of exp(sigma_i chi_i / 2) and its partial derivatives."""
    qs = [sphere.quat_exp(s * c) for s, c in zip(sigmas, chis_half)]
    pre = [sphere.QUAT_ONE.copy()]
    for q in qs:
        pre.append(sphere.quat_mul(pre[-1], q))
    post = [sphere.QUAT_ONE.copy()]
    for q in reversed(qs):
        post.insert(0, sphere.quat_mul(q, post[0]))
    G = pre[-1]
    grads = []
    for i, c in enumerate(chis_half):
        dq = sphere.quat_mul(np.concatenate(([0.0], c)), qs[i])
        grads.append(sphere.quat_mul(sphere.quat_mul(pre[i], dq), post[i + 1]))
    return G, np.array(grads)


def graft_simplex_step(curve: AdmissibleCurve, s: float,
                       tol: ToleranceProfile = DEFAULT_TOL):
    """One small graft on a non-condensed curve, conserving the frame.

    Picks four caustic points in general position whose convex hull
    contains the origin, then solves for arc lengths sigma_i >= 0 with
    sum sigma_i = s such that the product of the inserted rotations is the
    identity (Newton on S^3).  Total curvature grows by exactly s.
    """
    if s < 0:
        raise DomainError("graft length must be nonnegative")
    if s > tol.graft_step + 1e-12:
        raise DomainError(f"step {s} exceeds the graft increment cap "
                          f"{tol.graft_step}; raise it via the tolerance profile")
    base = ensure_curvature_param(curve, tol)
    if s == 0.0:
        return base, _record(base, base, (), 0.0)

    cloud = classification_cloud(base, tol)
    if not sphere.origin_in_hull_interior(cloud, tol):
        raise NotNonCondensed("caustic cloud fits in a closed hemisphere")

    pts, tags = _caustic_samples_with_tags(base, tol)
    last_error = DegenerateSimplex("no four-node simplex containing the origin")
    for attempt in range(12):
        cand = sphere.containing_simplex(
            pts, np.zeros(3), tol.replace(seed=tol.seed + 97 * attempt))
        nodes = [tags[i][0] for i in cand.indices]
        if cand.indices.size != 4 or len(set(nodes)) != 4:
            continue
        chis = pts[cand.indices]
        volume = abs(np.linalg.det(chis[1:] - chis[0]))
        if volume < 1e-3:                  # nearly coplanar: poor jacobian
            continue
        order = np.argsort([tags[i][0] for i in cand.indices])
        idx = cand.indices[order]
        weights = cand.weights[order]
        chis = pts[idx]
        arcs_nt = [tags[i] for i in idx]
        try:
            sigmas = _continuation(chis, weights, s, tol)
        except (ContinuationDiverged, DegenerateSimplex) as exc:
            last_error = exc
            continue
        ins = tuple(ArcInsertion(t=base.grid[nt[0]], rho=nt[1], sigma=float(sg))
                    for nt, sg in zip(arcs_nt, sigmas) if sg > 0.0)
        result, defect = _splice_arcs(base, ins, tol)
        return result, _record(base, result, ins, defect)
    raise last_error


def _continuation(chis, weights, s, tol: ToleranceProfile) -> np.ndarray:
    """Arc lengths with sum s whose inserted rotations multiply to 1."""
    sigmas = s * weights / weights.sum()
    chis_half = 0.5 * chis
    for _ in range(tol.continuation_max_iter):
        G, grads = _exp_chain(sigmas, chis_half)
        res = np.concatenate([G[1:], [sigmas.sum() - s]])
        if np.linalg.norm(G - sphere.QUAT_ONE) <= tol.continuation_tol \
                and abs(res[-1]) <= tol.continuation_tol:
            if np.any(sigmas < -1e-9):
                raise ContinuationDiverged("negative arc length; bisect s")
            return np.clip(sigmas, 0.0, None)
        jac = np.vstack([grads[:, 1:].T, np.ones((1, 4))])
        try:
            delta = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError as exc:
            raise DegenerateSimplex(f"singular continuation jacobian: {exc}")
        if np.linalg.norm(delta) > 10.0 * (s + 1.0):
            raise ContinuationDiverged("newton step exploded; bisect s")
        sigmas = sigmas + delta
    raise ContinuationDiverged("no convergence within the iteration cap")


def graft_until_resolved(curve: AdmissibleCurve, step: float | None = None,
                         budget: float = 10.0,
                         tol: ToleranceProfile = DEFAULT_TOL):
    """Graft repeatedly until the curve is condensed or diffuse.

    Stops as soon as the condensed/diffuse status resolves; aborts with
    BoundViolation if the accumulated total curvature passes the
    non-diffuse bound 4 pi nu / cos^2(rho0/2), which cannot happen for a
    consistent non-diffuse chain, and with BudgetExceeded if the inserted
    length passes the budget.
    """
    step = step or tol.graft_step
    cur = ensure_curvature_param(curve, tol)
    rho0 = cur.bounds.rho1
    spent = 0.0
    history = [cur]
    from .errors import FiberCountMismatch, NoGapFound

    while True:
        status = condensed_status(cur, tol)
        if status.tag != "Neither":
            return cur, status, history
        if spent >= budget:
            raise BudgetExceeded(f"inserted length {spent:.3f} over budget")
        try:
            nu = rotation_number_nondiffuse(cur, status, tol)
        except (NoGapFound, FiberCountMismatch):
            nu = None          # resolution failure; cannot certify the bound
        if nu is not None:
            bound = 4.0 * math.pi * nu / math.cos(rho0 / 2.0) ** 2
            if total_curvature(cur) > bound + 1e-6:
                raise BoundViolation(
                    f"tot {total_curvature(cur):.4f} exceeds the non-diffuse "
                    f"bound {bound:.4f} (nu={nu})")
        attempt = min(step, budget - spent)
        while True:
            try:
                cur, _ = graft_simplex_step(cur, attempt, tol)
                break
            except ContinuationDiverged:
                attempt *= 0.5
                if attempt < 1e-4:
                    raise
        spent += attempt
        history.append(cur)
