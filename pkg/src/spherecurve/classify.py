"""Condensed/diffuse status, rotation numbers and component classification.

Everything here works on curves reduced to lower-bound-only form: a curve
with curvature in (kappa1, kappa2) is first translated by rho2, which is a
homeomorphism onto the space with curvature in (kappa0, +inf),
kappa0 = cot(rho1 - rho2).  The label of the reduced curve is the label of
the original.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy.spatial import cKDTree

from . import sphere
from .bands import caustic_band, caustic_curve, translate_curve
from .curves import (
    AdmissibleCurve,
    CurvatureBounds,
    LiftParity,
    lift_parity,
)
from .errors import DomainError, FiberCountMismatch, NoGapFound, WindingResidual
from .tolerances import DEFAULT_TOL, ToleranceProfile


def component_count(bounds: CurvatureBounds) -> int:
    """n = floor(pi / (rho1 - rho2)) + 1, with exact snapping at pi/m."""
    x = math.pi / bounds.width
    if abs(x - round(x)) < 1e-12:
        x = float(round(x))
    return int(math.floor(x)) + 1


def reduce_to_k0(curve: AdmissibleCurve,
                 tol: ToleranceProfile = DEFAULT_TOL):
    """Translate by rho2 into (kappa0, +inf) form; returns (curve, kappa0)."""
    rho2 = curve.bounds.rho2
    kappa0 = curve.bounds.reduced_kappa0()
    if rho2 == 0.0:
        return curve, curve.bounds.kappa1
    return translate_curve(curve, rho2, tol), kappa0


# ------------------------------------------------------------------ #
# Point clouds and condensed / diffuse status
# ------------------------------------------------------------------ #

def _classify_stride(curve: AdmissibleCurve, tol: ToleranceProfile) -> int:
    """Decimation stride: at least eight samples per winding of the curve."""
    from .curves import total_curvature
    loops = total_curvature(curve) / (2.0 * math.pi)
    target = max(tol.classify_t_nodes, int(8.0 * loops))
    return max(1, curve.n // target)


def classification_cloud(curve: AdmissibleCurve,
                         tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Caustic-band image sampled for the hemisphere and antipodal tests.

    The boundary of the image lies on the curve itself and on the outer
    translate C(t, rho0); both are kept at full t-resolution, the band
    interior is decimated.
    """
    stride = _classify_stride(curve, tol)
    band = caustic_band(curve, m=tol.band_theta_nodes // 2 + 1,
                        t_stride=stride, tol=tol)
    rho0 = curve.bounds.rho1
    outer = math.cos(rho0) * curve.gamma + math.sin(rho0) * curve.normal
    chi = caustic_curve(curve).chi
    return np.vstack([band.points, curve.gamma, outer, chi])


def _cloud_spacing(curve: AdmissibleCurve, tol: ToleranceProfile) -> float:
    # the cloud keeps the boundary curves at full resolution, so membership
    # tests are limited by the node chords and the theta grid only
    seg = np.linalg.norm(np.diff(curve.gamma, axis=0), axis=1)
    dtheta = curve.bounds.rho1 / max(tol.band_theta_nodes // 2, 1)
    return max(float(seg.max()), dtheta)


def antipodal_fiber_witness(curve: AdmissibleCurve, lo: float = 0.0,
                            hi_margin: float = 0.0,
                            tol: ToleranceProfile = DEFAULT_TOL):
    """Exact antipodal pair of caustic-band points, or None.

    Fibers of the band over two parameters are arcs of great circles; two
    great circles intersect in an antipodal pair of points, computed from
    the cross product of the tangents.  The search scans node pairs and
    returns ((i, theta_i), (j, theta_j), defect) with
    C(t_i, theta_i) = -C(t_j, theta_j) exactly (defect ~ roundoff) and both
    angles in [lo, rho0 - hi_margin].

    Node pairs with near-parallel tangents share the same great circle; for
    those the fiber arcs are intersected directly.
    """
    rho0 = curve.bounds.rho1
    hi = rho0 - hi_margin
    stride = _classify_stride(curve, tol)
    idx = np.arange(0, curve.n, stride)
    g = curve.gamma[idx]
    tg = curve.tangent[idx]
    nr = curve.normal[idx]
    m = idx.size

    ii, jj = np.triu_indices(m, k=1)
    u = np.cross(tg[ii], tg[jj])
    norms = np.linalg.norm(u, axis=1)
    ok = norms > 1e-8
    best = None

    if np.any(ok):
        uu = u[ok] / norms[ok, None]
        i_ok, j_ok = ii[ok], jj[ok]
        for sign in (1.0, -1.0):
            w = sign * uu
            th_i = np.arctan2(np.einsum("ij,ij->i", w, nr[i_ok]),
                              np.einsum("ij,ij->i", w, g[i_ok]))
            th_j = np.arctan2(np.einsum("ij,ij->i", -w, nr[j_ok]),
                              np.einsum("ij,ij->i", -w, g[j_ok]))
            feas = (th_i >= lo) & (th_i <= hi) & (th_j >= lo) & (th_j <= hi)
            if np.any(feas):
                margin = np.minimum(np.minimum(th_i - lo, hi - th_i),
                                    np.minimum(th_j - lo, hi - th_j))
                margin = np.where(feas, margin, -np.inf)
                k = int(np.argmax(margin))
                cand = ((int(idx[i_ok[k]]), float(th_i[k])),
                        (int(idx[j_ok[k]]), float(th_j[k])), 0.0)
                if best is None or margin[k] > best[3]:
                    best = (*cand, float(margin[k]))

    if best is not None:
        return best[:3]

    # parallel-tangent pairs: both fibers live on one great circle
    par = (~ok) & (np.abs(np.einsum("ij,ij->i", g[jj], tg[ii])) < 1e-6)
    for i_p, j_p in zip(ii[par], jj[par]):
        # angle of a point p on the circle spanned by (g_i, n_i)
        def ang(p, i=i_p):
            return math.atan2(float(p @ nr[i]), float(p @ g[i]))

        a0, a1 = 0.0, rho0                      # fiber i as angles
        b0, b1 = ang(-g[j_p]), ang(-(math.cos(rho0) * g[j_p]
                                     + math.sin(rho0) * nr[j_p]))
        # walk fiber j in small steps and test membership in fiber i range
        steps = np.linspace(0.0, rho0, 64)
        for th_j in steps:
            p = -(np.cos(th_j) * g[j_p] + np.sin(th_j) * nr[j_p])
            a = ang(p)
            if lo <= a <= hi and lo <= th_j <= hi and abs(float(p @ tg[i_p])) < 1e-6:
                return ((int(idx[i_p]), float(a)), (int(idx[j_p]), float(th_j)), 0.0)
    return None


@dataclasses.dataclass(frozen=True)
class CondensedStatus:
    """Outcome of the hemisphere and antipodal tests on the caustic cloud."""

    condensed: bool
    diffuse: bool
    borderline: bool
    margin: float
    hemisphere: np.ndarray | None
    antipodal_pair: tuple | None
    antipodal_defect: float

    @property
    def tag(self) -> str:
        if self.condensed and self.diffuse:
            return "Both"
        if self.diffuse:
            return "Diffuse"
        if self.condensed:
            return "Borderline" if self.borderline else "Condensed"
        return "Neither"


def condensed_status(curve: AdmissibleCurve,
                     tol: ToleranceProfile = DEFAULT_TOL) -> CondensedStatus:
    """Condensed and diffuse flags for a closed curve in (kappa0, +inf) form.

    The two properties are not mutually exclusive; the borderline flag marks
    the equatorial regime where the hemisphere margin is numerically zero
    and the condensed side of the label cannot be trusted.
    """
    cloud = classification_cloud(curve, tol)
    h, margin = sphere.best_hemisphere(cloud, tol)
    condensed = margin >= -tol.feasibility_margin
    borderline = abs(margin) < tol.borderline_margin

    witness = antipodal_fiber_witness(curve, tol=tol)
    if witness is not None:
        diffuse, pair, defect = True, witness[:2], witness[2]
    else:
        sub = cloud[:: max(1, cloud.shape[0] // 4096)]
        tree = cKDTree(sub)
        d, nearest = tree.query(-sub, k=1)
        k = int(np.argmin(d))
        defect = float(d[k])
        diffuse = defect < tol.antipodal_chord
        pair = (sub[k].copy(), sub[nearest[k]].copy()) if diffuse else None
    return CondensedStatus(condensed=bool(condensed), diffuse=bool(diffuse),
                           borderline=bool(borderline), margin=float(margin),
                           hemisphere=h if condensed else None,
                           antipodal_pair=pair,
                           antipodal_defect=float(defect))


def is_condensed(curve: AdmissibleCurve,
                 tol: ToleranceProfile = DEFAULT_TOL) -> CondensedStatus:
    return condensed_status(curve, tol)


is_diffuse = is_condensed


# ------------------------------------------------------------------ #
# Rotation numbers
# ------------------------------------------------------------------ #

def winding_number_planar(xy_tangents: np.ndarray,
                          tol: ToleranceProfile = DEFAULT_TOL) -> int:
    """Turns of a closed planar tangent field, with an integrality guard."""
    ang = np.unwrap(np.arctan2(xy_tangents[:, 1], xy_tangents[:, 0]))
    turns = (ang[-1] - ang[0]) / (2.0 * math.pi)
    if abs(turns - round(turns)) > tol.winding_residual:
        raise WindingResidual(f"tangent winding {turns:.4f} is not near an integer")
    return int(round(turns))


def rotation_number_condensed(curve: AdmissibleCurve, h=None,
                              tol: ToleranceProfile = DEFAULT_TOL) -> int:
    """Winding of the stereographic image of a condensed curve.

    Projects from the antipode of the barycenter hemisphere; the sign
    convention makes a condensed circle traversed k times have rotation
    number k.
    """
    if h is None:
        h = sphere.containing_hemisphere(classification_cloud(curve, tol), tol)
    chart = sphere.StereoChart(-np.asarray(h, dtype=float), tol)
    try:
        d = chart.project_d(curve.gamma, curve.tangent)
    except Exception as exc:
        raise WindingResidual(f"projection degenerate: {exc}") from exc
    nu = -winding_number_planar(d, tol)
    if nu < 1:
        raise WindingResidual(f"condensed curve produced winding {nu} < 1")
    return nu


def _membership_gap(curve: AdmissibleCurve, t_index: int, tree_c, tree_d,
                    delta: float, tol: ToleranceProfile):
    """Midpoint of the annulus gap on the fiber over one node."""
    rho0 = curve.bounds.rho1
    thetas = np.linspace(rho0 - math.pi, 0.0, 512)
    pts = (np.cos(thetas)[:, None] * curve.gamma[t_index]
           + np.sin(thetas)[:, None] * curve.normal[t_index])
    in_c = tree_c.query(pts, k=1)[0] < delta
    in_d = tree_d.query(pts, k=1)[0] < delta
    idx_c = np.flatnonzero(in_c)
    if idx_c.size == 0:
        return None
    theta1_idx = idx_c[0]                      # first contact with C
    idx_d = np.flatnonzero(in_d[:theta1_idx])
    if idx_d.size == 0:
        return None
    theta0_idx = idx_d[-1]                     # last contact with D below it
    if theta0_idx + 1 >= theta1_idx:
        return None
    mid = 0.5 * (thetas[theta0_idx] + thetas[theta1_idx])
    b = (math.cos(mid) * curve.gamma[t_index]
         + math.sin(mid) * curve.normal[t_index])
    if tree_c.query(b, k=1)[0] < delta or tree_d.query(b, k=1)[0] < delta:
        return None
    return b


def _count_fiber_hits(curve: AdmissibleCurve, b: np.ndarray) -> int:
    """Roots of <b, tangent> whose fiber angle lies in the regular range.

    The closed curve is scanned over one period with the seam value pinned
    to the start value, so a root exactly on the seam is counted once.
    """
    rho0 = curve.bounds.rho1
    g, tg, nr = curve.gamma, curve.tangent, curve.normal
    f = tg @ b
    f[-1] = f[0]
    count = 0
    for i in range(curve.n):
        a, c = f[i], f[i + 1]
        if a == 0.0:
            frac = 0.0
        elif a * c < 0.0:
            frac = a / (a - c)
        else:
            continue
        p = sphere.unit_vector((1 - frac) * g[i] + frac * g[i + 1])
        q = (1 - frac) * nr[i] + frac * nr[i + 1]
        q = sphere.unit_vector(q - p * (q @ p))
        theta = math.atan2(float(b @ q), float(b @ p))
        if rho0 - math.pi < theta < 0.0:
            count += 1
    return count


def rotation_number_nondiffuse(curve: AdmissibleCurve,
                               status: CondensedStatus | None = None,
                               tol: ToleranceProfile = DEFAULT_TOL) -> int:
    """Sheet count of the band covering over the separating annulus.

    Picks a witness point b in the gap between the caustic cloud C and its
    antipode D on some fiber, then counts the parameters t whose fiber hits
    b inside the regular band range.  A second witness from an independent
    fiber must agree.
    """
    if status is not None and status.diffuse:
        raise NoGapFound("curve is diffuse; the separating annulus is empty")
    cloud = classification_cloud(curve, tol)
    tree_c = cKDTree(cloud)
    tree_d = cKDTree(-cloud)
    delta = 2.0 * _cloud_spacing(curve, tol)

    counts = []
    tried = 0
    for frac in (0.0, 0.37, 0.61, 0.13, 0.83, 0.29, 0.47, 0.71):
        t_index = int(frac * curve.n)
        b = _membership_gap(curve, t_index, tree_c, tree_d, delta, tol)
        if b is None:
            continue
        tried += 1
        counts.append(_count_fiber_hits(curve, b))
        if len(counts) == 2:
            break
    if not counts:
        raise NoGapFound("no annulus gap at this resolution; reclassify")
    if len(counts) == 2 and counts[0] != counts[1]:
        raise FiberCountMismatch(f"witnesses disagree: {counts}")
    return counts[0]


# ------------------------------------------------------------------ #
# Equatorial inequality (self-test of the boundary analysis)
# ------------------------------------------------------------------ #

def equatorial_inequality_value(rho0: float, lambdas) -> tuple[float, float]:
    """(sum of arcsin(cos rho0 sin lambda_i), pi - 2 rho0)."""
    lam = np.asarray(lambdas, dtype=float)
    if lam.shape != (3,):
        raise DomainError("need exactly three angles")
    if abs(float(lam.sum()) - math.pi) > 1e-9:
        raise DomainError("angles must sum to pi")
    if np.any(lam < -1e-12) or np.any(lam > math.pi / 2 + 1e-12):
        raise DomainError("angles must lie in [0, pi/2]")
    if not 0.0 < rho0 <= math.pi / 2:
        raise DomainError("rho0 must lie in (0, pi/2]")
    lhs = float(np.sum(np.arcsin(math.cos(rho0) * np.sin(lam))))
    return lhs, math.pi - 2.0 * rho0


def equatorial_inequality_check(rho0: float, lambdas) -> bool:
    lhs, rhs = equatorial_inequality_value(rho0, lambdas)
    return lhs >= rhs - 1e-12


# ------------------------------------------------------------------ #
# The component label
# ------------------------------------------------------------------ #

@dataclasses.dataclass(frozen=True)
class ComponentLabel:
    """Index j of the connected component, with diagnostics."""

    n: int
    j: int
    condensed: bool
    nu: int | None
    parity: LiftParity
    borderline: bool
    margin: float
    status_tag: str

    def __post_init__(self):
        if not 1 <= self.j <= self.n:
            raise ValueError("label out of range")
        if self.j <= self.n - 2 and not (self.condensed and self.nu == self.j):
            raise ValueError("small labels require condensed curves with nu = j")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "j": self.j,
            "condensed": self.condensed,
            "nu": self.nu,
            "parity": self.parity.sign,
            "borderline": self.borderline,
            "status": self.status_tag,
            "margin": self.margin,
        }


def _parity_label(n: int, parity: LiftParity) -> int:
    # component n-1 carries lifts with sign (-1)^(n-1), component n with (-1)^n
    return n - 1 if parity.sign == (-1) ** (n - 1) else n


def classify_component(curve: AdmissibleCurve,
                       tol: ToleranceProfile = DEFAULT_TOL) -> ComponentLabel:
    """Connected component of a closed curve within its curvature bounds.

    Pipeline: reduce to (kappa0, +inf) form, test condensed/diffuse on the
    caustic cloud, compute the rotation number when it can decide, and fall
    back to the lift parity for the two large components.
    """
    reduced, _ = reduce_to_k0(curve, tol)
    n = component_count(curve.bounds)
    parity = lift_parity(reduced)
    status = condensed_status(reduced, tol)

    nu = None
    if status.condensed and not status.borderline and n >= 3:
        nu = rotation_number_condensed(reduced, tol=tol)
        j = nu if nu <= n - 2 else _parity_label(n, parity)
    else:
        j = _parity_label(n, parity)
    return ComponentLabel(n=n, j=j, condensed=status.condensed, nu=nu,
                          parity=parity, borderline=status.borderline,
                          margin=status.margin, status_tag=status.tag)
