"""Primitives for S^2, SO(3), the unit quaternions S^3 and spherical convexity.

Vectors are plain numpy arrays: shape (3,) for points of S^2, (4,) for
quaternions in scalar-first order [w, x, y, z], (3, 3) for rotations.
"""

from __future__ import annotations

import dataclasses
import warnings

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DegenerateProjection,
    EmptyDual,
    NearZeroCentroid,
    NotInHull,
    UnitDriftWarning,
)
from .tolerances import DEFAULT_TOL, ToleranceProfile

QUAT_ONE = np.array([1.0, 0.0, 0.0, 0.0])


def unit_vector(v) -> np.ndarray:
    """Normalize a 3-vector, rejecting near-zero input."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n < 1e-12:
        raise ValueError("cannot normalize a near-zero vector")
    return v / n


def is_unit_vector(v, tol: float = 1e-12) -> bool:
    return abs(float(np.dot(v, v)) - 1.0) <= 3.0 * tol


def is_rotation(R, tol: float = 1e-10) -> bool:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        return False
    defect = np.abs(R.T @ R - np.eye(3)).max()
    return defect <= tol and abs(np.linalg.det(R) - 1.0) <= tol


# ------------------------------------------------------------------ #
# Quaternion algebra (scalar-first convention)
# ------------------------------------------------------------------ #

def quat_mul(q1, q2) -> np.ndarray:
    w1, x1, y1, z1 = q1
    w2, x2, y2, z2 = q2
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


def quat_conj(q) -> np.ndarray:
    w, x, y, z = q
    return np.array([w, -x, -y, -z])


def quat_normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if n < 1e-12:
        raise ValueError("cannot normalize a near-zero quaternion")
    return q / n


def quat_exp(v) -> np.ndarray:
    """Exponential of a pure-imaginary quaternion given by its 3-vector part."""
    v = np.asarray(v, dtype=float)
    a = np.linalg.norm(v)
    if a < 1e-14:
        return QUAT_ONE.copy()
    s = np.sin(a) / a
    return np.array([np.cos(a), s * v[0], s * v[1], s * v[2]])


def quat_to_rotation(z, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Project a unit quaternion to SO(3) via v -> z v z^-1 on imaginaries.

    The kernel is {1, -1}: quat_to_rotation(z) == quat_to_rotation(-z).
    Inputs that drift off S^3 by more than 1e-9 are renormalized with a
    warning rather than rejected.
    """
    z = np.asarray(z, dtype=float)
    n2 = float(np.dot(z, z))
    if abs(n2 - 1.0) > 1e-9:
        warnings.warn("quaternion drifted off S^3; renormalizing", UnitDriftWarning)
        z = z / np.sqrt(n2)
    elif abs(n2 - 1.0) > tol.unit_norm:
        z = z / np.sqrt(n2)
    w, x, y, zc = z
    return np.array([
        [1 - 2 * (y * y + zc * zc), 2 * (x * y - w * zc), 2 * (x * zc + w * y)],
        [2 * (x * y + w * zc), 1 - 2 * (x * x + zc * zc), 2 * (y * zc - w * x)],
        [2 * (x * zc - w * y), 2 * (y * zc + w * x), 1 - 2 * (x * x + y * y)],
    ])


def rotation_to_quat(R) -> np.ndarray:
    """Lift a rotation matrix to one of its two unit quaternions (Shepperd)."""
    R = np.asarray(R, dtype=float)
    m00, m01, m02 = R[0]
    m10, m11, m12 = R[1]
    m20, m21, m22 = R[2]
    tr = m00 + m11 + m22
    if tr > 0.0:
        s = 0.5 / np.sqrt(tr + 1.0)
        q = np.array([0.25 / s, (m21 - m12) * s, (m02 - m20) * s, (m10 - m01) * s])
    elif m00 > m11 and m00 > m22:
        s = 2.0 * np.sqrt(1.0 + m00 - m11 - m22)
        q = np.array([(m21 - m12) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s])
    elif m11 > m22:
        s = 2.0 * np.sqrt(1.0 + m11 - m00 - m22)
        q = np.array([(m02 - m20) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s])
    else:
        s = 2.0 * np.sqrt(1.0 + m22 - m00 - m11)
        q = np.array([(m10 - m01) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s])
    return quat_normalize(q)


def rotate_vector(q, v) -> np.ndarray:
    """Apply the rotation represented by unit quaternion q to a 3-vector."""
    qv = np.array([0.0, v[0], v[1], v[2]])
    return quat_mul(quat_mul(q, qv), quat_conj(q))[1:]


def rotation_about(axis, angle: float) -> np.ndarray:
    """Rotation matrix about a unit axis."""
    half = 0.5 * angle
    a = unit_vector(axis)
    q = np.concatenate(([np.cos(half)], np.sin(half) * a))
    return quat_to_rotation(q)


# ------------------------------------------------------------------ #
# Stereographic charts and Mobius dilatations
# ------------------------------------------------------------------ #

def plane_basis(pole) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic basis (v1, v2) of pole-perp with v1 x v2 = pole."""
    pole = unit_vector(pole)
    a = np.zeros(3)
    a[int(np.argmin(np.abs(pole)))] = 1.0
    v1 = unit_vector(np.cross(pole, a))
    v2 = np.cross(pole, v1)
    return v1, v2


class StereoChart:
    """Stereographic projection from `pole` onto the plane through the origin.

    The image plane is pole-perp, with coordinates in a basis (v1, v2) such
    that (v1, v2, pole) is positively oriented.  The antipode of the pole maps
    to the origin and the equator orthogonal to the pole maps to the unit
    circle.  First and second derivatives of both directions are exact.
    """

    def __init__(self, pole, tol: ToleranceProfile = DEFAULT_TOL):
        self.pole = unit_vector(pole)
        self.v1, self.v2 = plane_basis(self.pole)
        self.tol = tol

    def _check(self, p):
        c = np.asarray(p, dtype=float) @ self.pole
        if np.any(np.arccos(np.clip(c, -1.0, 1.0)) < 1e-8):
            raise DegenerateProjection("point coincides with projection center")
        return c

    def project(self, p) -> np.ndarray:
        """Map points of S^2 (shape (3,) or (M,3)) to plane coordinates."""
        p = np.asarray(p, dtype=float)
        c = self._check(p)
        q = (p - np.multiply.outer(c, self.pole)) / (1.0 - c)[..., None]
        return np.stack([q @ self.v1, q @ self.v2], axis=-1)

    def project_d(self, p, u) -> np.ndarray:
        """Differential of `project` at p applied to a tangent vector u."""
        p = np.asarray(p, dtype=float)
        u = np.asarray(u, dtype=float)
        c = self._check(p)
        uc = u @ self.pole
        s = 1.0 / (1.0 - c)
        q = (u - np.multiply.outer(uc, self.pole)) * s[..., None] \
            + (p - np.multiply.outer(c, self.pole)) * (s * s * uc)[..., None]
        return np.stack([q @ self.v1, q @ self.v2], axis=-1)

    def project_d2(self, p, u, w) -> np.ndarray:
        """Second differential of `project` at p applied to (u, w)."""
        p = np.asarray(p, dtype=float)
        u = np.asarray(u, dtype=float)
        w = np.asarray(w, dtype=float)
        c = self._check(p)
        uc = u @ self.pole
        wc = w @ self.pole
        s = 1.0 / (1.0 - c)
        q = (u - np.multiply.outer(uc, self.pole)) * (s * s * wc)[..., None] \
            + (w - np.multiply.outer(wc, self.pole)) * (s * s * uc)[..., None] \
            + (p - np.multiply.outer(c, self.pole)) * (2.0 * s ** 3 * uc * wc)[..., None]
        return np.stack([q @ self.v1, q @ self.v2], axis=-1)

    def _embed(self, x):
        x = np.asarray(x, dtype=float)
        return np.multiply.outer(x[..., 0], self.v1) + np.multiply.outer(x[..., 1], self.v2)

    def unproject(self, x) -> np.ndarray:
        """Inverse map: plane coordinates back to S^2."""
        xh = self._embed(x)
        r2 = np.sum(np.asarray(x, dtype=float) ** 2, axis=-1)
        w = 1.0 / (r2 + 1.0)
        return (2.0 * xh + np.multiply.outer(r2 - 1.0, self.pole)) * w[..., None]

    def unproject_d(self, x, u) -> np.ndarray:
        xh = self._embed(x)
        uh = self._embed(u)
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        r2 = np.sum(x * x, axis=-1)
        xu = np.sum(x * u, axis=-1)
        w = 1.0 / (r2 + 1.0)
        base = 2.0 * xh + np.multiply.outer(r2 - 1.0, self.pole)
        return (2.0 * uh + np.multiply.outer(2.0 * xu, self.pole)) * w[..., None] \
            - base * (2.0 * xu * w * w)[..., None]

    def unproject_d2(self, x, u, v) -> np.ndarray:
        xh = self._embed(x)
        uh = self._embed(u)
        vh = self._embed(v)
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        r2 = np.sum(x * x, axis=-1)
        xu = np.sum(x * u, axis=-1)
        xv = np.sum(x * v, axis=-1)
        uv = np.sum(u * v, axis=-1)
        w = 1.0 / (r2 + 1.0)
        base = 2.0 * xh + np.multiply.outer(r2 - 1.0, self.pole)
        du = (2.0 * uh + np.multiply.outer(2.0 * xu, self.pole))
        dv = (2.0 * vh + np.multiply.outer(2.0 * xv, self.pole))
        return np.multiply.outer(2.0 * uv * w, self.pole) \
            - du * (2.0 * xv * w * w)[..., None] \
            - dv * (2.0 * xu * w * w)[..., None] \
            - base * (2.0 * uv * w * w - 8.0 * xu * xv * w ** 3)[..., None]


def stereographic(p, pole, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Conformal projection of p from `pole` onto the plane pole-perp."""
    return StereoChart(pole, tol).project(p)


def unstereographic(x, pole, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    return StereoChart(pole, tol).unproject(x)


def mobius_dilate(p, r: float, pole, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Dilatation T_r: conjugate scaling by r with projection from `pole`.

    T_1 is the identity; every T_r fixes the pole and its antipode and maps
    circles to circles.
    """
    if not 0.0 < r <= 1.0:
        raise ValueError("dilatation factor must lie in (0, 1]")
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    pts = np.atleast_2d(p).copy()
    chart = StereoChart(pole, tol)
    near_pole = np.arccos(np.clip(pts @ chart.pole, -1.0, 1.0)) < 1e-8
    regular = ~near_pole
    if np.any(regular):
        pts[regular] = chart.unproject(r * chart.project(pts[regular]))
    return pts[0] if single else pts


# ------------------------------------------------------------------ #
# Hemisphere feasibility and convexity predicates
# ------------------------------------------------------------------ #

def _face_lp(points: np.ndarray, axis: int, sign: float):
    """Maximize m with <p_i, h> >= m over the box face h[axis] = sign."""
    other = [j for j in range(3) if j != axis]
    m = points.shape[0]
    # variables: (h[other0], h[other1], margin); minimize -margin
    a_ub = np.empty((m, 3))
    a_ub[:, 0] = -points[:, other[0]]
    a_ub[:, 1] = -points[:, other[1]]
    a_ub[:, 2] = 1.0
    b_ub = sign * points[:, axis]
    res = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=a_ub,
        b_ub=b_ub,
        bounds=[(-1.0, 1.0), (-1.0, 1.0), (-2.0, 2.0)],
        method="highs",
    )
    if not res.success:  # pragma: no cover - tiny LPs are always feasible
        return None
    h = np.zeros(3)
    h[axis] = sign
    h[other[0]], h[other[1]] = res.x[0], res.x[1]
    return h, -res.fun


def best_hemisphere(points, tol: ToleranceProfile = DEFAULT_TOL):
    """Margin-maximizing direction over the unit ball, solved facewise.

    Returns (h, margin) with h unit and margin = min_i <p_i, h>.  The search
    runs a 3-variable LP on each face of the cube and normalizes the winner;
    this is exact enough at 1e-9 margins and fully deterministic.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] == 0:
        raise ValueError("empty point list")
    best_h, best_margin = None, -np.inf
    for axis in range(3):
        for sign in (1.0, -1.0):
            out = _face_lp(points, axis, sign)
            if out is None:
                continue
            h, _ = out
            norm = np.linalg.norm(h)
            if norm < 1e-12:
                continue
            hu = h / norm
            margin = float(np.min(points @ hu))
            if margin > best_margin:
                best_h, best_margin = hu, margin
    if best_h is None:  # pragma: no cover
        raise RuntimeError("hemisphere LP failed on all faces")
    return best_h, best_margin


def hemisphere_feasible(points, closed: bool = False,
                        tol: ToleranceProfile = DEFAULT_TOL):
    """Direction of an open (or closed) hemisphere containing the points.

    Returns the margin-maximizing unit vector, or None when no hemisphere of
    the requested kind exists at margin tolerance `tol.feasibility_margin`.
    """
    h, margin = best_hemisphere(points, tol)
    eps = tol.feasibility_margin
    if closed:
        return h if margin >= -eps else None
    return h if margin > eps else None


def origin_in_hull_interior(points, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
    """True iff no closed hemisphere contains the points."""
    _, margin = best_hemisphere(points, tol)
    return margin < -tol.feasibility_margin


@dataclasses.dataclass(frozen=True)
class SphericalSimplex:
    """Up to 4 points of S^2 whose convex combination hits a target."""

    vertices: np.ndarray        # (k, 3), k <= 4
    weights: np.ndarray         # (k,), positive, sums to 1
    indices: np.ndarray         # positions of the vertices in the input list

    def combination(self) -> np.ndarray:
        return self.weights @ self.vertices

    def check(self, tol: float = 1e-10) -> bool:
        w = self.weights
        return bool(np.all(w > 0) and abs(w.sum() - 1.0) <= tol)


def _reduce_caratheodory(points: np.ndarray, weights: np.ndarray, target: np.ndarray):
    """Shrink the support of a convex combination down to <= 4 points."""
    idx = np.flatnonzero(weights > 1e-14)
    w = weights[idx].astype(float)
    w /= w.sum()
    while idx.size > 4:
        cols = np.vstack([points[idx].T, np.ones(idx.size)])  # 4 x m, m > 4
        _, _, vt = np.linalg.svd(cols)
        lam = vt[-1]
        if np.max(lam) <= 0:
            lam = -lam
        pos = lam > 1e-14
        t = np.min(w[pos] / lam[pos])
        w = w - t * lam
        w[np.argmin(np.abs(w))] = 0.0
        keep = w > 1e-14
        idx, w = idx[keep], w[keep]
        w /= w.sum()
    return idx, w


def containing_simplex(points, target, tol: ToleranceProfile = DEFAULT_TOL) -> SphericalSimplex:
    """Vertices from `points` whose convex combination reproduces `target`.

    Tries seeded random quadruples first, then falls back to a linear
    program plus Caratheodory reduction.  Raises NotInHull when both fail,
    which signals that the caller's in-hull precondition was violated.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    target = np.asarray(target, dtype=float)
    n = points.shape[0]

    d0 = np.linalg.norm(points - target, axis=1)
    hit = int(np.argmin(d0))
    if d0[hit] <= 1e-9:
        return SphericalSimplex(points[hit][None, :], np.array([1.0]),
                                np.array([hit]))

    rng = np.random.default_rng(tol.seed)
    if n >= 4:
        rhs = np.concatenate([target, [1.0]])
        for _ in range(tol.simplex_budget):
            idx = rng.choice(n, size=4, replace=False)
            a = np.vstack([points[idx].T, np.ones(4)])
            det = np.linalg.det(a)
            if abs(det) < 1e-10:
                continue
            s = np.linalg.solve(a, rhs)
            if np.min(s) <= 1e-10:
                continue
            if np.linalg.norm(s @ points[idx] - target) <= 1e-9:
                return SphericalSimplex(points[idx], s, idx)

    # LP fallback: a convex combination picked by a seeded random objective
    # (different seeds explore different vertices), then support reduction.
    a_eq = np.vstack([points.T, np.ones(n)])
    b_eq = np.concatenate([target, [1.0]])
    res = linprog(c=rng.normal(size=n), A_eq=a_eq, b_eq=b_eq,
                  bounds=[(0.0, 1.0)] * n, method="highs")
    if not res.success:
        raise NotInHull("no convex combination reproduces the target")
    idx, w = _reduce_caratheodory(points, res.x, target)
    if np.linalg.norm(w @ points[idx] - target) > 1e-9 or np.min(w) <= 0:
        raise NotInHull("convex combination residual too large")
    return SphericalSimplex(points[idx], w, idx)


# ------------------------------------------------------------------ #
# Direction lattices and dual-cone barycenters
# ------------------------------------------------------------------ #

def fibonacci_lattice(m: int) -> np.ndarray:
    """m near-uniform directions on S^2 (deterministic golden-angle lattice)."""
    i = np.arange(m)
    z = 1.0 - (2.0 * i + 1.0) / m
    phi = i * (np.pi * (3.0 - np.sqrt(5.0)))
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def hemisphere_barycenter(point_cloud, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Barycenter of the set of closed hemispheres containing the cloud.

    Samples the dual cone {h : <p, h> >= 0 for all p} on a Fibonacci lattice,
    averages the surviving directions in R^3 and normalizes.  A second pass
    re-runs the average with the lattice re-aligned to the first estimate,
    which cancels the lattice-orientation bias.
    """
    cloud = np.atleast_2d(np.asarray(point_cloud, dtype=float))
    if cloud.shape[0] > 2048:
        # the barycenter is a canonical but heuristic choice; a fixed
        # deterministic decimation keeps the dual-cone filter cheap and the
        # caller re-checks containment on the full cloud
        cloud = cloud[:: cloud.shape[0] // 1024]

    def centroid(directions):
        keep = np.min(directions @ cloud.T, axis=1) >= 0.0
        if not np.any(keep):
            raise EmptyDual("no lattice direction contains the cloud")
        c = directions[keep].mean(axis=0)
        if np.linalg.norm(c) < 1e-6:
            raise NearZeroCentroid("dual-cone centroid is numerically zero")
        return c / np.linalg.norm(c)

    h1 = centroid(fibonacci_lattice(tol.lattice_size))
    # realign a denser lattice with the first estimate and average once more;
    # this cancels the orientation bias of the boundary cut
    axis = np.cross([0.0, 0.0, 1.0], h1)
    if np.linalg.norm(axis) < 1e-12:
        rot = np.eye(3) if h1[2] > 0 else rotation_about([1.0, 0.0, 0.0], np.pi)
    else:
        ang = float(np.arccos(np.clip(h1[2], -1.0, 1.0)))
        rot = rotation_about(axis, ang)
    fine = fibonacci_lattice(8 * tol.lattice_size)
    return centroid(fine @ rot.T)


def containing_hemisphere(point_cloud, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Barycenter hemisphere with LP fallback for degenerate dual cones.

    Any valid containing hemisphere works for winding-number purposes, so a
    near-zero dual centroid, or a barycenter whose containment fails on the
    full cloud, falls back to the margin-maximizing direction.
    """
    cloud = np.atleast_2d(np.asarray(point_cloud, dtype=float))
    try:
        h = hemisphere_barycenter(cloud, tol)
        if float(np.min(cloud @ h)) >= -100.0 * tol.feasibility_margin:
            return h
    except (EmptyDual, NearZeroCentroid):
        pass
    h = hemisphere_feasible(cloud, closed=True, tol=tol)
    if h is None:
        raise EmptyDual("no containing hemisphere for the cloud")
    return h
