"""Closed polyline curves: turning angles, radial projections, cones.

A curve is a closed polyline in R^n. Total curvature is the polygonal kind,
the sum of turning angles; reports label it "polygonal". The radial projection
of a segment onto the unit sphere around x0 is a great-circle arc whose length
equals the angle the segment subtends at x0, so projection lengths are exact
for polylines.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InputInconsistentError,
    InvalidParameterError,
    ProjectionSingularError,
)
from .geometry import PointN, angle_between, as_point, stable_sum, _angles_batch

__all__ = [
    "CornerFlag",
    "PolylineCurve",
    "ConeSurface",
    "BoundReport",
    "total_curvature",
    "turning_angles",
    "curve_length",
    "radial_projection_length",
    "cone_density",
    "build_cone",
    "projection_bound_report",
    "best_fit_plane_deviation",
]

# vertex/segment coincidence tolerance, relative to the curve scale
COINCIDENCE_REL_TOL = 1e-12
# segments subtending more than this are split before the arc formula
NEAR_PI = math.pi - 1e-3


@dataclass(frozen=True)
class CornerFlag:
    """Marks vertex ``index`` as a genuine corner with exterior angle ``theta``."""

    index: int
    theta: float


@dataclass(frozen=True)
class PolylineCurve:
    """Closed simple polyline in R^n.

    corner_flags semantics:
      * None: a raw polygon; every vertex is a genuine corner and its actual
        turning angle is used wherever a corner angle matters.
      * a tuple (possibly empty): the polyline samples a piecewise-C^1 curve;
        only flagged vertices are corners (with the intended theta) and
        unflagged vertices are smooth samples (theta 0).
    """

    vertices: np.ndarray
    closed: bool = True
    corner_flags: tuple[CornerFlag, ...] | None = None

    def __post_init__(self):
        v = np.array(self.vertices, dtype=np.float64)
        if v.ndim != 2:
            raise InvalidParameterError(f"expected (k, n) vertex array, got {v.shape}")
        if v.shape[1] < 3:
            raise InvalidParameterError("curve vertices need n >= 3 coordinates")
        if not np.all(np.isfinite(v)):
            raise InvalidParameterError("curve vertices must be finite")
        k = v.shape[0]
        if self.closed and k < 3:
            raise InvalidParameterError("a closed curve needs at least 3 vertices")
        if not self.closed and k < 2:
            raise InvalidParameterError("a curve needs at least 2 vertices")
        scale = self._scale_of(v)
        segs = np.roll(v, -1, axis=0) - v if self.closed else v[1:] - v[:-1]
        seg_len = np.linalg.norm(segs, axis=1)
        if np.any(seg_len <= COINCIDENCE_REL_TOL * scale):
            raise InvalidParameterError("consecutive curve vertices must be distinct")
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)
        if self.corner_flags is not None:
            flags = tuple(self.corner_flags)
            seen = set()
            for f in flags:
                if not (0 <= f.index < k):
                    raise InvalidParameterError(f"corner index {f.index} out of range")
                if f.index in seen:
                    raise InvalidParameterError(f"corner index {f.index} repeated")
                if not (0.0 <= f.theta <= math.pi + 1e-12):
                    raise InvalidParameterError("corner theta must lie in [0, pi]")
                seen.add(f.index)
            object.__setattr__(self, "corner_flags", flags)
        if self.closed:
            self._check_simple(v, scale)

    @staticmethod
    def _scale_of(v: np.ndarray) -> float:
        ext = v.max(axis=0) - v.min(axis=0)
        return max(float(np.linalg.norm(ext)), 1e-300)

    @property
    def k(self) -> int:
        return self.vertices.shape[0]

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def scale(self) -> float:
        return self._scale_of(self.vertices)

    def _check_simple(self, v: np.ndarray, scale: float) -> None:
        k = v.shape[0]
        # backtracking at a vertex means the two incident segments overlap
        d_in = v - np.roll(v, 1, axis=0)
        d_out = np.roll(v, -1, axis=0) - v
        turns = _angles_batch(d_in, d_out)
        if np.any(turns >= math.pi - 1e-12):
            raise InputInconsistentError("curve backtracks onto itself at a vertex")
        if k < 4:
            return
        a = v
        b = np.roll(v, -1, axis=0)
        ii, jj = np.triu_indices(k, 1)
        adjacent = (jj - ii == 1) | ((ii == 0) & (jj == k - 1))
        ii, jj = ii[~adjacent], jj[~adjacent]
        tol2 = (COINCIDENCE_REL_TOL * scale) ** 2
        for lo in range(0, ii.size, 2_000_000):
            hi = min(lo + 2_000_000, ii.size)
            d2 = _segment_pair_dist2(a[ii[lo:hi]], b[ii[lo:hi]], a[jj[lo:hi]], b[jj[lo:hi]])
            if np.any(d2 <= tol2):
                raise InputInconsistentError("curve is not simple: segments intersect")


def _segment_pair_dist2(a1, b1, a2, b2) -> np.ndarray:
    """Squared distances between segment pairs, rowwise; fully clamped."""
    d1 = b1 - a1
    d2 = b2 - a2
    r = a1 - a2
    a = np.einsum("kn,kn->k", d1, d1)
    e = np.einsum("kn,kn->k", d2, d2)
    f = np.einsum("kn,kn->k", d2, r)
    c = np.einsum("kn,kn->k", d1, r)
    b = np.einsum("kn,kn->k", d1, d2)
    denom = a * e - b * b
    safe = np.where(denom > 0, denom, 1.0)
    s = np.where(denom > 0, np.clip((b * f - c * e) / safe, 0.0, 1.0), 0.0)
    esafe = np.where(e > 0, e, 1.0)
    t = (b * s + f) / esafe
    asafe = np.where(a > 0, a, 1.0)
    s = np.where(t < 0, np.clip(-c / asafe, 0.0, 1.0), s)
    s = np.where(t > 1, np.clip((b - c) / asafe, 0.0, 1.0), s)
    t = np.clip(t, 0.0, 1.0)
    p1 = a1 + s[:, None] * d1
    p2 = a2 + t[:, None] * d2
    return ((p1 - p2) ** 2).sum(-1)


def turning_angles(c: PolylineCurve) -> np.ndarray:
    """Exterior angle at every vertex of a closed polyline, each in [0, pi]."""
    if not c.closed:
        raise InvalidParameterError("turning angles need a closed curve")
    v = c.vertices
    d_in = v - np.roll(v, 1, axis=0)
    d_out = np.roll(v, -1, axis=0) - v
    return _angles_batch(d_in, d_out)


def total_curvature(c: PolylineCurve) -> float:
    """Polygonal total curvature: the sum of turning angles.

    Any closed polygon turns by at least 2*pi; that bound doubles as an
    internal sanity check.
    """
    tc = stable_sum(turning_angles(c).tolist())
    if tc < 2.0 * math.pi - 1e-9:
        raise RuntimeError(f"total curvature {tc} below 2*pi: turning-angle bug")
    return tc


def curve_length(c: PolylineCurve) -> float:
    v = c.vertices
    segs = (np.roll(v, -1, axis=0) - v) if c.closed else (v[1:] - v[:-1])
    return stable_sum(np.linalg.norm(segs, axis=1).tolist())


def _split_angle(a: np.ndarray, b: np.ndarray, x0: np.ndarray, depth: int = 0) -> float:
    """Subtended angle of segment [a, b] at x0, splitting when nearly pi."""
    theta = angle_between(a - x0, b - x0)
    if theta < NEAR_PI or depth >= 60:
        return theta
    mid = 0.5 * (a + b)
    return _split_angle(a, mid, x0, depth + 1) + _split_angle(mid, b, x0, depth + 1)


def _locate_center(c: PolylineCurve, x0: PointN) -> int | None:
    """Index of the curve vertex equal to x0, or None; raises if x0 sits on a segment."""
    v = c.vertices
    scale = c.scale
    tol = COINCIDENCE_REL_TOL * scale
    d = np.linalg.norm(v - x0[None, :], axis=1)
    i = int(np.argmin(d))
    if d[i] <= tol:
        return i
    a = v
    b = np.roll(v, -1, axis=0)
    from .geometry import _point_segment_dist2

    seg_d2 = _point_segment_dist2(a, b, x0)
    if float(seg_d2.min()) <= tol * tol:
        raise ProjectionSingularError("projection center lies on the curve")
    return None


def radial_projection_length(c: PolylineCurve, x0: PointN) -> float:
    """Length of the curve's radial projection onto the unit sphere around x0.

    Each segment projects to a great-circle arc whose length is the angle the
    segment subtends at x0; segments subtending nearly pi are split first for
    conditioning. When x0 coincides with a curve vertex, that vertex is
    excised: the two incident segments project to single points and contribute
    zero, and the rest of the curve is projected as an open arc.
    """
    if not c.closed:
        raise InvalidParameterError("projection needs a closed curve")
    x0 = as_point(x0, dim=c.dim)
    center_idx = _locate_center(c, x0)
    v = c.vertices
    k = c.k
    a = v
    b = np.roll(v, -1, axis=0)
    keep = np.ones(k, dtype=bool)
    if center_idx is not None:
        keep[center_idx] = False
        keep[(center_idx - 1) % k] = False
    a = a[keep]
    b = b[keep]
    u = a - x0[None, :]
    w = b - x0[None, :]
    theta = _angles_batch(u, w)
    wide = theta >= NEAR_PI
    if np.any(wide):
        theta = theta.copy()
        for i in np.flatnonzero(wide):
            theta[i] = _split_angle(a[i], b[i], x0)
    return stable_sum(theta.tolist())


def cone_density(c: PolylineCurve, x0: PointN) -> float:
    """Area density at the apex of the cone over the curve: projection/(2*pi)."""
    return radial_projection_length(c, x0) / (2.0 * math.pi)


@dataclass(frozen=True)
class ConeSurface:
    """Triangulated cone over a base curve from an apex."""

    apex: PointN
    base: PolylineCurve
    kind: str
    t_range: tuple[float, float]
    mesh: "SurfaceModel"  # noqa: F821 (import cycle kept one-way)


def build_cone(
    c: PolylineCurve,
    x0: PointN,
    kind: str = "unit",
    R: float | None = None,
    radial_segments: int | None = None,
) -> ConeSurface:
    """Triangulate {x0 + t (x - x0) : x in curve} for t in a range set by kind.

    kind "unit" spans t in [0, 1] (apex included, fan at the tip); kind
    "exterior" spans t in [1, R]. Every ring reuses the curve's vertices
    scaled about x0, so the t = 1 ring coincides with the curve
    vertex-for-vertex. An exterior cone may have its apex at a curve vertex
    (the two incident segments sweep rays of zero area and are skipped); a
    unit cone may not.
    """
    from .surfaces import SurfaceModel

    if kind not in ("unit", "exterior"):
        raise InvalidParameterError(f"cone kind must be 'unit' or 'exterior', got {kind!r}")
    if not c.closed:
        raise InvalidParameterError("cones need a closed base curve")
    x0 = as_point(x0, dim=c.dim)
    center_idx = _locate_center(c, x0)
    if kind == "exterior":
        if R is None or not (R > 1.0) or not math.isfinite(R):
            raise InvalidParameterError("exterior cones need truncation R > 1")
        t_lo, t_hi = 1.0, float(R)
    else:
        if center_idx is not None:
            raise InvalidParameterError("unit cone apex must not lie on the curve")
        t_lo, t_hi = 0.0, 1.0

    v = c.vertices
    k = c.k
    rad = v - x0[None, :]
    dist = np.linalg.norm(rad, axis=1)
    edges = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)
    skip = np.zeros(k, dtype=bool)  # base segments generating zero-area strips
    if center_idx is not None:
        skip[center_idx] = True
        skip[(center_idx - 1) % k] = True
    if radial_segments is None and kind == "exterior":
        # geometric rings: ruled strips are exact geometry, so ring count only
        # has to keep strip areas commensurate with the local scale of any
        # clipping ball, which doubling achieves with O(log R) rings
        ts = [t_lo]
        while ts[-1] * 2.0 < t_hi:
            ts.append(ts[-1] * 2.0)
        ts.append(t_hi)
        ts = np.asarray(ts)
        nt = len(ts) - 1
    else:
        if radial_segments is None:
            span = (t_hi - t_lo) * float(dist.mean())
            radial_segments = int(
                np.clip(round(span / max(float(edges.mean()), 1e-12)), 1, 512)
            )
        nt = int(radial_segments)
        if nt < 1:
            raise InvalidParameterError("radial_segments must be >= 1")
        ts = np.linspace(t_lo, t_hi, nt + 1)
    verts = []
    faces = []
    if kind == "unit":
        verts.append(x0[None, :])
        for t in ts[1:]:
            verts.append(x0[None, :] + t * rad)
        first = 1  # apex occupies slot 0, stands in for the t=0 ring
        for i in range(k):
            faces.append((0, first + i, first + (i + 1) % k))
        ring_starts = [first + j * k for j in range(nt)]
    else:
        for t in ts:
            verts.append(x0[None, :] + t * rad)
        ring_starts = [j * k for j in range(nt + 1)]

    stack = np.concatenate(verts, axis=0)
    n_rings = len(ring_starts)
    for j in range(n_rings - 1):
        r0 = ring_starts[j]
        r1 = ring_starts[j + 1]
        for i in range(k):
            if skip[i]:
                continue
            i2 = (i + 1) % k
            faces.append((r0 + i, r1 + i, r1 + i2))
            faces.append((r0 + i, r1 + i2, r0 + i2))

    if center_idx is not None:
        # the apex vertex column is degenerate (all rings collapse to x0);
        # drop it and renumber
        keep = np.ones(stack.shape[0], dtype=bool)
        drop = [rs + center_idx for rs in ring_starts]
        keep[drop] = False
        remap = np.cumsum(keep) - 1
        stack = stack[keep]
        faces = [(remap[a], remap[b], remap[c]) for a, b, c in faces]

    surf = SurfaceModel.build(stack, np.asarray(faces, dtype=np.int64))
    return ConeSurface(apex=x0, base=c, kind=kind, t_range=(t_lo, t_hi), mesh=surf)


@dataclass(frozen=True)
class BoundReport:
    """Outcome of checking a projection length against its turning-angle bound."""

    mode: str  # "interior" (x0 off the curve) or "boundary" (x0 a curve vertex)
    projection_length: float
    tc: float
    theta: float
    bound: float
    slack: float
    tolerance: float
    ok: bool
    tc_method: str = "polygonal"

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "projection_length": self.projection_length,
            "total_curvature": self.tc,
            "tc_method": self.tc_method,
            "theta": self.theta,
            "bound": self.bound,
            "slack": self.slack,
            "tolerance": self.tolerance,
            "ok": self.ok,
        }


def projection_bound_report(
    c: PolylineCurve, x0: PointN, allowance: float = 0.0
) -> BoundReport:
    """Compare the radial projection length with its curvature bound.

    With x0 off the curve the bound is the total curvature. With x0 at a
    curve vertex the bound is TC - pi - theta, where theta is the corner's
    exterior angle: the actual turning angle for a raw polygon, the flagged
    intended angle (0 if unflagged) for a sampled curve.
    """
    if allowance < 0.0:
        raise InvalidParameterError("allowance must be nonnegative")
    x0 = as_point(x0, dim=c.dim)
    tc = total_curvature(c)
    proj = radial_projection_length(c, x0)
    center_idx = _locate_center(c, x0)
    tol = 1e-9 + allowance
    if center_idx is None:
        bound = tc
        theta = 0.0
        mode = "interior"
    else:
        mode = "boundary"
        if c.corner_flags is None:
            theta = float(turning_angles(c)[center_idx])
        else:
            theta = 0.0
            for f in c.corner_flags:
                if f.index == center_idx:
                    theta = float(f.theta)
                    break
        bound = tc - math.pi - theta
    slack = bound - proj
    return BoundReport(
        mode=mode,
        projection_length=proj,
        tc=tc,
        theta=theta,
        bound=bound,
        slack=slack,
        tolerance=tol,
        ok=bool(slack >= -tol),
    )


def best_fit_plane_deviation(points: np.ndarray) -> float:
    """Max distance from the points to their best-fit affine 2-plane."""
    x = np.asarray(points, dtype=np.float64)
    centered = x - x.mean(axis=0, keepdims=True)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    residual = centered - centered @ vt[:2].T @ vt[:2]
    return float(np.linalg.norm(residual, axis=1).max(initial=0.0))
