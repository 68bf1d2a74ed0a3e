"""Dimension-agnostic primitives: points, balls, triangles, sphere clipping.

Everything here works in ambient dimension n >= 3. A point is a 1-D float64
array; batches of triangles are (K, 3, n) arrays. Accumulations that feed
measures use error-free summation (math.fsum) in a fixed order so results are
bit-stable across runs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputInconsistentError, InvalidParameterError

__all__ = [
    "PointN",
    "Ball",
    "Triangle",
    "as_point",
    "angle_between",
    "stable_sum",
    "triangle_area",
    "triangle_areas",
    "clip_area_in_ball",
    "clip_areas_total",
    "vertex_total_angle",
    "subdivide4",
    "point_triangle_dist2",
    "DEGENERATE_REL_TOL",
    "DEFAULT_CLIP_TOL",
]

PointN = np.ndarray

# area below this multiple of the squared diameter counts as zero-area
DEGENERATE_REL_TOL = 1e-14
# default relative tolerance of the adaptive sphere clip
DEFAULT_CLIP_TOL = 1e-6


def as_point(coords, dim: int | None = None) -> PointN:
    """Validate and freeze a point: finite float64, length n >= 3.

    Parameters
    ----------
    coords : array-like of shape (n,)
    dim : expected dimension, or None to accept any n >= 3.
    """
    p = np.array(coords, dtype=np.float64).reshape(-1)
    if p.size < 3:
        raise InvalidParameterError(f"points need n >= 3 coordinates, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise InvalidParameterError("point coordinates must be finite")
    if dim is not None and p.size != dim:
        raise InputInconsistentError(f"expected dimension {dim}, got {p.size}")
    p.flags.writeable = False
    return p


def stable_sum(values) -> float:
    """Error-free summation in the given (fixed) order."""
    return math.fsum(values)


def angle_between(u, v) -> float:
    """Angle in [0, pi] between nonzero vectors, stable near 0 and pi."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise InvalidParameterError("angle undefined for zero vector")
    a = u / nu
    b = v / nv
    # half-angle form: atan2 of chord lengths, exact at both ends of [0, pi]
    return 2.0 * math.atan2(float(np.linalg.norm(a - b)), float(np.linalg.norm(a + b)))


def _angles_batch(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rowwise angle_between for (K, n) stacks; rows must be nonzero."""
    nu = np.linalg.norm(u, axis=-1, keepdims=True)
    nv = np.linalg.norm(v, axis=-1, keepdims=True)
    a = u / nu
    b = v / nv
    return 2.0 * np.arctan2(
        np.linalg.norm(a - b, axis=-1), np.linalg.norm(a + b, axis=-1)
    )


@dataclass(frozen=True)
class Ball:
    """Closed ball in R^n."""

    center: PointN
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        r = float(self.radius)
        if not (math.isfinite(r) and r > 0.0):
            raise InvalidParameterError(f"ball radius must be finite and positive, got {r}")
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return self.center.size


@dataclass(frozen=True)
class Triangle:
    """Triangle in R^n with a winding orientation sign.

    Degenerate (collinear) triangles are legal; they are flagged and measure
    zero rather than raising.
    """

    vertices: np.ndarray  # (3, n)
    orientation: int = 1

    def __post_init__(self):
        v = np.array(self.vertices, dtype=np.float64)
        if v.shape[0] != 3 or v.ndim != 2:
            raise InvalidParameterError(f"triangle needs 3 vertices, got shape {v.shape}")
        if v.shape[1] < 3:
            raise InvalidParameterError("triangle vertices need n >= 3 coordinates")
        if not np.all(np.isfinite(v)):
            raise InvalidParameterError("triangle vertices must be finite")
        if self.orientation not in (-1, 1):
            raise InvalidParameterError("orientation must be +1 or -1")
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def area(self) -> float:
        return triangle_area(self)

    @property
    def degenerate(self) -> bool:
        return triangle_area(self) == 0.0


def triangle_areas(verts: np.ndarray) -> np.ndarray:
    """Areas of a (K, 3, n) stack via the Gram determinant (any n)."""
    e1 = verts[:, 1] - verts[:, 0]
    e2 = verts[:, 2] - verts[:, 0]
    g11 = np.einsum("kn,kn->k", e1, e1)
    g22 = np.einsum("kn,kn->k", e2, e2)
    g12 = np.einsum("kn,kn->k", e1, e2)
    det = g11 * g22 - g12 * g12
    return 0.5 * np.sqrt(np.maximum(det, 0.0))


def subdivide4(verts: np.ndarray, levels: int = 1) -> np.ndarray:
    """Midpoint 4-way subdivision of a (K, 3, n) stack, repeated `levels` times.

    Row order is deterministic (children of row k land at k, K+k, 2K+k, 3K+k),
    so parallel stacks (coordinates and parameters, say) stay aligned when
    subdivided separately.
    """
    out = np.asarray(verts, dtype=np.float64)
    for _ in range(int(levels)):
        a, b, c = out[:, 0], out[:, 1], out[:, 2]
        ab = 0.5 * (a + b)
        bc = 0.5 * (b + c)
        ca = 0.5 * (c + a)
        out = np.concatenate(
            [
                np.stack([a, ab, ca], axis=1),
                np.stack([ab, b, bc], axis=1),
                np.stack([ca, bc, c], axis=1),
                np.stack([ab, bc, ca], axis=1),
            ]
        )
    return out


def _sq_diameters(verts: np.ndarray) -> np.ndarray:
    d01 = ((verts[:, 1] - verts[:, 0]) ** 2).sum(-1)
    d12 = ((verts[:, 2] - verts[:, 1]) ** 2).sum(-1)
    d20 = ((verts[:, 0] - verts[:, 2]) ** 2).sum(-1)
    return np.maximum(np.maximum(d01, d12), d20)


def triangle_area(t: Triangle) -> float:
    """Area of one triangle; collapses to 0.0 below the degeneracy floor."""
    verts = t.vertices[None, :, :]
    a = float(triangle_areas(verts)[0])
    if a < DEGENERATE_REL_TOL * float(_sq_diameters(verts)[0]):
        return 0.0
    return a


def _point_segment_dist2(a: np.ndarray, b: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Squared distance from point p to segments [a, b]; a, b are (K, n)."""
    ab = b - a
    denom = np.einsum("kn,kn->k", ab, ab)
    ap = p[None, :] - a
    num = np.einsum("kn,kn->k", ap, ab)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(denom > 0.0, num / np.where(denom > 0.0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[:, None] * ab
    return ((closest - p[None, :]) ** 2).sum(-1)


def point_triangle_dist2(verts: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Squared distance from p to each triangle of a (K, 3, n) stack.

    Clamped-barycentric region walk; degenerate rows fall back to the minimum
    of the three edge distances.
    """
    base = verts[:, 0]
    e0 = verts[:, 1] - base
    e1 = verts[:, 2] - base
    dv = base - p[None, :]
    a = np.einsum("kn,kn->k", e0, e0)
    b = np.einsum("kn,kn->k", e0, e1)
    c = np.einsum("kn,kn->k", e1, e1)
    d = np.einsum("kn,kn->k", e0, dv)
    e = np.einsum("kn,kn->k", e1, dv)
    det = a * c - b * b
    s = b * e - c * d
    t = b * d - a * e

    scale = np.maximum(a, c)
    ok = det > 1e-14 * scale * scale
    dets = np.where(ok, det, 1.0)

    s_out = np.empty_like(a)
    t_out = np.empty_like(a)

    inner = s + t <= det
    with np.errstate(invalid="ignore", divide="ignore"):
        # region 0
        r0 = inner & (s >= 0) & (t >= 0)
        s_out = np.where(r0, s / dets, 0.0)
        t_out = np.where(r0, t / dets, 0.0)
        # region 3/4 share s = 0 treatment; region 5 has t = 0
        r4 = inner & (s < 0) & (t < 0)
        r3 = inner & (s < 0) & (t >= 0)
        r5 = inner & (s >= 0) & (t < 0)
        csafe = np.where(c > 0, c, 1.0)
        asafe = np.where(a > 0, a, 1.0)
        t3 = np.clip(-e / csafe, 0.0, 1.0)
        s5 = np.clip(-d / asafe, 0.0, 1.0)
        s_out = np.where(r3, 0.0, s_out)
        t_out = np.where(r3, t3, t_out)
        s_out = np.where(r5, s5, s_out)
        t_out = np.where(r5, 0.0, t_out)
        use_s = d < 0
        s_out = np.where(r4, np.where(use_s, s5, 0.0), s_out)
        t_out = np.where(r4, np.where(use_s, 0.0, t3), t_out)
        # outer regions
        denom_q = a - 2.0 * b + c
        dq = np.where(denom_q > 0, denom_q, 1.0)
        r1 = ~inner & (s >= 0) & (t >= 0)
        numer1 = c + e - b - d
        s1 = np.clip(numer1 / dq, 0.0, 1.0)
        s1 = np.where(numer1 <= 0, 0.0, s1)
        s_out = np.where(r1, s1, s_out)
        t_out = np.where(r1, 1.0 - s1, t_out)
        r2 = ~inner & (s < 0)
        tmp0 = b + d
        tmp1 = c + e
        s2 = np.clip((tmp1 - tmp0) / dq, 0.0, 1.0)
        use_edge = tmp1 > tmp0
        s_out = np.where(r2, np.where(use_edge, s2, 0.0), s_out)
        t_out = np.where(r2, np.where(use_edge, 1.0 - s2, t3), t_out)
        r6 = ~inner & (s >= 0) & (t < 0)
        tmp0b = b + e
        tmp1b = a + d
        t6 = np.clip((tmp1b - tmp0b) / dq, 0.0, 1.0)
        use_edge6 = tmp1b > tmp0b
        t_out = np.where(r6, np.where(use_edge6, t6, 0.0), t_out)
        s_out = np.where(r6, np.where(use_edge6, 1.0 - t6, s5), s_out)

    closest = base + s_out[:, None] * e0 + t_out[:, None] * e1
    dist2 = ((closest - p[None, :]) ** 2).sum(-1)

    if not np.all(ok):
        # degenerate: min over the 3 edges
        bad = ~ok
        vb = verts[bad]
        d2 = np.minimum(
            _point_segment_dist2(vb[:, 0], vb[:, 1], p),
            np.minimum(
                _point_segment_dist2(vb[:, 1], vb[:, 2], p),
                _point_segment_dist2(vb[:, 2], vb[:, 0], p),
            ),
        )
        dist2 = dist2.copy()
        dist2[bad] = d2
    return dist2


def _split_longest(verts: np.ndarray, thresh: np.ndarray):
    """Bisect each triangle across its longest edge; areas halve exactly."""
    d01 = ((verts[:, 1] - verts[:, 0]) ** 2).sum(-1)
    d12 = ((verts[:, 2] - verts[:, 1]) ** 2).sum(-1)
    d20 = ((verts[:, 0] - verts[:, 2]) ** 2).sum(-1)
    which = np.argmax(np.stack([d01, d12, d20], axis=1), axis=1)
    k = verts.shape[0]
    idx = np.arange(k)
    i0 = which
    i1 = (which + 1) % 3
    i2 = (which + 2) % 3
    v0 = verts[idx, i0]
    v1 = verts[idx, i1]
    v2 = verts[idx, i2]
    mid = 0.5 * (v0 + v1)
    child1 = np.stack([v0, mid, v2], axis=1)
    child2 = np.stack([mid, v1, v2], axis=1)
    return (
        np.concatenate([child1, child2], axis=0),
        np.concatenate([thresh, thresh], axis=0),
    )


def clip_areas_total(
    verts: np.ndarray, ball: Ball, tol: float = DEFAULT_CLIP_TOL
) -> float:
    """Total area of the (K, 3, n) triangle stack clipped to a ball.

    Adaptive longest-edge bisection. A piece is resolved when it is entirely
    inside the ball (all vertices inside; the ball is convex), entirely outside
    (distance from the center exceeds the radius), or its area falls below
    tol times its root triangle's area, in which case it contributes the
    fraction of its area given by where the radius falls between its nearest
    and farthest point (first-order coverage; errors on opposite sides of the
    sphere largely cancel).

    Deterministic: pieces accumulate in breadth-first creation order through
    error-free summation.
    """
    if not (tol > 0.0):
        raise InvalidParameterError(f"clip tolerance must be positive, got {tol}")
    verts = np.asarray(verts, dtype=np.float64)
    if verts.ndim != 3 or verts.shape[1] != 3:
        raise InvalidParameterError(f"expected (K, 3, n) triangle stack, got {verts.shape}")
    if verts.shape[1:] and verts.shape[2] != ball.dim:
        raise InputInconsistentError(
            f"triangles have dimension {verts.shape[2]}, ball has {ball.dim}"
        )
    if verts.shape[0] == 0:
        return 0.0

    areas0 = triangle_areas(verts)
    degenerate = areas0 < DEGENERATE_REL_TOL * _sq_diameters(verts)
    keep = ~degenerate
    active = verts[keep]
    thresh = tol * areas0[keep]
    if active.shape[0] == 0:
        return 0.0

    center = ball.center
    r2 = ball.radius * ball.radius
    contributions: list[np.ndarray] = []
    max_levels = max(24, int(math.ceil(math.log2(1.0 / tol))) + 8)

    for level in range(max_levels):
        if active.shape[0] == 0:
            break
        areas = triangle_areas(active)
        d2 = ((active - center) ** 2).sum(-1)  # (K, 3)
        all_in = np.all(d2 <= r2, axis=1)
        rest = ~all_in
        outside = np.zeros(active.shape[0], dtype=bool)
        if np.any(rest):
            od2 = point_triangle_dist2(active[rest], center)
            outside[rest] = od2 > r2
        small = (areas <= thresh) & ~all_in & ~outside
        if level == max_levels - 1:
            small = ~all_in & ~outside
        contributions.append(areas[all_in])
        if np.any(small):
            near = np.sqrt(point_triangle_dist2(active[small], center))
            far = np.sqrt(d2[small].max(axis=1))
            width = np.maximum(far - near, 1e-300)
            frac = np.clip((ball.radius - near) / width, 0.0, 1.0)
            contributions.append(areas[small] * frac)
        split = ~all_in & ~outside & ~small
        if not np.any(split):
            active = active[:0]
            break
        active, thresh = _split_longest(active[split], thresh[split])

    if not contributions:
        return 0.0
    return stable_sum(np.concatenate(contributions).tolist())


def clip_area_in_ball(t: Triangle, b: Ball, tol: float = DEFAULT_CLIP_TOL) -> float:
    """Area of triangle ∩ ball within tol times the triangle's area.

    Monotone in the radius up to tol * area(t); always within [0, area(t)].
    """
    if t.dim != b.dim:
        raise InputInconsistentError(f"triangle dim {t.dim} != ball dim {b.dim}")
    return clip_areas_total(t.vertices[None, :, :], b, tol)


def _match_vertex(tri: np.ndarray, p: np.ndarray, tol: float) -> int | None:
    d = np.linalg.norm(tri - p[None, :], axis=1)
    i = int(np.argmin(d))
    return i if d[i] <= tol else None


def vertex_total_angle(star, apex: PointN | None = None) -> float:
    """Sum of the apex angles of a triangle star around its shared vertex.

    The apex is inferred as the vertex common to every triangle of the star.
    Two-triangle stars can share a whole edge, which makes the common vertex
    ambiguous; pass ``apex`` explicitly in that case.

    For a star cut from a flat PL surface this is 2*pi times the area density
    of the surface at the vertex (2*pi at a flat interior vertex, pi along a
    straight boundary, 2*pi*k at a k-fold covering vertex).
    """
    tris = [t.vertices if isinstance(t, Triangle) else np.asarray(t, dtype=np.float64) for t in star]
    if len(tris) == 0:
        raise InvalidParameterError("empty star")
    dims = {t.shape[1] for t in tris}
    if len(dims) != 1:
        raise InputInconsistentError("star triangles live in different dimensions")
    scale = max(float(np.sqrt(_sq_diameters(t[None, :, :]))[0]) for t in tris)
    tol = 1e-12 * max(scale, 1e-300)

    if apex is None:
        candidates = []
        for i in range(3):
            p = tris[0][i]
            if all(_match_vertex(t, p, tol) is not None for t in tris):
                candidates.append(p)
        # deduplicate coincident candidates
        unique: list[np.ndarray] = []
        for p in candidates:
            if not any(np.linalg.norm(p - q) <= tol for q in unique):
                unique.append(p)
        if len(unique) == 0:
            raise InputInconsistentError("star triangles share no common vertex")
        if len(unique) > 1:
            raise InvalidParameterError(
                "shared vertex is ambiguous for this star; pass apex explicitly"
            )
        apex = unique[0]
    else:
        apex = as_point(apex, dim=tris[0].shape[1])

    angles = []
    for t in tris:
        i = _match_vertex(t, apex, tol)
        if i is None:
            raise InputInconsistentError("a star triangle does not contain the apex")
        u = t[(i + 1) % 3] - apex
        w = t[(i + 2) % 3] - apex
        angles.append(angle_between(u, w))
    return stable_sum(angles)
