"""Planar primitives on closed polylines: winding numbers, probes, separation.

Points are Python/NumPy complex numbers.  A closed polyline stores its
vertices once; the closing edge runs from the last vertex back to the first.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateCurve, InvalidPolyline, PointOnCurve

INCIDENCE_TOL = 1e-9
SEPARATION_TOL = 1e-6
DEFAULT_VERTICES = 256

# pair-block size for brute-force kernels (keeps temporaries around 32 MB)
_CHUNK = 1 << 21


class Orientation(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"

    def flipped(self) -> "Orientation":
        return Orientation.NEGATIVE if self is Orientation.POSITIVE else Orientation.POSITIVE


@dataclass(frozen=True, eq=False)
class ClosedPolyline:
    """Closed polygonal curve given by its vertices, implicitly closed."""

    vertices: np.ndarray
    tolerance: float = INCIDENCE_TOL

    def __post_init__(self):
        v = np.array(self.vertices, dtype=complex).ravel()
        if v.size < 8:
            raise InvalidPolyline(f"need at least 8 vertices, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise InvalidPolyline("vertices must be finite")
        if not self.tolerance > 0:
            raise InvalidPolyline("tolerance must be positive")
        steps = np.abs(np.roll(v, -1) - v)
        if np.any(steps <= self.tolerance):
            k = int(np.argmin(steps))
            raise InvalidPolyline(f"vertices {k} and {(k + 1) % v.size} coincide at tolerance")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self):
        return self.vertices.size

    def __eq__(self, other):
        if not isinstance(other, ClosedPolyline):
            return NotImplemented
        return self.tolerance == other.tolerance and np.array_equal(self.vertices, other.vertices)

    __hash__ = None

    @property
    def edges(self):
        return self.vertices, np.roll(self.vertices, -1)

    def reversed(self) -> "ClosedPolyline":
        return ClosedPolyline(self.vertices[::-1], self.tolerance)

    def rotated(self, k: int) -> "ClosedPolyline":
        return ClosedPolyline(np.roll(self.vertices, k), self.tolerance)

    def bbox(self):
        v = self.vertices
        return v.real.min(), v.imag.min(), v.real.max(), v.imag.max()

    def diameter(self) -> float:
        x0, y0, x1, y1 = self.bbox()
        return math.hypot(x1 - x0, y1 - y0)

    def is_simple(self) -> bool:
        return is_simple(self.vertices, self.tolerance)


def circle(center: complex, radius: float, n: int = DEFAULT_VERTICES,
           tolerance: float = INCIDENCE_TOL, clockwise: bool = False) -> ClosedPolyline:
    t = 2 * np.pi * np.arange(n) / n
    if clockwise:
        t = -t
    return ClosedPolyline(center + radius * np.exp(1j * t), tolerance)


def cldexp(z, e: int):
    """z * 2**e for complex input, under/overflowing gracefully."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(over="ignore", under="ignore"):
        return np.ldexp(z.real, e) + 1j * np.ldexp(z.imag, e)


def _vertices(curve) -> np.ndarray:
    if isinstance(curve, ClosedPolyline):
        return curve.vertices
    return np.asarray(curve, dtype=complex).ravel()


def _tolerance(curve, default=INCIDENCE_TOL) -> float:
    return curve.tolerance if isinstance(curve, ClosedPolyline) else default


# ---------------------------------------------------------------------------
# distance kernels

def _point_segment(p, a, b):
    """Distance and nearest point from points p to segments [a, b] (broadcast)."""
    ab = b - a
    L2 = (ab.real ** 2 + ab.imag ** 2)
    ap = p - a
    with np.errstate(invalid="ignore", divide="ignore"):
        t = (ap.real * ab.real + ap.imag * ab.imag) / L2
    t = np.where(L2 > 0, np.clip(t, 0.0, 1.0), 0.0)
    q = a + t * ab
    return np.abs(p - q), q


def distance_to_curve(curve, points) -> np.ndarray:
    """Minimum distance from each point to the polyline."""
    v = _vertices(curve)
    a, b = v, np.roll(v, -1)
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    out = np.empty(pts.shape, dtype=float)
    flat = pts.ravel()
    res = out.ravel()
    step = max(1, _CHUNK // max(1, v.size))
    for s in range(0, flat.size, step):
        d, _ = _point_segment(flat[s:s + step, None], a[None, :], b[None, :])
        res[s:s + step] = d.min(axis=1)
    return out


def _cross(u, w):
    return u.real * w.imag - u.imag * w.real


def _segment_pairs(a0, a1, b0, b1):
    """Exact distances and witness midpoints between paired segments."""
    d1, q1 = _point_segment(a0, b0, b1)
    d2, q2 = _point_segment(a1, b0, b1)
    d3, q3 = _point_segment(b0, a0, a1)
    d4, q4 = _point_segment(b1, a0, a1)
    D = np.stack([d1, d2, d3, d4])
    k = np.argmin(D, axis=0)
    dist = np.take_along_axis(D, k[None], 0)[0]
    P = np.stack([(a0 + q1) / 2, (a1 + q2) / 2, (b0 + q3) / 2, (b1 + q4) / 2])
    wit = np.take_along_axis(P, k[None], 0)[0]
    o1 = _cross(a1 - a0, b0 - a0)
    o2 = _cross(a1 - a0, b1 - a0)
    o3 = _cross(b1 - b0, a0 - b0)
    o4 = _cross(b1 - b0, a1 - b0)
    crossing = (o1 * o2 < 0) & (o3 * o4 < 0)
    if np.any(crossing):
        with np.errstate(invalid="ignore", divide="ignore"):
            t = o1 / (o1 - o2)
            xpt = b0 + t * (b1 - b0)
        dist = np.where(crossing, 0.0, dist)
        wit = np.where(crossing, xpt, wit)
    return dist, wit


def closest_approach(a, b):
    """Minimum distance between two closed polylines and a witness point.

    The witness is the midpoint of a closest pair of points.  Uses a k-d tree
    over segment midpoints: a pair of segments can only beat the current best
    distance ``ub`` if their midpoints lie within ``ub`` plus both half-lengths.
    """
    va, vb = _vertices(a), _vertices(b)
    a0, a1 = va, np.roll(va, -1)
    b0, b1 = vb, np.roll(vb, -1)
    if va.size * vb.size <= 65536:
        ii, jj = np.meshgrid(np.arange(va.size), np.arange(vb.size), indexing="ij")
        ii, jj = ii.ravel(), jj.ravel()
    else:
        ma, mb = (a0 + a1) / 2, (b0 + b1) / 2
        ha, hb = np.abs(a1 - a0) / 2, np.abs(b1 - b0) / 2
        tb = cKDTree(np.column_stack([mb.real, mb.imag]))
        dmid, near = tb.query(np.column_stack([ma.real, ma.imag]), k=1)
        k = int(np.argmin(dmid))
        d0, _ = _segment_pairs(a0[k:k + 1], a1[k:k + 1], b0[near[k]:near[k] + 1], b1[near[k]:near[k] + 1])
        ub = float(d0[0])
        hbm = float(hb.max())
        cand = np.flatnonzero(dmid - ha - hbm <= ub)
        radius = (ub + ha[cand] + hbm) * (1 + 1e-12) + 1e-300
        lists = tb.query_ball_point(np.column_stack([ma[cand].real, ma[cand].imag]), radius)
        counts = np.fromiter((len(x) for x in lists), dtype=np.intp, count=len(lists))
        ii = np.repeat(cand, counts)
        jj = np.fromiter((j for x in lists for j in x), dtype=np.intp, count=int(counts.sum()))
    best, wit = np.inf, 0j
    for s in range(0, ii.size, _CHUNK):
        i, j = ii[s:s + _CHUNK], jj[s:s + _CHUNK]
        d, w = _segment_pairs(a0[i], a1[i], b0[j], b1[j])
        k = int(np.argmin(d))
        if d[k] < best:
            best, wit = float(d[k]), complex(w[k])
    return best, wit


def min_separation(a, b) -> float:
    """Minimum Euclidean distance between the segments of two closed polylines."""
    return closest_approach(a, b)[0]


# ---------------------------------------------------------------------------
# winding numbers and point location

def _angle_sum(v, points):
    """Total signed angle swept by each closed polyline about each point."""
    pts = np.atleast_1d(points).ravel()
    out = np.empty(pts.size)
    nxt = np.roll(v, -1)
    step = max(1, _CHUNK // max(1, v.size))
    for s in range(0, pts.size, step):
        p = pts[s:s + step, None]
        out[s:s + step] = np.angle((nxt[None, :] - p) / (v[None, :] - p)).sum(axis=1)
    return out


def winding_numbers(curve, points, tol=None) -> np.ndarray:
    """Winding numbers about many points; raises PointOnCurve for any incident point."""
    v = _vertices(curve)
    tol = _tolerance(curve) if tol is None else tol
    pts = np.atleast_1d(np.asarray(points, dtype=complex)).ravel()
    d = distance_to_curve(v, pts)
    if pts.size and d.min() <= tol:
        k = int(np.argmin(d))
        raise PointOnCurve(complex(pts[k]), float(d[k]))
    return np.rint(_angle_sum(v, pts) / (2 * np.pi)).astype(int)


def winding_number(curve, p: complex) -> int:
    """Integer winding index of the curve about p, by angle summation."""
    return int(winding_numbers(curve, [p])[0])


def _crossings(v, y):
    a, b = v, np.roll(v, -1)
    up = (a.imag <= y) & (b.imag > y)
    down = (b.imag <= y) & (a.imag > y)
    m = up | down
    a, b = a[m], b[m]
    x = a.real + (y - a.imag) * (b.real - a.real) / (b.imag - a.imag)
    return np.sort(x)


_PROBE_LEVELS = (0.5, 0.377, 0.623, 0.271, 0.729, 0.164, 0.836, 0.093, 0.907, 0.45, 0.55)


def probe_candidates(v, levels=_PROBE_LEVELS):
    """Midpoints of even-odd crossing intervals on a few horizontal lines."""
    y0, y1 = v.imag.min(), v.imag.max()
    for t in levels:
        y = y0 + t * (y1 - y0)
        xs = _crossings(v, y)
        spans = [(xs[k + 1] - xs[k], 0.5 * (xs[k] + xs[k + 1])) for k in range(0, xs.size - 1, 2)]
        for _, xm in sorted(spans, reverse=True):
            yield complex(xm, y)


def interior_probe(curve, tol=None, accept=None) -> complex:
    """A point strictly inside a simple closed curve, separated from it by more than tol."""
    v = _vertices(curve)
    tol = _tolerance(curve) if tol is None else tol
    for p in probe_candidates(v):
        if distance_to_curve(v, [p])[0] > tol and (accept is None or accept(p)):
            return p
    raise DegenerateCurve("no interior point separable from the curve at tolerance")


def orientation(curve) -> Orientation:
    """POSITIVE iff the curve winds +1 about an interior probe point."""
    v = _vertices(curve)
    p = interior_probe(curve)
    w = int(np.rint(_angle_sum(v, [p])[0] / (2 * np.pi)))
    if w == 1:
        return Orientation.POSITIVE
    if w == -1:
        return Orientation.NEGATIVE
    raise DegenerateCurve(f"interior probe has winding number {w}; curve is not simple")


def signed_area(curve) -> float:
    v = _vertices(curve)
    w = np.roll(v, -1)
    return 0.5 * float(np.sum(_cross(v, w)))


def point_in_face(outer, holes, p: complex) -> bool:
    """True iff p lies inside the outer curve and outside every hole curve."""
    if winding_number(outer, p) != 1:
        return False
    return all(winding_number(h, p) == 0 for h in holes)


def points_in_face(outer, holes, points, tol=None) -> np.ndarray:
    """Vectorized point_in_face; points on a boundary count as inside."""
    pts = np.atleast_1d(np.asarray(points, dtype=complex)).ravel()
    tol = _tolerance(outer) if tol is None else tol
    inside = np.rint(_angle_sum(_vertices(outer), pts) / (2 * np.pi)) != 0
    for h in holes:
        inside &= np.rint(_angle_sum(_vertices(h), pts) / (2 * np.pi)) == 0
    on = distance_to_curve(outer, pts) <= tol
    for h in holes:
        on |= distance_to_curve(h, pts) <= tol
    return inside | on


def is_simple(curve, tol=None) -> bool:
    """No two non-adjacent edges come within tol of each other."""
    v = _vertices(curve)
    tol = _tolerance(curve) if tol is None else tol
    n = v.size
    a0, a1 = v, np.roll(v, -1)
    ii, jj = np.triu_indices(n, k=2)
    keep = ~((ii == 0) & (jj == n - 1))
    ii, jj = ii[keep], jj[keep]
    for s in range(0, ii.size, _CHUNK):
        i, j = ii[s:s + _CHUNK], jj[s:s + _CHUNK]
        d, _ = _segment_pairs(a0[i], a1[i], a0[j], a1[j])
        if d.min() <= tol:
            return False
    return True
