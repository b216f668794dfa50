"""Independent reference computations used to freeze expected values.

Nothing here imports the package's geometry or dynamics code; each oracle
reaches its answer by a different route (conjugation to a translation, dense
brute force, ray casting, finite differences).
"""

from __future__ import annotations

import numpy as np

LOG3 = np.log(3.0)


def strip_coordinate(z):
    """L(z) = log((1+z)/(1-z)) conjugates (z + 1/2)/(z/2 + 1) to w -> w + log 3."""
    z = np.asarray(z, dtype=complex)
    return np.log((1 + z) / (1 - z))


def segments_min_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Minimum distance between the closed polygons a and b, all segment pairs."""
    def seg_pt(p, q, x):
        d = q - p
        t = np.clip(((x - p) * np.conj(d)).real / np.maximum(np.abs(d) ** 2, 1e-300), 0, 1)
        return np.abs(p + t * d - x)

    a2, b2 = np.roll(a, -1), np.roll(b, -1)
    best = np.inf
    for p, q, x in ((a[:, None], a2[:, None], b[None, :]), (b[:, None], b2[:, None], a[None, :])):
        best = min(best, float(seg_pt(p, q, x).min()))
    # proper crossings give distance zero
    pa, qa = a[:, None], a2[:, None]
    pb, qb = b[None, :], b2[None, :]

    def cross(u, v):
        return (np.conj(u) * v).imag

    d1 = cross(qa - pa, pb - pa)
    d2 = cross(qa - pa, qb - pa)
    d3 = cross(qb - pb, pa - pb)
    d4 = cross(qb - pb, qa - pb)
    if np.any((d1 * d2 < 0) & (d3 * d4 < 0)):
        return 0.0
    return best


def ray_cast_inside(poly: np.ndarray, pts) -> np.ndarray:
    """Even-odd rule with a horizontal ray to the right."""
    pts = np.asarray(pts, dtype=complex).ravel()
    x, y = pts.real[:, None], pts.imag[:, None]
    x1, y1 = poly.real[None, :], poly.imag[None, :]
    x2, y2 = np.roll(poly.real, -1)[None, :], np.roll(poly.imag, -1)[None, :]
    straddle = (y1 > y) != (y2 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
    return (np.count_nonzero(straddle & (x < xi), axis=1) % 2) == 1


def face_oracle(outer: np.ndarray, holes, pts) -> np.ndarray:
    inside = ray_cast_inside(outer, pts)
    for h in holes:
        inside &= ~ray_cast_inside(h, pts)
    return inside


def circle_points(c: complex, r: float, n: int, turns: int = 1) -> np.ndarray:
    t = 2 * np.pi * turns * np.arange(n * turns) / (n * turns)
    return c + r * np.exp(1j * t)


def dense_argument_count(f, c: complex, r: float, n: int = 4096, clockwise: bool = False) -> float:
    """(1/2 pi) times the unwrapped argument change of f on a densely sampled circle."""
    t = 2 * np.pi * np.arange(n + 1) / n
    if clockwise:
        t = -t
    w = np.asarray(f(c + r * np.exp(1j * t)), dtype=complex)
    return float(np.unwrap(np.angle(w))[-1] - np.angle(w[0])) / (2 * np.pi)


def central_difference(f, z: complex, h: float = 1e-6) -> complex:
    return (f(z + h) - f(z - h)) / (2 * h)


def hyperbolic_pair_members(radius: float, horizon: int, vertices: int = 1024) -> list:
    """Run-away indices of disk(0, radius) under phi and phi o phi, phi = (z + 1/2)/(z/2 + 1).

    In strip coordinates the images are translates of L(K) by n log 3 and
    2n log 3, so disjointness is tested on the translates of one polygon,
    sampled at 4x the default boundary resolution.
    """
    P = strip_coordinate(circle_points(0, radius, vertices))
    out = []
    for n in range(1, horizon + 1):
        shifts = (0.0, n * LOG3, 2 * n * LOG3)
        ok = True
        for i in range(3):
            for j in range(i + 1, 3):
                A, B = P + shifts[i], P + shifts[j]
                # translates of a polygon symmetric about both axes: compare spans first
                if B.real.min() > A.real.max() + 1e-9:
                    continue
                if segments_min_distance(A, B) == 0.0 or ray_cast_inside(A, B[:1])[0]:
                    ok = False
        if ok:
            out.append(n)
    return out
