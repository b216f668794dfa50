"""Iterated images of compact regions, pairwise disjointness, run-away index sets.

Images are tracked in local frames (see ``CompactRegion``): every boundary
vertex keeps its source point on K and its offset from the frame anchor, and
each step applies the map's scaled increment, so an image that has shrunk far
below double-precision spacing around an attracting point is still resolved.
When an orbit converges to an attracting fixed point the anchor is pinned
there; otherwise it follows the orbit of K's centre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .argument import ZeroCount, zero_count  # noqa: F401  (re-exported)
from .domains import CompactRegion, DomainSpec, Face, is_omega_convex, omega_convexity_of_union
from .errors import (DegenerateCurve, InvalidPolyline, OrientationLost, PoleHit,
                     RefinementBudgetExceeded)
from .geometry import (INCIDENCE_TOL, SEPARATION_TOL, ClosedPolyline, Orientation, cldexp,
                       closest_approach, distance_to_curve, interior_probe, orientation)
from .symbols import IterateSpec, MapExpr, fixed_points, simplify

REFINE_REL = 1e-3          # max image edge, relative to image diameter
DRIFT_REL = 1e-6           # accumulated-error budget, relative to image diameter
DRIFT_EVERY = 16           # steps between drift checks
MAX_VERTICES = 60_000      # per image region
FRAGILE_FACTOR = 10.0      # margins below this many tolerances are fragile
RELATIVE_MARGIN_CAP = 1e12
UNRESOLVED_REL = 1e-7      # a region smaller than this (relative to coordinates) is a blob
BLOB_RATIO = 1e-2          # blob bound used when radius <= this * distance


def _exp_for(x: float) -> int:
    return math.frexp(x)[1] if x > 0 and math.isfinite(x) else 0


def _bbox_center(z: np.ndarray) -> complex:
    return complex(0.5 * (z.real.min() + z.real.max()), 0.5 * (z.imag.min() + z.imag.max()))


def _diag(z: np.ndarray) -> float:
    return math.hypot(z.real.max() - z.real.min(), z.imag.max() - z.imag.min())


def attracting_anchor(m: MapExpr, K: CompactRegion, steps: int = 4000):
    """An attracting fixed point the orbit of K's centre converges to, or None."""
    c = _bbox_center(K.absolute().all_vertices())
    for p in fixed_points(m):
        p = complex(p)
        if not np.isfinite(p):
            continue
        try:
            if abs(m.derivative(p)) >= 1 or abs(m.eval(p) - p) > 1e-14 * max(1.0, abs(p)):
                continue
            z = c
            for _ in range(steps):
                z = m.eval(z)
                if abs(z - p) <= 1e-12 * max(1.0, abs(p)):
                    return p
        except PoleHit:
            continue
    return None


class ImageTracker:
    """Follows phi^n(K) for n = 0, 1, 2, ... one step at a time.

    ``anchor`` pins the frame at a fixed point (treated as exactly fixed);
    without it the anchor follows the orbit of K's bounding-box centre.
    """

    def __init__(self, m: MapExpr, K: CompactRegion, anchor: complex | None = None,
                 refine_rel: float = REFINE_REL, max_vertices: int = MAX_VERTICES):
        self.map = simplify(m)
        K = K.absolute()
        self.structure = [len(f.holes) for f in K.faces]
        self.pinned = anchor is not None
        pts = K.all_vertices()
        a = complex(anchor) if self.pinned else _bbox_center(pts)
        e = _exp_for(float(np.abs(pts - a).max()))
        self.history = [(a, e)]
        self.src = [np.array(c.vertices) for c in K.curves()]
        self.off = [cldexp(s - a, -e) for s in self.src]
        self.refine_rel = refine_rel
        self.max_vertices = max_vertices
        self.n = 0
        self.fresh_recomputes = 0
        self.evaluations = 0

    @property
    def frame(self):
        return self.history[-1]

    def _advance(self, a, e, v):
        w = self.map.delta(a, e, v)
        self.evaluations += np.size(v)
        return w

    def fresh(self, z) -> np.ndarray:
        """Offsets of phi^n(z) in the current frame, recomputed from the source points."""
        a0, e0 = self.history[0]
        s = cldexp(np.asarray(z, dtype=complex) - a0, -e0)
        for (a, e), (_, e_next) in zip(self.history[:-1], self.history[1:]):
            s = cldexp(self._advance(a, e, s), e - e_next)
        return s

    def step(self):
        a, e = self.frame
        try:
            w = [self._advance(a, e, v) for v in self.off]
            a_next = a if self.pinned else complex(self.map.eval(a))
        except PoleHit as exc:
            raise PoleHit(str(exc), step=self.n + 1) from exc
        mx = max(float(np.abs(x).max()) for x in w)
        if not (math.isfinite(mx) and mx > 0):
            raise OrientationLost(f"image collapsed or diverged at step {self.n + 1}")
        e_next = e + _exp_for(mx)
        self.off = [cldexp(x, e - e_next) for x in w]
        self.history.append((a_next, e_next))
        self.n += 1
        self._refine()
        if self.n % DRIFT_EVERY == 0:
            self._check_drift()
        return self

    def _local_diameter(self) -> float:
        return _diag(np.concatenate(self.off))

    def _refine(self):
        thr = self.refine_rel * self._local_diameter()
        for i in range(len(self.off)):
            for _ in range(64):
                v, s = self.off[i], self.src[i]
                bad = np.flatnonzero(np.abs(np.roll(v, -1) - v) > thr)
                if bad.size == 0:
                    break
                nxt = (bad + 1) % s.size
                mids = 0.5 * (s[bad] + s[nxt])
                if np.any((mids == s[bad]) | (mids == s[nxt])):
                    raise RefinementBudgetExceeded("source segments exhausted at machine resolution")
                if sum(x.size for x in self.off) + bad.size > self.max_vertices:
                    raise RefinementBudgetExceeded(
                        f"image needs more than {self.max_vertices} vertices at step {self.n}")
                self.src[i] = np.insert(s, bad + 1, mids)
                self.off[i] = np.insert(v, bad + 1, self.fresh(mids))
            else:
                raise RefinementBudgetExceeded("refinement did not converge")

    def _check_drift(self):
        tol = DRIFT_REL * self._local_diameter()
        for i, (s, v) in enumerate(zip(self.src, self.off)):
            idx = np.linspace(0, s.size - 1, 8).astype(int)
            if np.max(np.abs(self.fresh(s[idx]) - v[idx])) > tol:
                self.off = [self.fresh(x) for x in self.src]
                self.fresh_recomputes += 1
                return

    def region(self) -> CompactRegion:
        """Current image as a framed region; orientation re-verified on every curve."""
        a, e = self.frame
        tol = INCIDENCE_TOL * self._local_diameter()
        curves = []
        for i, v in enumerate(self.off):
            keep = np.abs(np.roll(v, -1) - v) > tol
            if not keep.all():
                self.src[i], self.off[i] = self.src[i][keep], v[keep]
                v = self.off[i]
            try:
                c = ClosedPolyline(v, tol)
                if orientation(c) is not Orientation.POSITIVE:
                    raise OrientationLost(f"image curve {i} reversed at step {self.n}")
            except (InvalidPolyline, DegenerateCurve) as exc:
                raise OrientationLost(f"image curve {i} degenerate at step {self.n}: {exc}") from exc
            curves.append(c)
        faces, k = [], 0
        for nh in self.structure:
            faces.append(Face(curves[k], tuple(curves[k + 1:k + 1 + nh])))
            k += 1 + nh
        return CompactRegion(tuple(faces), a, e)


def image_of_compact(s: IterateSpec, K: CompactRegion, anchor: complex | None = None,
                     refine_rel: float = REFINE_REL) -> CompactRegion:
    """phi^n(K) with face and hole structure preserved (framed; call .absolute() for plain coordinates)."""
    if s.n == 0:
        return K
    if anchor is None:
        anchor = attracting_anchor(s.base, K)
    t = ImageTracker(s.base, K, anchor, refine_rel)
    for _ in range(s.n):
        t.step()
    return t.region()


# ---------------------------------------------------------------------------
# disjointness

@dataclass(frozen=True)
class Disjoint:
    margin: float            # absolute separation (0.0 only through underflow)
    relative_margin: float   # separation / smaller diameter, capped
    log10_margin: float
    pair: tuple = (0, 1)     # pair attaining the margin

    disjoint = True

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Overlapping:
    pair: tuple
    witness: complex
    reason: str = "boundary"   # "boundary", "containment" or "unresolved"

    disjoint = False

    def __bool__(self):
        return False


def _scale(R: CompactRegion) -> int:
    return R.scale_exp + _exp_for(R.diameter())


def _face_probes(R: CompactRegion):
    out = []
    for f in R.faces:
        def free(p, f=f):
            for h in f.holes:
                if abs(np.angle((np.roll(h.vertices, -1) - p) / (h.vertices - p)).sum()) > np.pi:
                    return False
                if distance_to_curve(h, [p])[0] <= h.tolerance:
                    return False
            return True
        out.append(interior_probe(f.outer, accept=free))
    return out


def _pair_check(A: CompactRegion, B: CompactRegion, probes_a, probes_b, tol: float):
    """(distance in A's units, relative margin, witness in absolute coords, reason) for one pair."""
    if _scale(B) > _scale(A):
        d, rel, wit, reason = _pair_check(B, A, probes_b, probes_a, tol)
        return ldexp_units(d, B, A), rel, wit, reason
    diam_a = A.diameter()
    diam_b = math.ldexp(B.diameter(), B.scale_exp - A.scale_exp)
    small = min(diam_a, diam_b)
    cb = [A.from_frame(c.vertices, B) for c in B.curves()]
    if not all(np.all(np.isfinite(c)) for c in cb):
        # B sits astronomically far away in A's units: compare absolute anchors
        gap = abs(B.anchor - A.anchor)
        return math.ldexp(1.0, 1023), RELATIVE_MARGIN_CAP, None, None if gap > 0 else "unresolved"
    coord = max(float(np.abs(A.all_vertices()).max()), max(float(np.abs(c).max()) for c in cb))
    best, wit = _blob_bound(A, cb)
    if best is None:
        best, wit = math.inf, 0j
        for ca in A.curves():
            for c in cb:
                dd, w = closest_approach(ca.vertices, c)
                if dd < best:
                    best, wit = dd, w
    if best <= tol * small:
        return best, 0.0, complex(A.to_absolute([wit])[0]), "boundary"
    for p in probes_b:
        q = A.from_frame([p], B)
        if np.all(np.isfinite(q)) and A.contains(q)[0]:
            return best, 0.0, complex(B.to_absolute([p])[0]), "containment"
    for p in probes_a:
        q = B.from_frame([p], A)
        if np.all(np.isfinite(q)) and B.contains(q)[0]:
            return best, 0.0, complex(A.to_absolute([p])[0]), "containment"
    if diam_b < UNRESOLVED_REL * coord and best <= 1e3 * UNRESOLVED_REL * coord:
        return best, 0.0, complex(A.to_absolute([wit])[0]), "unresolved"
    rel = min(best / small, RELATIVE_MARGIN_CAP) if small > 0 else RELATIVE_MARGIN_CAP
    return best, rel, None, None


def _blob_bound(A: CompactRegion, cb):
    """Lower bound on the distance from A's curves to a set small compared with its distance.

    Returns (bound, witness) when B fits in a disk of radius r around its
    centre c with r at most BLOB_RATIO times dist(A, c); the bound
    dist(A, c) - r then holds by the triangle inequality.  Otherwise (None, None).
    """
    pts = np.concatenate(cb)
    c = _bbox_center(pts)
    r = float(np.abs(pts - c).max())
    dc = min(float(distance_to_curve(ca, [c])[0]) for ca in A.curves())
    if r <= BLOB_RATIO * dc:
        return dc - r, c
    return None, None


def ldexp_units(d: float, src: CompactRegion, dst: CompactRegion) -> float:
    return math.ldexp(d, src.scale_exp - dst.scale_exp)


def pairwise_disjoint(regions, tol: float = SEPARATION_TOL):
    """Disjoint iff every pair is separated by more than tol times the smaller diameter
    and no region contains a probe point of another."""
    regions = list(regions)
    if len(regions) < 2:
        raise ValueError("pairwise_disjoint needs at least two regions")
    probes = [_face_probes(R) for R in regions]
    best = None
    for i in range(len(regions)):
        for j in range(i + 1, len(regions)):
            A, B = regions[i], regions[j]
            d, rel, wit, reason = _pair_check(A, B, probes[i], probes[j], tol)
            if reason is not None:
                return Overlapping((i, j), wit if wit is not None else complex("nan"), reason)
            abs_d = math.ldexp(d, A.scale_exp) if d < math.ldexp(1.0, 1023) else math.inf
            log10 = (math.log10(d) + A.scale_exp * math.log10(2)) if d > 0 else -math.inf
            if best is None or rel < best[1]:
                best = (abs_d, rel, log10, (i, j))
    return Disjoint(best[0], best[1], best[2], best[3])


# ---------------------------------------------------------------------------
# run-away index sets

@dataclass(frozen=True)
class MemberEvidence:
    n: int
    margin: float                 # relative separation margin (scale-free)
    log10_margin: float           # log10 of the absolute separation
    convexity_checked: bool
    union_convex: bool | None = None
    fragile: bool = False

    def to_dict(self):
        return {"n": self.n, "margin": self.margin, "log10_margin": self.log10_margin,
                "convexity_checked": self.convexity_checked, "union_convex": self.union_convex,
                "fragile": self.fragile}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass(frozen=True)
class Rejection:
    n: int
    reason: str        # "overlap", "not_omega_convex" or "undetermined"
    detail: str = ""

    def to_dict(self):
        return {"n": self.n, "reason": self.reason, "detail": self.detail}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass(frozen=True)
class IndexSetSample:
    """A subset of {1, ..., horizon} with per-index evidence."""

    horizon: int
    members: tuple
    evidence: tuple = ()
    rejections: tuple = ()
    work: dict = field(default_factory=dict)

    def __post_init__(self):
        m = tuple(sorted(int(x) for x in self.members))
        object.__setattr__(self, "members", m)
        if self.horizon < 1:
            raise ValueError("horizon must be positive")
        if m and (m[0] < 1 or m[-1] > self.horizon) or len(set(m)) != len(m):
            raise ValueError("members must be distinct integers in [1, horizon]")
        for ev in self.evidence:
            if not ev.margin > 0:
                raise ValueError(f"member {ev.n} has a non-positive margin")

    __hash__ = None

    @property
    def undetermined(self) -> tuple:
        return tuple(r.n for r in self.rejections if r.reason == "undetermined")

    @property
    def first_member(self):
        return self.members[0] if self.members else None

    @property
    def internal_inconsistencies(self) -> tuple:
        return tuple(ev.n for ev in self.evidence if ev.union_convex is False)

    def to_dict(self):
        return {"horizon": self.horizon, "members": list(self.members),
                "evidence": [e.to_dict() for e in self.evidence],
                "rejections": [r.to_dict() for r in self.rejections],
                "work": dict(self.work)}

    @classmethod
    def from_dict(cls, d):
        return cls(d["horizon"], tuple(d["members"]),
                   tuple(MemberEvidence.from_dict(e) for e in d.get("evidence", [])),
                   tuple(Rejection.from_dict(r) for r in d.get("rejections", [])),
                   dict(d.get("work", {})))


def shared_anchors(maps, K: CompactRegion) -> list:
    """Attracting anchors per map, with numerically equal points merged so that
    images converging to the same point share one exact frame origin."""
    out = []
    for m in maps:
        p = attracting_anchor(simplify(m), K)
        if p is not None:
            for q in out:
                if q is not None and abs(q - p) <= 1e-12 * max(1.0, abs(p)):
                    p = q
                    break
        out.append(p)
    return out


def run_away_set(maps, K: CompactRegion, H: int, d: DomainSpec | None = None,
                 require_convexity: bool = False, tol: float = SEPARATION_TOL,
                 refine_rel: float = REFINE_REL, on_step=None) -> IndexSetSample:
    """Indices n in [1, H] with K, phi_1^n(K), ..., phi_N^n(K) pairwise disjoint
    (and, if required, every image Omega-convex in d).

    Indices where an image could not be computed are recorded as undetermined,
    never as members.  ``on_step(n, images)`` is called after each index.
    """
    if require_convexity and d is None:
        raise ValueError("convexity checks need a domain")
    K = K.absolute()
    anchors = shared_anchors(maps, K)
    trackers = [ImageTracker(m, K, a, refine_rel) for m, a in zip(maps, anchors)]
    failed = None
    members, evidence, rejections = [], [], []
    for n in range(1, H + 1):
        if failed is None:
            try:
                images = [t.step().region() for t in trackers]
            except (PoleHit, RefinementBudgetExceeded, OrientationLost) as exc:
                failed = f"{type(exc).__name__}: {exc}"
        if failed is not None:
            rejections.append(Rejection(n, "undetermined", failed))
            continue
        if on_step is not None:
            on_step(n, images)
        res = pairwise_disjoint([K] + images, tol)
        if not res:
            rejections.append(Rejection(n, "overlap", f"{res.reason} {res.pair}"))
            continue
        union = None
        if require_convexity:
            bad = [(i, c.hole_id) for i, c in
                   ((i, is_omega_convex(img, d)) for i, img in enumerate(images)) if not c]
            if bad:
                rejections.append(Rejection(n, "not_omega_convex", f"image {bad[0][0]} {bad[0][1]}"))
                continue
            union = bool(omega_convexity_of_union([K] + images, d))
        margin = res.relative_margin
        members.append(n)
        evidence.append(MemberEvidence(n, margin, res.log10_margin, require_convexity, union,
                                       margin < FRAGILE_FACTOR * tol))
    work = {"map_evaluations": int(sum(t.evaluations for t in trackers)),
            "fresh_recomputes": int(sum(t.fresh_recomputes for t in trackers)),
            "pinned_anchors": sum(a is not None for a in anchors)}
    return IndexSetSample(H, tuple(members), tuple(evidence), tuple(rejections), work)
