"""Domains with declared connectivity, compact regions with holes, Omega-convexity.

A compact region is a finite set of faces; each face is an outer curve minus
the interiors of its hole curves.  Every curve is stored positively oriented.

Regions may live in a local *frame*: a vertex ``v`` stands for the point
``anchor + 2**scale_exp * v``.  Frames let iterated images that shrink toward
an attracting point keep full relative precision; user-built regions use the
trivial frame (anchor 0, exponent 0).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import shapely
from shapely.geometry import Point, Polygon
from shapely.geometry.polygon import orient

from .errors import (DegenerateCurve, DegenerateHole, InsufficientTopology, InvalidDomain,
                     InvalidRegion, MarginCollapse)
from .geometry import (DEFAULT_VERTICES, INCIDENCE_TOL, ClosedPolyline, Orientation, _angle_sum,
                       circle, cldexp, distance_to_curve, interior_probe, is_simple,
                       min_separation, orientation)

ENLARGE_MARGIN = 0.10   # hole ring around an excluded disk, relative to its radius
CARVE_QUAD_SEGS = 16    # quarter-circle segments for carved holes (64 vertices)
OUTER_QUAD_SEGS = 64    # quarter-circle segments for outer boundaries (256 vertices)


# ---------------------------------------------------------------------------
# domains

@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise InvalidDomain("disk radius must be positive")


class ConnectivityClass(enum.Enum):
    SIMPLY_CONNECTED = "simply_connected"
    FINITELY_CONNECTED = "finitely_connected"
    INFINITELY_CONNECTED = "infinitely_connected"


@dataclass(frozen=True)
class DomainSpec:
    """Omega = base minus closed excluded disks.  ``base=None`` is the full plane.

    For an infinitely connected Omega the excluded list is a finite truncation
    of an infinite family; ``truncation_note`` says so and every verdict on
    such a domain holds only at that truncation.
    """

    base: Disk | None
    excluded: tuple = ()
    declared_class: ConnectivityClass = ConnectivityClass.SIMPLY_CONNECTED
    truncation_note: str = ""

    def __post_init__(self):
        ex = tuple(self.excluded)
        object.__setattr__(self, "excluded", ex)
        cls = ConnectivityClass(self.declared_class)
        object.__setattr__(self, "declared_class", cls)
        for i, e in enumerate(ex):
            if self.base is not None and abs(e.center - self.base.center) + e.radius >= self.base.radius:
                raise InvalidDomain(f"excluded[{i}] is not strictly inside the base disk")
            for j in range(i):
                f = ex[j]
                if abs(e.center - f.center) <= e.radius + f.radius:
                    raise InvalidDomain(f"excluded[{j}] and excluded[{i}] intersect")
        if cls is ConnectivityClass.SIMPLY_CONNECTED and ex:
            raise InvalidDomain("a simply connected domain has no excluded components")
        if cls is ConnectivityClass.FINITELY_CONNECTED and (not ex or self.truncation_note):
            raise InvalidDomain("finitely connected: need >= 1 excluded component and no truncation note")
        if cls is ConnectivityClass.INFINITELY_CONNECTED and not self.truncation_note:
            raise InvalidDomain("infinitely connected: the truncation note is required")
        if cls is not ConnectivityClass.INFINITELY_CONNECTED and self.truncation_note:
            raise InvalidDomain("truncation note only applies to infinitely connected domains")

    @property
    def k(self) -> int:
        return len(self.excluded)

    @property
    def is_full_plane(self) -> bool:
        return self.base is None

    def contains(self, z, tol: float = 0.0) -> np.ndarray:
        """Membership in Omega, relaxed by tol (tol > 0 admits the boundary)."""
        z = np.asarray(z, dtype=complex)
        ok = np.isfinite(z)
        if self.base is not None:
            ok &= np.abs(z - self.base.center) < self.base.radius + tol
        for e in self.excluded:
            ok &= np.abs(z - e.center) > e.radius - tol
        return ok

    def in_excluded(self, z, tol: float = 0.0) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        hit = np.zeros(z.shape, dtype=bool)
        for e in self.excluded:
            hit |= np.abs(z - e.center) <= e.radius - tol
        return hit

    def sampling_disk(self) -> Disk:
        if self.base is not None:
            return self.base
        r = max([4.0] + [2 * (abs(e.center) + e.radius) for e in self.excluded])
        return Disk(0j, r)

    def interior_samples(self, count: int, seed: int = 0) -> np.ndarray:
        """Quasi-random points of Omega (scrambled Halton, reproducible from seed)."""
        from scipy.stats import qmc

        disk = self.sampling_disk()
        sampler = qmc.Halton(d=2, scramble=True, seed=seed)
        out = []
        while sum(len(o) for o in out) < count:
            u = sampler.random(2 * count)
            z = disk.center + disk.radius * np.sqrt(u[:, 0]) * 0.999 * np.exp(2j * np.pi * u[:, 1])
            out.append(z[self.contains(z)])
        return np.concatenate(out)[:count]

    def boundary_samples(self, per_curve: int = 64) -> np.ndarray:
        t = np.exp(2j * np.pi * np.arange(per_curve) / per_curve)
        parts = [] if self.base is None else [self.base.center + self.base.radius * t]
        parts += [e.center + e.radius * t for e in self.excluded]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)


def unit_disk() -> DomainSpec:
    return DomainSpec(Disk(0j, 1.0))


def full_plane() -> DomainSpec:
    return DomainSpec(None)


def annulus(inner: float, outer: float, center: complex = 0j) -> DomainSpec:
    return DomainSpec(Disk(center, outer), (Disk(center, inner),),
                      ConnectivityClass.FINITELY_CONNECTED)


# ---------------------------------------------------------------------------
# compact regions

@dataclass(frozen=True)
class Face:
    outer: ClosedPolyline
    holes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "holes", tuple(self.holes))

    def curves(self):
        return (self.outer,) + self.holes


@dataclass(frozen=True)
class CompactRegion:
    faces: tuple
    anchor: complex = 0j
    scale_exp: int = 0

    def __post_init__(self):
        faces = tuple(self.faces)
        if not faces:
            raise InvalidRegion("a compact region needs at least one face")
        object.__setattr__(self, "faces", faces)
        object.__setattr__(self, "anchor", complex(self.anchor))
        object.__setattr__(self, "scale_exp", int(self.scale_exp))

    __hash__ = None

    @property
    def is_absolute(self) -> bool:
        return self.anchor == 0 and self.scale_exp == 0

    def curves(self):
        for f in self.faces:
            yield from f.curves()

    def hole_count(self) -> int:
        return sum(len(f.holes) for f in self.faces)

    def vertex_count(self) -> int:
        return sum(len(c) for c in self.curves())

    def all_vertices(self) -> np.ndarray:
        return np.concatenate([c.vertices for c in self.curves()])

    def bbox(self):
        v = np.concatenate([f.outer.vertices for f in self.faces])
        return v.real.min(), v.imag.min(), v.real.max(), v.imag.max()

    def diameter(self) -> float:
        """Bounding-box diagonal in local frame units."""
        x0, y0, x1, y1 = self.bbox()
        return math.hypot(x1 - x0, y1 - y0)

    def to_local(self, z) -> np.ndarray:
        """Absolute points expressed in this region's frame."""
        return cldexp(np.asarray(z, dtype=complex) - self.anchor, -self.scale_exp)

    def to_absolute(self, v) -> np.ndarray:
        return self.anchor + cldexp(v, self.scale_exp)

    def from_frame(self, v, other: "CompactRegion") -> np.ndarray:
        """Local points of ``other`` expressed in this region's frame."""
        return (cldexp(other.anchor - self.anchor, -self.scale_exp)
                + cldexp(v, other.scale_exp - self.scale_exp))

    def contains(self, v, tol: float = 0.0) -> np.ndarray:
        """Local points inside some face (boundary within tol counts as inside)."""
        v = np.atleast_1d(np.asarray(v, dtype=complex)).ravel()
        out = np.zeros(v.size, dtype=bool)
        with np.errstate(invalid="ignore"):
            finite = np.isfinite(v)
        for f in self.faces:
            w = v[finite]
            ins = np.rint(_angle_sum(f.outer.vertices, w) / (2 * np.pi)) != 0
            for h in f.holes:
                ins &= np.rint(_angle_sum(h.vertices, w) / (2 * np.pi)) == 0
            if tol > 0:
                for c in f.curves():
                    ins |= distance_to_curve(c, w) <= tol
            out[finite] |= ins
        return out

    def absolute(self) -> "CompactRegion":
        if self.is_absolute:
            return self
        faces = tuple(Face(ClosedPolyline(self.to_absolute(f.outer.vertices), f.outer.tolerance),
                           tuple(ClosedPolyline(self.to_absolute(h.vertices), h.tolerance)
                                 for h in f.holes)) for f in self.faces)
        return CompactRegion(faces)

    def validate(self, check_simple: bool = True) -> "CompactRegion":
        """Check orientation, simplicity, hole containment and face disjointness."""
        for fi, f in enumerate(self.faces):
            for c in f.curves():
                if check_simple and not is_simple(c):
                    raise InvalidRegion(f"face {fi}: curve is not simple")
                if orientation(c) is not Orientation.POSITIVE:
                    raise InvalidRegion(f"face {fi}: curves must be positively oriented")
            for hi, h in enumerate(f.holes):
                if np.any(np.rint(_angle_sum(f.outer.vertices, h.vertices) / (2 * np.pi)) != 1):
                    raise InvalidRegion(f"face {fi}: hole {hi} is not strictly inside the outer curve")
                if min_separation(h, f.outer) <= h.tolerance:
                    raise InvalidRegion(f"face {fi}: hole {hi} touches the outer curve")
                for hj in range(hi):
                    g = f.holes[hj]
                    if (min_separation(h, g) <= h.tolerance
                            or _angle_sum(g.vertices, h.vertices[:1])[0] > np.pi
                            or _angle_sum(h.vertices, g.vertices[:1])[0] > np.pi):
                        raise InvalidRegion(f"face {fi}: holes {hj} and {hi} overlap")
        for fi, f in enumerate(self.faces):
            for fj in range(fi):
                g = self.faces[fj]
                if min_separation(f.outer, g.outer) <= f.outer.tolerance:
                    raise InvalidRegion(f"faces {fj} and {fi} touch")
                if (abs(_angle_sum(g.outer.vertices, f.outer.vertices[:1])[0]) > np.pi
                        or abs(_angle_sum(f.outer.vertices, g.outer.vertices[:1])[0]) > np.pi):
                    raise InvalidRegion(f"faces {fj} and {fi} are nested")
        return self

    def within(self, d: DomainSpec, tol: float = 0.0) -> bool:
        """Boundary samples (and thus the region, for disk exclusions) lie in Omega."""
        z = self.to_absolute(self.all_vertices())
        if not np.all(d.contains(z, -tol)):
            return False
        # an excluded disk swallowed by a face (not by a hole) also breaks containment
        for e in d.excluded:
            if self.contains(self.to_local([e.center]))[0]:
                return False
        return True


def disk_region(center: complex, radius: float, n: int = DEFAULT_VERTICES) -> CompactRegion:
    return CompactRegion((Face(circle(center, radius, n)),))


def annulus_region(center: complex, inner: float, outer: float, n: int = DEFAULT_VERTICES) -> CompactRegion:
    return CompactRegion((Face(circle(center, outer, n), (circle(center, inner, n),)),))


# ---------------------------------------------------------------------------
# holes and Omega-convexity

@dataclass(frozen=True)
class HoleDescriptor:
    hole_id: str
    boundary: ClosedPolyline
    probe: complex  # local coordinates of the owning region


@dataclass(frozen=True)
class OmegaConvexity:
    convex: bool
    hole_id: str | None = None

    def __bool__(self):
        return self.convex


def _nested_faces(regions, ri, h):
    """(region index, face) pairs lying inside hole curve h of regions[ri]."""
    R = regions[ri]
    out = []
    for rj, S in enumerate(regions):
        for g in S.faces:
            if g.outer is h:
                continue
            p = R.from_frame(g.outer.vertices[:1], S)
            if not np.all(np.isfinite(p)):
                continue
            if abs(_angle_sum(h.vertices, p)[0]) > np.pi:
                out.append((rj, g))
    return out


def _in_component(regions, ri, h, nested, z_abs) -> bool:
    """Absolute point z lies inside hole h of regions[ri] but in no nested face."""
    R = regions[ri]
    p = R.to_local([z_abs])
    if not np.all(np.isfinite(p)) or abs(_angle_sum(h.vertices, p)[0]) <= np.pi:
        return False
    for rj, g in nested:
        q = regions[rj].to_local([z_abs])
        if np.all(np.isfinite(q)) and abs(_angle_sum(g.outer.vertices, q)[0]) > np.pi:
            return False
    return True


def holes_of(K: CompactRegion) -> list:
    """One descriptor per hole curve, with a probe point in that complementary component."""
    regions = [K]
    out = []
    for fi, f in enumerate(K.faces):
        for hi, h in enumerate(f.holes):
            nested = _nested_faces(regions, 0, h)

            def free(p, nested=nested):
                for _, g in nested:
                    if abs(_angle_sum(g.outer.vertices, [p])[0]) > np.pi:
                        return False
                    if distance_to_curve(g.outer, [p])[0] <= g.outer.tolerance:
                        return False
                return True

            try:
                probe = interior_probe(h, accept=free)
            except DegenerateCurve as exc:
                raise DegenerateHole(f"face {fi} hole {hi}: no separable probe point") from exc
            out.append(HoleDescriptor(f"face{fi}.hole{hi}", h, probe))
    return out


def _hole_meets_complement(regions, ri, h, d: DomainSpec) -> bool:
    R = regions[ri]
    if d.base is not None:
        z = R.to_absolute(h.vertices)
        if np.any(np.abs(z - d.base.center) > d.base.radius * (1 + 1e-12)):
            return True
    if not d.excluded:
        return False
    nested = _nested_faces(regions, ri, h)
    return any(_in_component(regions, ri, h, nested, e.center) for e in d.excluded)


def omega_convexity_of_union(regions, d: DomainSpec) -> OmegaConvexity:
    """Omega-convexity of the union of pairwise disjoint regions (frames may differ).

    Each complementary component bounded by a hole curve must contain a point
    of C minus Omega.  Excluded disks never meet the regions, so each lies in
    a single component and testing its center suffices.
    """
    regions = list(regions)
    many = len(regions) > 1
    for ri, R in enumerate(regions):
        for fi, f in enumerate(R.faces):
            for hi, h in enumerate(f.holes):
                if not _hole_meets_complement(regions, ri, h, d):
                    hid = f"face{fi}.hole{hi}"
                    return OmegaConvexity(False, f"region{ri}.{hid}" if many else hid)
    return OmegaConvexity(True)


def is_omega_convex(K: CompactRegion, d: DomainSpec) -> OmegaConvexity:
    return omega_convexity_of_union([K], d)


# ---------------------------------------------------------------------------
# constructive enlargement and exhaustion (polygon booleans via shapely)

def _to_shapely(K: CompactRegion):
    if not K.is_absolute:
        K = K.absolute()
    polys = [Polygon([(z.real, z.imag) for z in f.outer.vertices],
                     [[(z.real, z.imag) for z in h.vertices] for h in f.holes]) for f in K.faces]
    return shapely.union_all(polys) if len(polys) > 1 else polys[0]


def _ring_to_curve(coords, reverse: bool, tol: float) -> ClosedPolyline:
    z = np.array([complex(x, y) for x, y in coords[:-1]])
    if reverse:
        z = z[::-1]
    keep = np.abs(np.roll(z, -1) - z) > 10 * tol
    return ClosedPolyline(z[keep], tol)


def _from_shapely(geom, error=MarginCollapse, tol: float = INCIDENCE_TOL) -> CompactRegion:
    if geom.geom_type != "Polygon" or geom.is_empty:
        raise error("construction did not produce a single connected face")
    g = orient(geom, 1.0)
    outer = _ring_to_curve(list(g.exterior.coords), False, tol)
    holes = tuple(_ring_to_curve(list(r.coords), True, tol) for r in g.interiors)
    return CompactRegion((Face(outer, holes),))


def _disk_poly(center: complex, radius: float, quad_segs: int):
    return Point(center.real, center.imag).buffer(radius, quad_segs=quad_segs)


def _contains(L, Kp) -> bool:
    return L.buffer(1e-12).contains(Kp)


def enlarge_to_omega_convex(K: CompactRegion, d: DomainSpec, min_holes: int = 0) -> CompactRegion:
    """Connected Omega-convex L containing K with at least ``min_holes`` holes.

    L is a disk-shaped face enclosing K and the ``min_holes`` excluded disks
    nearest to K, padded by a quarter of its radius (less near the base
    boundary); every excluded disk inside the enclosure is carved out with a
    ring of ENLARGE_MARGIN times its radius.  Excluded disks straddling the
    enclosure become notches, not holes.
    """
    if min_holes > len(d.excluded):
        raise InsufficientTopology(f"domain supplies {len(d.excluded)} holes, {min_holes} requested")
    Kp = _to_shapely(K)
    dist = [Point(e.center.real, e.center.imag).distance(Kp) - e.radius for e in d.excluded]
    chosen = [d.excluded[i] for i in np.argsort(dist, kind="stable")[:min_holes]]
    pts = K.to_absolute(np.concatenate([f.outer.vertices for f in K.faces]))
    rim = np.exp(2j * np.pi * np.arange(16) / 16)
    extra = [e.center + e.radius * (1 + 2 * ENLARGE_MARGIN) * rim for e in chosen]
    pts = np.concatenate([pts] + extra)
    center = complex((pts.real.min() + pts.real.max()) / 2, (pts.imag.min() + pts.imag.max()) / 2)
    r_enc = float(np.abs(pts - center).max())
    pad = 0.25 * r_enc
    if d.base is not None:
        room = d.base.radius - abs(center - d.base.center) - r_enc
        if room <= 0:
            raise InsufficientTopology("enclosure of K and the chosen holes does not fit in the base")
        pad = min(pad, 0.5 * room)
    outer = _disk_poly(center, r_enc + pad, OUTER_QUAD_SEGS)
    carves = []
    for e in d.excluded:
        ep = _disk_poly(e.center, e.radius, CARVE_QUAD_SEGS)
        if not ep.intersects(outer):
            continue
        gap = Point(e.center.real, e.center.imag).distance(Kp) - e.radius
        ring = min(ENLARGE_MARGIN * e.radius, 0.5 * gap)
        if ring <= 0:
            raise InsufficientTopology("K meets an excluded component")
        carves.append(_disk_poly(e.center, e.radius + ring, CARVE_QUAD_SEGS))
    L = outer.difference(shapely.union_all(carves)) if carves else outer
    L_region = _from_shapely(L, InsufficientTopology)
    if not _contains(L, Kp):
        raise InsufficientTopology("enlargement failed to contain K")
    if L_region.hole_count() < min_holes:
        raise InsufficientTopology("carved holes merged; fewer holes than requested")
    return L_region


@dataclass(frozen=True)
class ExhaustionPlan:
    """Margins used by the exhaustion: base shrink 1/(l+l0), carve ring 1/(2(l+l0))."""

    l0: int
    base_scale: float  # full-plane: radius unit for the growing disk


def _exhaustion_geom(d: DomainSpec, t: float, plan: ExhaustionPlan):
    if d.base is not None:
        outer = _disk_poly(d.base.center, d.base.radius * (1 - 1 / t), OUTER_QUAD_SEGS)
    else:
        outer = _disk_poly(0j, plan.base_scale * t, OUTER_QUAD_SEGS)
    carves = [_disk_poly(e.center, e.radius * (1 + 1 / (2 * t)), CARVE_QUAD_SEGS)
              for e in d.excluded]
    carves = [c for c in carves if c.intersects(outer)]
    return outer.difference(shapely.union_all(carves)) if carves else outer


def exhaustion_plan(d: DomainSpec, K: CompactRegion) -> ExhaustionPlan:
    """Smallest l0 >= 1 with K inside the first exhaustion term."""
    Kp = _to_shapely(K)
    pts = K.to_absolute(np.concatenate([f.outer.vertices for f in K.faces]))
    scale = max([1.0, float(np.abs(pts).max())] + [abs(e.center) + e.radius for e in d.excluded])
    l0 = 1
    if d.base is not None:
        rho = float(np.abs(pts - d.base.center).max())
        if rho >= d.base.radius:
            raise MarginCollapse("K is not inside the base")
        l0 = max(l0, math.ceil(d.base.radius / (d.base.radius - rho)) - 1)
    for e in d.excluded:
        gap = Point(e.center.real, e.center.imag).distance(Kp) - e.radius
        if gap <= 0:
            raise MarginCollapse("K meets an excluded component")
        l0 = max(l0, math.ceil(e.radius / (2 * gap)) - 1)
    plan = ExhaustionPlan(l0, scale)
    for _ in range(64):
        if _contains(_exhaustion_geom(d, 1 + plan.l0, plan), Kp):
            return plan
        plan = ExhaustionPlan(plan.l0 + 1, scale)
    raise MarginCollapse("could not fit K into the first exhaustion term")


def exhaustion(d: DomainSpec, l: int, K: CompactRegion, plan: ExhaustionPlan | None = None) -> CompactRegion:
    """l-th term of a nested exhaustion of Omega by connected Omega-convex compacts containing K."""
    if l < 1:
        raise ValueError("exhaustion index starts at 1")
    plan = plan or exhaustion_plan(d, K)
    return _from_shapely(_exhaustion_geom(d, l + plan.l0, plan), MarginCollapse)


def fill_hole(K: CompactRegion, face: int, hole: int) -> CompactRegion:
    """K with one hole filled in."""
    faces = list(K.faces)
    f = faces[face]
    faces[face] = Face(f.outer, f.holes[:hole] + f.holes[hole + 1:])
    return CompactRegion(tuple(faces), K.anchor, K.scale_exp)


def union_regions(regions) -> CompactRegion:
    """Multi-face region made of absolute, pairwise disjoint regions."""
    faces = []
    for R in regions:
        faces.extend(R.absolute().faces)
    return CompactRegion(tuple(faces))
