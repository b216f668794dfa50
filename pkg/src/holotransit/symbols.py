"""Closed-form holomorphic symbols: Mobius, affine, polynomial and composite maps.

Every map evaluates on scalars or NumPy arrays, has an exact derivative, and
can evaluate *scaled increments*: for an anchor ``a`` and offsets ``v`` at
scale ``2**e`` it returns ``w`` with ``m(a + 2**e v) - m(a) = 2**e w``.
That form never subtracts nearby large numbers, which is what lets the
dynamics engine follow iterated images far below double-precision spacing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .argument import zero_count
from .domains import CompactRegion, ConnectivityClass, Disk, DomainSpec
from .errors import InvalidMap, NonIntegerResidual, PoleHit, ZeroOnContour
from .geometry import INCIDENCE_TOL, ClosedPolyline, cldexp

POLE_TOL = 1e-12


def _out(z_in, w):
    return complex(w) if np.ndim(z_in) == 0 else w


class MapExpr:
    """Base class; subclasses are frozen dataclasses."""

    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        raise NotImplementedError

    def derivative(self, z):
        raise NotImplementedError

    def delta(self, a: complex, e: int, v):
        raise NotImplementedError

    def as_mobius(self):
        """Matrix (a, b, c, d) when the map is a Mobius/affine composition, else None."""
        return None

    def as_polynomial(self):
        """Ascending coefficient array when the map is polynomial, else None."""
        return None

    def poles(self) -> list:
        return []

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Mobius(MapExpr):
    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for k in "abcd":
            object.__setattr__(self, k, complex(getattr(self, k)))
        det = self.a * self.d - self.b * self.c
        if abs(det) <= INCIDENCE_TOL:
            raise InvalidMap("Mobius map needs ad - bc != 0")

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def _den(self, z, step=None):
        den = self.c * z + self.d
        if np.any(np.abs(den) <= POLE_TOL * (abs(self.c) + abs(self.d))):
            raise PoleHit("Mobius denominator vanishes", step)
        return den

    def eval(self, z):
        zz = np.asarray(z, dtype=complex)
        return _out(z, (self.a * zz + self.b) / self._den(zz))

    def derivative(self, z):
        zz = np.asarray(z, dtype=complex)
        return _out(z, self.det / self._den(zz) ** 2)

    def delta(self, a, e, v):
        q = self.c * a + self.d
        den = q + cldexp(self.c * np.asarray(v), e)
        if abs(q) <= POLE_TOL * (abs(self.c) + abs(self.d)) or np.any(
                np.abs(den) <= POLE_TOL * (abs(self.c) + abs(self.d))):
            raise PoleHit("Mobius denominator vanishes")
        return self.det * np.asarray(v) / (den * q)

    def as_mobius(self):
        return (self.a, self.b, self.c, self.d)

    def poles(self):
        return [] if self.c == 0 else [-self.d / self.c]

    def to_dict(self):
        return {"type": "mobius", **{k: _enc(getattr(self, k)) for k in "abcd"}}


@dataclass(frozen=True)
class Affine(MapExpr):
    a: complex
    b: complex

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        if abs(self.a) <= INCIDENCE_TOL:
            raise InvalidMap("affine map needs a != 0")

    def eval(self, z):
        return _out(z, self.a * np.asarray(z, dtype=complex) + self.b)

    def derivative(self, z):
        return _out(z, np.full(np.shape(z), self.a, dtype=complex))

    def delta(self, a, e, v):
        return self.a * np.asarray(v, dtype=complex)

    def as_mobius(self):
        return (self.a, self.b, 0j, 1 + 0j)

    def as_polynomial(self):
        return np.array([self.b, self.a])

    def to_dict(self):
        return {"type": "affine", "a": _enc(self.a), "b": _enc(self.b)}


@dataclass(frozen=True)
class Polynomial(MapExpr):
    coeffs: tuple  # ascending: coeffs[k] multiplies z**k

    def __post_init__(self):
        c = tuple(complex(x) for x in self.coeffs)
        if len(c) < 2 or abs(c[-1]) <= INCIDENCE_TOL:
            raise InvalidMap("polynomial needs degree >= 1 and nonzero leading coefficient")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def eval(self, z):
        return _out(z, P.polyval(np.asarray(z, dtype=complex), np.array(self.coeffs)))

    def derivative(self, z):
        return _out(z, P.polyval(np.asarray(z, dtype=complex), P.polyder(np.array(self.coeffs))))

    def taylor(self, a: complex) -> np.ndarray:
        """Coefficients of u -> p(a + u) by repeated synthetic division."""
        c = list(self.coeffs[::-1])  # descending
        n = len(c)
        for i in range(n):
            for j in range(1, n - i):
                c[j] = c[j] + a * c[j - 1]
        return np.array(c[::-1])

    def delta(self, a, e, v):
        t = self.taylor(a)
        v = np.asarray(v, dtype=complex)
        sv = cldexp(v, e)
        acc = np.full(v.shape, t[-1], dtype=complex)
        for k in range(len(t) - 2, 0, -1):
            acc = t[k] + sv * acc
        return v * acc

    def as_polynomial(self):
        return np.array(self.coeffs)

    def to_dict(self):
        return {"type": "polynomial", "coeffs": [_enc(c) for c in self.coeffs]}


@dataclass(frozen=True)
class Composite(MapExpr):
    """parts[0] is applied first: Composite([f, g])(z) = g(f(z))."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise InvalidMap("composite needs at least one part")
        object.__setattr__(self, "parts", parts)

    def eval(self, z):
        w = np.asarray(z, dtype=complex)
        for p in self.parts:
            w = p.eval(w)
        return _out(z, w)

    def derivative(self, z):
        w = np.asarray(z, dtype=complex)
        acc = np.ones(w.shape, dtype=complex)
        for p in self.parts:
            acc = acc * p.derivative(w)
            w = p.eval(w)
        return _out(z, acc)

    def delta(self, a, e, v):
        w = np.asarray(v, dtype=complex)
        for p in self.parts:
            w = p.delta(a, e, w)
            a = p.eval(a)
        return w

    def as_mobius(self):
        M = np.eye(2, dtype=complex)
        for p in self.parts:
            m = p.as_mobius()
            if m is None:
                return None
            M = np.array([[m[0], m[1]], [m[2], m[3]]]) @ M
        return (M[0, 0], M[0, 1], M[1, 0], M[1, 1])

    def as_polynomial(self):
        acc = np.array([0, 1], dtype=complex)
        for p in self.parts:
            c = p.as_polynomial()
            if c is None:
                return None
            out = np.array([c[-1]], dtype=complex)
            for ck in c[-2::-1]:
                out = P.polyadd(P.polymul(out, acc), [ck])
            acc = out
        return acc

    def poles(self):
        m = self.as_mobius()
        if m is not None:
            return [] if m[2] == 0 else [-m[3] / m[2]]
        return [p for part in self.parts for p in part.poles()]

    def to_dict(self):
        return {"type": "composite", "parts": [p.to_dict() for p in self.parts]}


@dataclass(frozen=True)
class IterateSpec:
    base: MapExpr
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise InvalidMap("iterate count must be nonnegative")

    def __call__(self, z):
        return iterate(self.base, self.n, z)


def _enc(z: complex) -> list:
    z = complex(z)
    return [z.real, z.imag]


def map_from_dict(d: dict) -> MapExpr:
    kind = d.get("type")
    dec = lambda v: complex(v[0], v[1])
    if kind == "mobius":
        return Mobius(*(dec(d[k]) for k in "abcd"))
    if kind == "affine":
        return Affine(dec(d["a"]), dec(d["b"]))
    if kind == "polynomial":
        return Polynomial(tuple(dec(c) for c in d["coeffs"]))
    if kind == "composite":
        return Composite(tuple(map_from_dict(p) for p in d["parts"]))
    raise InvalidMap(f"unknown map type {kind!r}")


def simplify(m: MapExpr) -> MapExpr:
    """Collapse Mobius/affine or polynomial compositions into a single part."""
    if isinstance(m, Composite):
        mob = m.as_mobius()
        if mob is not None:
            if mob[2] == 0 and mob[3] != 0:
                return Affine(mob[0] / mob[3], mob[1] / mob[3])
            return Mobius(*mob)
        poly = m.as_polynomial()
        if poly is not None:
            return Polynomial(tuple(poly))
    return m


# ---------------------------------------------------------------------------
# module-level operations

def evaluate(m: MapExpr, z):
    return m.eval(z)


def derivative(m: MapExpr, z):
    return m.derivative(z)


def iterate(m, n: int, z=None):
    """n-fold composition of m applied to z (n = 0 is the identity).

    Accepts either ``iterate(map, n, z)`` or ``iterate(IterateSpec, z)``.
    """
    if isinstance(m, IterateSpec):
        m, n, z = m.base, m.n, n
    w = np.asarray(z, dtype=complex)
    for k in range(n):
        try:
            w = m.eval(w)
        except PoleHit as exc:
            raise PoleHit("pole reached while iterating", step=k + 1) from exc
    return _out(z, w)


def fixed_points(m: MapExpr) -> list:
    """Finite fixed points of Mobius-type or polynomial maps (empty if unknown)."""
    mob = m.as_mobius()
    if mob is not None:
        a, b, c, d = mob
        if abs(c) == 0:
            return [] if abs(a - d) == 0 else [b / (d - a)]
        disc = np.sqrt(complex((d - a) ** 2 + 4 * b * c))
        return [((a - d) + disc) / (2 * c), ((a - d) - disc) / (2 * c)]
    poly = m.as_polynomial()
    if poly is not None:
        q = np.array(poly, dtype=complex)
        q[1] -= 1
        while q.size > 1 and q[-1] == 0:
            q = q[:-1]
        return list(np.roots(q[::-1])) if q.size > 1 else []
    return []


# ---------------------------------------------------------------------------
# self-map validation

@dataclass(frozen=True)
class SelfMapCheck:
    """Ok iff ``violation`` is None.  ``truncation_hits`` counts images that fell
    into an excluded disk of an infinitely connected truncation: a finite
    truncation is not invariant under a map that shifts infinitely many holes,
    so those hits are recorded, not fatal."""

    ok: bool
    z: complex | None = None
    image: complex | None = None
    samples: int = 0
    truncation_hits: int = 0

    def __bool__(self):
        return self.ok


def validate_self_map(m: MapExpr, d: DomainSpec, samples: int = 512, seed: int = 0,
                      tol: float = INCIDENCE_TOL) -> SelfMapCheck:
    """Evaluate m on quasi-random interior points and boundary samples of d."""
    z = np.concatenate([d.interior_samples(samples, seed), d.boundary_samples()])
    img = np.empty_like(z)
    for k in range(z.size):
        try:
            img[k] = m.eval(z[k])
        except PoleHit:
            return SelfMapCheck(False, complex(z[k]), complex("nan"), z.size)
    bad = ~d.contains(img, tol)
    hits = 0
    if d.declared_class is ConnectivityClass.INFINITELY_CONNECTED:
        soft = bad & d.in_excluded(img)
        if d.base is not None:
            soft &= np.abs(img - d.base.center) < d.base.radius + tol
        hits = int(soft.sum())
        bad &= ~soft
    if np.any(bad):
        k = int(np.argmax(bad))
        return SelfMapCheck(False, complex(z[k]), complex(img[k]), z.size, hits)
    return SelfMapCheck(True, samples=z.size, truncation_hits=hits)


# ---------------------------------------------------------------------------
# injectivity

class InjectivityStatus(enum.Enum):
    INJECTIVE = "injective"
    NOT_INJECTIVE = "not_injective"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class InjectivityCertificate:
    status: InjectivityStatus
    method: str                      # "analytic" or "grid"
    witness: tuple | None = None     # (z1, z2) with m(z1) = m(z2)
    grid_resolution: int | None = None
    targets_tested: int = 0

    @property
    def grid_certified(self) -> bool:
        return self.status is InjectivityStatus.INJECTIVE and self.method == "grid"

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "method": self.method,
            "witness": None if self.witness is None else [_enc(w) for w in self.witness],
            "grid_resolution": self.grid_resolution,
            "targets_tested": self.targets_tested,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InjectivityCertificate":
        w = d.get("witness")
        return cls(InjectivityStatus(d["status"]), d["method"],
                   None if w is None else tuple(complex(*x) for x in w),
                   d.get("grid_resolution"), d.get("targets_tested", 0))


INJECTIVITY_GRID = 12


def _check_poles(m: MapExpr, K: CompactRegion):
    if not m.poles():
        return
    Ka = K.absolute()
    pts = np.array(m.poles(), dtype=complex)
    tol = max(c.tolerance for c in Ka.curves())
    hit = Ka.contains(pts, tol)
    if np.any(hit):
        raise PoleHit(f"pole {complex(pts[int(np.argmax(hit))]):.6g} lies in K")


def _square(lo: complex, hi: complex, per_side: int = 32) -> ClosedPolyline:
    t = np.arange(per_side) / per_side
    w, h = hi.real - lo.real, hi.imag - lo.imag
    pts = np.concatenate([lo + w * t, lo + w + 1j * h * t, hi - w * t, lo + 1j * h * (1 - t)])
    return ClosedPolyline(pts)


def _newton(m: MapExpr, w: complex, z: complex, steps: int = 60) -> complex:
    for _ in range(steps):
        dz = (m.eval(z) - w) / m.derivative(z)
        z -= dz
        if abs(dz) <= 1e-15 * max(1.0, abs(z)):
            break
    return z


def _other_preimage(m: MapExpr, w: complex, z0: complex, lo: complex, hi: complex,
                    depth: int = 0):
    """Preimage of w in the box [lo, hi] away from z0, by recursive bisection plus Newton."""
    f = lambda z: m.eval(z) - w
    try:
        n = zero_count(f, _square(lo, hi)).count
    except (ZeroOnContour, NonIntegerResidual):
        return None
    if n <= 0:
        return None
    size = abs(hi - lo)
    if depth >= 20 or (n == 1 and abs(z0 - 0.5 * (lo + hi)) > size):
        z = _newton(m, w, 0.5 * (lo + hi))
        if (abs(m.eval(z) - w) <= 1e-9 * max(1.0, abs(w)) and abs(z - z0) > 1e-7 * max(1.0, size)
                and lo.real - size <= z.real <= hi.real + size
                and lo.imag - size <= z.imag <= hi.imag + size):
            return z
        if depth >= 20:
            return None
    # split slightly off-centre so that symmetric preimages avoid the cut lines
    c = lo + 0.5137 * (hi - lo).real + 1j * 0.4871 * (hi - lo).imag
    boxes = [(lo, c), (complex(c.real, lo.imag), complex(hi.real, c.imag)),
             (complex(lo.real, c.imag), complex(c.real, hi.imag)), (c, hi)]
    for blo, bhi in boxes:
        z = _other_preimage(m, w, z0, blo, bhi, depth + 1)
        if z is not None:
            return z
    return None


def check_injective(m: MapExpr, K: CompactRegion, grid: int = INJECTIVITY_GRID,
                    seed: int = 0) -> InjectivityCertificate:
    """Injectivity of m on K: analytic for Mobius-type maps, grid-certified otherwise.

    For each grid point z of K the target w = m(z) has its preimages counted
    face by face (outer curve minus hole curves) with the argument principle.
    A count of two or more yields a witness pair.  ``seed`` jitters the grid.
    """
    _check_poles(m, K)
    if m.as_mobius() is not None:
        return InjectivityCertificate(InjectivityStatus.INJECTIVE, "analytic")
    Ka = K.absolute()
    rng = np.random.default_rng(seed)
    tested = 0
    for face in Ka.faces:
        x0, y0, x1, y1 = face.outer.bbox()
        jit = rng.uniform(-0.25, 0.25, size=2)
        xs = x0 + (np.arange(grid) + 0.5 + jit[0]) * (x1 - x0) / grid
        ys = y0 + (np.arange(grid) + 0.5 + jit[1]) * (y1 - y0) / grid
        zz = (xs[None, :] + 1j * ys[:, None]).ravel()
        single = CompactRegion((face,))
        zz = zz[single.contains(zz)]
        diam = face.outer.diameter()
        for z in zz:
            w = complex(m.eval(z))
            f = lambda t, w=w: m.eval(t) - w
            try:
                n = zero_count(f, face.outer).count
                n -= sum(zero_count(f, h).count for h in face.holes)
            except (ZeroOnContour, NonIntegerResidual):
                continue
            tested += 1
            if n >= 2:
                lo = complex(x0, y0) - 1e-3 * diam * (1 + 1j)
                hi = complex(x1, y1) + 1e-3 * diam * (1 + 1j)
                z2 = _other_preimage(m, w, complex(z), lo, hi)
                wit = (complex(z), complex(z2)) if z2 is not None else (complex(z), None)
                return InjectivityCertificate(InjectivityStatus.NOT_INJECTIVE, "grid", wit, grid, tested)
    if tested == 0:
        return InjectivityCertificate(InjectivityStatus.INCONCLUSIVE, "grid", None, grid, 0)
    return InjectivityCertificate(InjectivityStatus.INJECTIVE, "grid", None, grid, tested)


def image_disk(m: MapExpr, disk: Disk) -> Disk:
    """Exact image of a closed disk under a Mobius-type map (must not contain the pole)."""
    if m.as_mobius() is None:
        raise InvalidMap("disk images are exact only for Mobius-type maps")
    for p in m.poles():
        if abs(p - disk.center) <= disk.radius:
            raise PoleHit("the disk contains the pole")
    w = np.asarray(m.eval(disk.center + disk.radius * np.exp(2j * np.pi * np.arange(3) / 3)))
    a, b, c = w
    d = 2 * (a.real * (b.imag - c.imag) + b.real * (c.imag - a.imag) + c.real * (a.imag - b.imag))
    sa, sb, sc = abs(a) ** 2, abs(b) ** 2, abs(c) ** 2
    ux = (sa * (b.imag - c.imag) + sb * (c.imag - a.imag) + sc * (a.imag - b.imag)) / d
    uy = (sa * (c.real - b.real) + sb * (a.real - c.real) + sc * (b.real - a.real)) / d
    u = complex(ux, uy)
    return Disk(u, float(np.mean(np.abs(w - u))))


def disk_orbit(m: MapExpr, disk: Disk, count: int) -> list:
    """disk, m(disk), ..., m^(count-1)(disk)."""
    out = [disk]
    while len(out) < count:
        out.append(image_disk(m, out[-1]))
    return out
