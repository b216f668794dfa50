"""Runge-style witnesses: one function approximating prescribed targets on disjoint compacts.

Fits are discrete least squares in a basis orthonormalised by Arnoldi
recurrences (Vandermonde with Arnoldi), which keeps high degrees stable.
Columns are ordered by degree, so the fits for all degrees are nested and
escalation is a matter of truncating one coefficient vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domains import CompactRegion, DomainSpec
from .dynamics import pairwise_disjoint
from .errors import IllConditioned, PreconditionViolation
from .geometry import _angle_sum
from .symbols import iterate

DEFAULT_MAX_DEGREE = 60
DEFAULT_EPS = 1e-6
BREAKDOWN_TOL = 1e-13
SAMPLE_GRID = 24


# ---------------------------------------------------------------------------
# rational comb

@dataclass(frozen=True)
class RationalComb:
    """g(z) = m (z - b)^(p+1) / prod_j (z - a_j): zero of order p+1 at b, simple poles a_j."""

    m: float
    b: complex
    poles: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "b", complex(self.b))
        object.__setattr__(self, "poles", tuple(complex(a) for a in self.poles))
        if self.m == 0:
            raise ValueError("comb scale must be nonzero")
        if any(a == self.b for a in self.poles):
            raise ValueError("the zero b must differ from every pole")

    @property
    def p(self) -> int:
        return len(self.poles)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.m * (z - self.b) ** (self.p + 1)
        for a in self.poles:
            out = out / (z - a)
        return out

    def log_derivative(self, z):
        z = np.asarray(z, dtype=complex)
        out = (self.p + 1) / (z - self.b)
        for a in self.poles:
            out = out - 1 / (z - a)
        return out

    def derivative(self, z):
        return self(z) * self.log_derivative(z)

    def to_dict(self) -> dict:
        return {"m": self.m, "b": [self.b.real, self.b.imag],
                "poles": [[a.real, a.imag] for a in self.poles]}


def build_proof_comb(b: complex, poles, m: float = 1.0) -> RationalComb:
    """The comb g_m; its argument-principle count is +1 around b and all poles together,
    p+1 around b alone and -1 around a single pole (positively oriented curves)."""
    return RationalComb(m, b, tuple(poles))


# ---------------------------------------------------------------------------
# bases

@dataclass(frozen=True)
class Monomial:
    max_degree: int = DEFAULT_MAX_DEGREE
    kind = "monomial"

    def __post_init__(self):
        if self.max_degree < 1:
            raise ValueError("max_degree must be >= 1")

    def generators(self):
        return (None,)

    def to_dict(self):
        return {"kind": self.kind, "max_degree": self.max_degree}


@dataclass(frozen=True)
class RationalWithPoles:
    """Powers 1/(z-a)^k for each pole up to max_degree, plus (optionally) a polynomial part."""

    max_degree: int = DEFAULT_MAX_DEGREE
    poles: tuple = ()
    polynomial: bool = True
    kind = "rational"

    def __post_init__(self):
        object.__setattr__(self, "poles", tuple(complex(a) for a in self.poles))
        if self.max_degree < 1:
            raise ValueError("max_degree must be >= 1")
        if not self.poles:
            raise ValueError("a rational basis needs at least one pole")

    def generators(self):
        return ((None,) if self.polynomial else ()) + self.poles

    def to_dict(self):
        return {"kind": self.kind, "max_degree": self.max_degree,
                "poles": [[a.real, a.imag] for a in self.poles], "polynomial": self.polynomial}


def basis_from_dict(d: dict):
    if d["kind"] == "monomial":
        return Monomial(d["max_degree"])
    return RationalWithPoles(d["max_degree"], tuple(complex(*a) for a in d["poles"]),
                             d.get("polynomial", True))


class ArnoldiBasis:
    """Vandermonde-with-Arnoldi columns, one orthonormal group per generator.

    Each generator is either the polynomial coordinate s = (z - c)/sigma or a
    pole coordinate t = rho/(z - a) with rho = min |Z - a|; new columns are the
    generator times that generator's previous column, orthogonalised twice
    against the constant and the generator's own columns only.  Mixing the
    groups would make the evaluation recurrence unstable whenever one
    generator's powers nearly lie in another's span, so groups are not
    orthogonal to each other and fits solve a least-squares problem.
    """

    def __init__(self, Z, generators, max_degree: int):
        Z = np.asarray(Z, dtype=complex)
        self.generators = tuple(generators)
        self.center = complex(Z.mean())
        self.sigma = float(np.abs(Z - self.center).max()) or 1.0
        self.rho = tuple(1.0 if a is None else float(np.abs(Z - a).min()) for a in self.generators)
        self.steps = []     # (generator, source column, orthogonalised columns, h, norm)
        self.degrees = [0]
        self.breakdown = None
        M = Z.size
        G = self._coords(Z)
        cols = [np.ones(M, dtype=complex)]
        group = [[0] for _ in self.generators]
        alive = [True] * len(self.generators)
        for k in range(1, max_degree + 1):
            for gi in range(len(self.generators)):
                if not alive[gi]:
                    continue
                idx = list(group[gi])
                Q = np.array([cols[i] for i in idx]).T
                q = G[gi] * cols[idx[-1]]
                before = np.linalg.norm(q)
                h = Q.conj().T @ q / M
                q = q - Q @ h
                h2 = Q.conj().T @ q / M
                q = q - Q @ h2
                h = h + h2
                nrm = np.linalg.norm(q) / math.sqrt(M)
                if not nrm > BREAKDOWN_TOL * max(before / math.sqrt(M), 1e-300):
                    alive[gi] = False
                    self.breakdown = self.breakdown or k
                    continue
                cols.append(q / nrm)
                self.steps.append((gi, idx[-1], idx, h, nrm))
                group[gi].append(len(cols) - 1)
                self.degrees.append(k)
        self.Q = np.array(cols).T
        self.degrees = np.array(self.degrees)

    def _coords(self, Z):
        out = []
        for a, r in zip(self.generators, self.rho):
            out.append((Z - self.center) / self.sigma if a is None else r / (Z - a))
        return out

    def evaluate(self, Z) -> np.ndarray:
        """Basis columns at new points, by replaying the recurrence."""
        Z = np.asarray(Z, dtype=complex).ravel()
        G = self._coords(Z)
        W = np.empty((Z.size, 1 + len(self.steps)), dtype=complex)
        W[:, 0] = 1
        for j, (gi, src, idx, h, nrm) in enumerate(self.steps):
            q = G[gi] * W[:, src] - W[:, idx] @ h
            W[:, j + 1] = q / nrm
        return W

    def to_dict(self) -> dict:
        return {
            "generators": [None if a is None else [a.real, a.imag] for a in self.generators],
            "center": [self.center.real, self.center.imag], "sigma": self.sigma,
            "rho": list(self.rho), "degrees": [int(x) for x in self.degrees],
            "steps": [[gi, src, list(idx), [[x.real, x.imag] for x in h], nrm]
                      for gi, src, idx, h, nrm in self.steps],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ArnoldiBasis":
        self = cls.__new__(cls)
        self.generators = tuple(None if a is None else complex(*a) for a in d["generators"])
        self.center = complex(*d["center"])
        self.sigma = d["sigma"]
        self.rho = tuple(d["rho"])
        self.degrees = np.array(d["degrees"])
        self.steps = [(gi, src, list(idx), np.array([complex(*x) for x in h]), nrm)
                      for gi, src, idx, h, nrm in d["steps"]]
        self.breakdown = None
        self.Q = None
        return self


@dataclass
class Witness:
    """h(z) = sum_k c_k q_k(z) over the Arnoldi basis columns of degree <= ``degree``."""

    basis: ArnoldiBasis
    coefficients: np.ndarray
    degree: int
    descriptor: dict = field(default_factory=dict)

    def __call__(self, z):
        zz = np.asarray(z, dtype=complex)
        W = self.basis.evaluate(zz)
        out = (W[:, :self.coefficients.size] @ self.coefficients).reshape(zz.shape)
        return complex(out) if zz.ndim == 0 else out

    def to_dict(self) -> dict:
        return {"degree": self.degree, "basis": dict(self.descriptor),
                "coefficients": [[c.real, c.imag] for c in self.coefficients],
                "arnoldi": self.basis.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "Witness":
        return cls(ArnoldiBasis.from_dict(d["arnoldi"]),
                   np.array([complex(*c) for c in d["coefficients"]]), d["degree"], d["basis"])


# ---------------------------------------------------------------------------
# sampling

def region_samples(K: CompactRegion, refine: int = 1, grid: int = SAMPLE_GRID) -> np.ndarray:
    """Boundary vertices (each edge split ``refine`` times) plus interior grid points."""
    K = K.absolute()
    parts = []
    t = np.arange(refine) / refine
    for c in K.curves():
        v = c.vertices
        w = np.roll(v, -1)
        parts.append((v[:, None] + (w - v)[:, None] * t[None, :]).ravel())
    x0, y0, x1, y1 = K.bbox()
    g = grid * (2 if refine > 1 else 1)
    xs = np.linspace(x0, x1, g + 2)[1:-1]
    ys = np.linspace(y0, y1, g + 2)[1:-1]
    Z = (xs[None, :] + 1j * ys[:, None]).ravel()
    parts.append(Z[K.contains(Z)])
    return np.concatenate(parts)


@dataclass(frozen=True)
class PushedTarget:
    """Target g on the image forward(source): fitted at forward(z) against g(z), z in source."""

    source: CompactRegion
    forward: object
    g: object

    def region(self) -> CompactRegion:
        from .domains import Face
        from .geometry import ClosedPolyline
        src = self.source.absolute()
        faces = tuple(Face(ClosedPolyline(np.asarray(self.forward(f.outer.vertices))),
                           tuple(ClosedPolyline(np.asarray(self.forward(h.vertices))) for h in f.holes))
                      for f in src.faces)
        return CompactRegion(faces)

    def samples(self, refine: int):
        z = region_samples(self.source, refine)
        return np.asarray(self.forward(z), dtype=complex), np.asarray(self.g(z), dtype=complex)


def _target_samples(t, refine):
    if isinstance(t, PushedTarget):
        return t.samples(refine)
    region, g = t
    z = region_samples(region, refine)
    return z, np.broadcast_to(np.asarray(g(z), dtype=complex), z.shape)


def _target_region(t) -> CompactRegion:
    return t.region() if isinstance(t, PushedTarget) else t[0].absolute()


def constant(c):
    c = complex(c)
    return lambda z: np.full(np.shape(z), c, dtype=complex)


# ---------------------------------------------------------------------------
# fitting

@dataclass
class WitnessFit:
    witness: Witness
    degree: int
    fit_errors: list
    validation_errors: list
    reached_degree_cap: bool
    condition: float
    overfit: bool
    breakdown_degree: int | None = None

    @property
    def sup_error(self) -> float:
        return max(self.validation_errors)

    def table(self) -> list:
        return [{"region": i, "fit": f, "validation": v}
                for i, (f, v) in enumerate(zip(self.fit_errors, self.validation_errors))]


def _holes_with_poles(regions, poles) -> str | None:
    for ri, R in enumerate(regions):
        for fi, f in enumerate(R.faces):
            for hi, h in enumerate(f.holes):
                inside = [a for a in poles if abs(_angle_sum(h.vertices, [a])[0]) > np.pi]
                if not inside:
                    return f"region {ri} face {fi} hole {hi}"
    return None


def check_preconditions(regions, basis, domain: DomainSpec | None = None):
    regions = list(regions)
    if len(regions) >= 2:
        res = pairwise_disjoint(regions)
        if not res:
            raise PreconditionViolation(f"target regions {res.pair} are not disjoint")
    if isinstance(basis, Monomial):
        for i, A in enumerate(regions):
            if not A.hole_count():
                continue
            for j, B in enumerate(regions):
                probe = B.all_vertices()[:1]
                if j != i and any(abs(_angle_sum(h.vertices, probe)[0]) > np.pi
                                  for f in A.faces for h in f.holes):
                    raise PreconditionViolation(f"region {j} lies in a hole of region {i}; "
                                                "polynomials cannot separate them")
            raise PreconditionViolation(
                f"region {i} has holes; the monomial basis needs a connected complement")
    else:
        for a in basis.poles:
            for i, R in enumerate(regions):
                if R.contains([a], 1e-12)[0]:
                    raise PreconditionViolation(f"pole {a} lies on target region {i}")
            if domain is not None and domain.contains([a])[0]:
                raise PreconditionViolation(f"pole {a} lies in the domain")
        missing = _holes_with_poles(regions, basis.poles)
        if missing:
            raise PreconditionViolation(f"{missing} contains no pole of the basis")


def approximate_on_disjoint_compacts(targets, basis=None, eps: float = DEFAULT_EPS,
                                     domain: DomainSpec | None = None) -> WitnessFit:
    """One function within eps of each target on its region, at the lowest sufficient degree.

    ``targets`` holds ``(region, g)`` pairs or ``PushedTarget`` entries.  The
    degree is raised until the sup error is below eps on both the fit sample
    and a 4x refined validation sample, or max_degree is reached (then the
    best fit is returned with ``reached_degree_cap`` set).
    """
    basis = basis or Monomial()
    targets = list(targets)
    check_preconditions([_target_region(t) for t in targets], basis, domain)
    fit = [_target_samples(t, 1) for t in targets]
    val = [_target_samples(t, 4) for t in targets]
    Z = np.concatenate([z for z, _ in fit])
    F = np.concatenate([f for _, f in fit])
    B = ArnoldiBasis(Z, basis.generators(), basis.max_degree)
    Wv = [B.evaluate(z) for z, _ in val]
    splits = np.cumsum([z.size for z, _ in fit])[:-1]
    best = None
    for d in range(0, basis.max_degree + 1):
        k = int(np.searchsorted(B.degrees, d, side="right"))
        if d > 0 and k == int(np.searchsorted(B.degrees, d - 1, side="right")):
            continue
        c = np.linalg.lstsq(B.Q[:, :k], F, rcond=None)[0]
        res = np.abs(B.Q[:, :k] @ c - F)
        fe = [float(x.max()) if x.size else 0.0 for x in np.split(res, splits)]
        ve = [float(np.abs(W[:, :k] @ c - f).max()) for W, (_, f) in zip(Wv, val)]
        score = max(max(fe), max(ve))
        # a higher degree must improve by more than roundoff to displace a lower one
        if best is None or score < best[0] * (1 - 1e-8):
            best = (score, d, k, c, fe, ve)
        if score < eps:
            break
    score, d, k, c, fe, ve = best
    if score >= eps and B.breakdown is not None:
        raise IllConditioned(f"basis lost numerical rank at degree {B.breakdown} before reaching eps",
                             _condition(Z, B, d))
    desc = basis.to_dict()
    w = Witness(B, c.copy(), d, desc)
    overfit = max(ve) > 2 * max(fe) + 1e-12 * max(1.0, float(np.abs(F).max()))
    return WitnessFit(w, d, fe, ve, score >= eps, _condition(Z, B, d), overfit, B.breakdown)


def _condition(Z, B: ArnoldiBasis, d: int) -> float:
    """2-norm condition number of the raw (non-orthogonalised) basis at degree d."""
    G = B._coords(Z)
    cols = [np.ones(Z.size, dtype=complex)]
    for k in range(1, d + 1):
        for g in G:
            cols.append(g ** k)
    s = np.linalg.svd(np.array(cols).T, compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else math.inf


# ---------------------------------------------------------------------------
# verification

@dataclass(frozen=True)
class WitnessCheck:
    ok: bool
    n: int
    eps: float
    errors: tuple            # sup error for g_0 on K, then for each map
    violation: tuple | None = None   # (index, point of K)
    statement: str = ""

    def __bool__(self):
        return self.ok

    def to_dict(self) -> dict:
        v = None if self.violation is None else [self.violation[0],
                                                 [self.violation[1].real, self.violation[1].imag]]
        return {"ok": self.ok, "n": self.n, "eps": self.eps, "errors": list(self.errors),
                "violation": v, "statement": self.statement}

    @classmethod
    def from_dict(cls, d: dict) -> "WitnessCheck":
        v = d["violation"]
        return cls(d["ok"], d["n"], d["eps"], tuple(d["errors"]),
                   None if v is None else (v[0], complex(*v[1])), d["statement"])


def verify_witness(h, maps, n: int, K: CompactRegion, targets, eps: float = DEFAULT_EPS) -> WitnessCheck:
    """Check |h - g_0| < eps on K and |h(phi_i^n(z)) - g_i(z)| < eps for z in K (refined sample)."""
    z = region_samples(K, 4)
    errs, viol = [], None
    for i, g in enumerate(targets):
        w = z if i == 0 else iterate(maps[i - 1], n, z)
        r = np.abs(np.asarray(h(w)) - np.asarray(g(z), dtype=complex))
        k = int(np.argmax(r))
        errs.append(float(r[k]))
        if r[k] >= eps and viol is None:
            viol = (i, complex(z[k]))
    ok = viol is None
    stmt = (f"n = {n} belongs to N(U_0, ..., U_{len(targets) - 1}) for the eps-balls "
            f"(eps = {eps:g}) around g_0, ..., g_{len(targets) - 1} on K") if ok else ""
    return WitnessCheck(ok, n, eps, tuple(errs), viol, stmt)


def construct_witness(maps, n: int, K: CompactRegion, targets, basis=None,
                      eps: float = DEFAULT_EPS, domain: DomainSpec | None = None):
    """Fit h on K and the images phi_i^n(K), then verify it; returns (fit, check)."""
    if len(targets) != len(maps) + 1:
        raise ValueError("need one target for K and one per map")
    entries = [(K.absolute(), targets[0])]
    for m, g in zip(maps, targets[1:]):
        entries.append(PushedTarget(K, lambda z, m=m: iterate(m, n, z), g))
    fit = approximate_on_disjoint_compacts(entries, basis, eps, domain)
    return fit, verify_witness(fit.witness, maps, n, K, targets, eps)
