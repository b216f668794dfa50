"""Scenario configuration: JSON loading, validation and normalised echo.

Complex numbers are written as ``[re, im]``.  Unknown keys are rejected with
a ParseError pointing at the offending line; invalid values raise a
ValidationError naming the field (``maps[0]``, ``compacts[1].disk`` ...).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .domains import (CompactRegion, ConnectivityClass, Disk, DomainSpec, Face, annulus_region,
                      disk_region, enlarge_to_omega_convex)
from .errors import HoloTransitError, ParseError, ValidationError
from .families import family_from_dict, family_to_dict
from .geometry import DEFAULT_VERTICES, INCIDENCE_TOL, SEPARATION_TOL, ClosedPolyline
from .symbols import disk_orbit, map_from_dict
from .witness import DEFAULT_EPS, Monomial, basis_from_dict

SCHEMA_VERSION = 1
MIN_HORIZON = 10

_TOP_KEYS = {"schema_version", "domain", "maps", "family", "compacts", "horizon", "tolerances",
             "outputs", "seed", "exhaustion_depth", "witness", "vertices"}
_REQUIRED = {"schema_version", "domain", "maps", "family", "compacts", "horizon"}
_DOMAIN_KEYS = {"base", "excluded", "excluded_orbit", "class", "truncation_note"}
_TOL_KEYS = {"incidence", "separation", "eps_witness"}
_OUT_KEYS = {"report", "svg"}
_WITNESS_KEYS = {"n", "targets", "basis"}


@dataclass(frozen=True)
class Tolerances:
    incidence: float = INCIDENCE_TOL
    separation: float = SEPARATION_TOL
    eps_witness: float = DEFAULT_EPS


@dataclass(frozen=True)
class Outputs:
    report: str | None = None
    svg: str | None = None


@dataclass(frozen=True)
class WitnessSpec:
    n: int | None
    targets: tuple | None      # complex constants g_0, ..., g_N
    basis: object


@dataclass(frozen=True)
class ScenarioConfig:
    domain: DomainSpec
    maps: tuple
    family: object
    compacts: tuple
    compact_labels: tuple
    horizon: int
    tolerances: Tolerances = Tolerances()
    outputs: Outputs = Outputs()
    seed: int = 0
    exhaustion_depth: int = 0
    witness: WitnessSpec | None = None
    echo: dict = field(default_factory=dict)

    __hash__ = None


# ---------------------------------------------------------------------------
# helpers

def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


class _Ctx:
    def __init__(self, text: str):
        self.text = text

    def keys(self, d, allowed, where: str):
        if not isinstance(d, dict):
            raise ValidationError(where, "expected an object")
        for k in d:
            if k not in allowed:
                raise ParseError(f"unknown key {k!r} in {where or 'config'}", _line_of(self.text, k))


def _cpx(v, where: str) -> complex:
    if (not isinstance(v, (list, tuple)) or len(v) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)):
        raise ValidationError(where, "complex numbers are written [re, im]")
    z = complex(v[0], v[1])
    if not np.isfinite(z):
        raise ValidationError(where, "complex number must be finite")
    return z


def _enc(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def _pos_real(v, where):
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0 or not np.isfinite(v):
        raise ValidationError(where, "expected a positive real")
    return float(v)


def _int(v, where, lo=None):
    if not isinstance(v, int) or isinstance(v, bool) or (lo is not None and v < lo):
        raise ValidationError(where, f"expected an integer >= {lo}")
    return v


# ---------------------------------------------------------------------------
# sections

def _disk(ctx, d, where) -> Disk:
    ctx.keys(d, {"center", "radius"}, where)
    try:
        return Disk(_cpx(d.get("center"), where + ".center"), _pos_real(d.get("radius"), where + ".radius"))
    except HoloTransitError as exc:
        if isinstance(exc, (ValidationError, ParseError)):
            raise
        raise ValidationError(where, str(exc)) from exc


def _domain(ctx, d, maps) -> DomainSpec:
    ctx.keys(d, _DOMAIN_KEYS, "domain")
    base = None if d.get("base") is None else _disk(ctx, d["base"], "domain.base")
    excluded = [_disk(ctx, e, f"domain.excluded[{i}]") for i, e in enumerate(d.get("excluded", []))]
    if "excluded_orbit" in d:
        o = d["excluded_orbit"]
        ctx.keys(o, {"map", "disk", "count"}, "domain.excluded_orbit")
        idx = _int(o.get("map"), "domain.excluded_orbit.map", 0)
        if idx >= len(maps):
            raise ValidationError("domain.excluded_orbit.map", "no such map")
        try:
            excluded += disk_orbit(maps[idx], _disk(ctx, o.get("disk"), "domain.excluded_orbit.disk"),
                                   _int(o.get("count"), "domain.excluded_orbit.count", 1))
        except HoloTransitError as exc:
            raise ValidationError("domain.excluded_orbit", str(exc)) from exc
    try:
        cls = ConnectivityClass(d.get("class"))
    except ValueError as exc:
        raise ValidationError("domain.class", f"unknown connectivity class {d.get('class')!r}") from exc
    try:
        return DomainSpec(base, tuple(excluded), cls, d.get("truncation_note", ""))
    except HoloTransitError as exc:
        raise ValidationError("domain", str(exc)) from exc


def _domain_echo(dom: DomainSpec) -> dict:
    b = dom.base
    return {"base": None if b is None else {"center": _enc(b.center), "radius": b.radius},
            "excluded": [{"center": _enc(e.center), "radius": e.radius} for e in dom.excluded],
            "class": dom.declared_class.value, "truncation_note": dom.truncation_note}


def _curve(ctx, pts, where, tol) -> ClosedPolyline:
    if not isinstance(pts, list):
        raise ValidationError(where, "expected a list of [re, im] points")
    try:
        return ClosedPolyline(np.array([_cpx(p, where) for p in pts]), tol)
    except HoloTransitError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(where, str(exc)) from exc


def _compact(ctx, c, where, dom, tol, nv) -> tuple:
    """(region, label, normalised directive)."""
    if not isinstance(c, dict) or len(c) != 1:
        raise ValidationError(where, "a compact is one directive: disk, annulus, faces or enlarge")
    (kind, body), = c.items()
    try:
        if kind == "disk":
            ctx.keys(body, {"center", "radius"}, where + ".disk")
            z, r = _cpx(body.get("center"), where + ".disk.center"), _pos_real(body.get("radius"), where + ".disk.radius")
            return disk_region(z, r, nv), f"disk({z:g},{r:g})", {"disk": {"center": _enc(z), "radius": r}}
        if kind == "annulus":
            ctx.keys(body, {"center", "inner", "outer"}, where + ".annulus")
            z = _cpx(body.get("center"), where + ".annulus.center")
            ri, ro = _pos_real(body.get("inner"), where + ".annulus.inner"), _pos_real(body.get("outer"), where + ".annulus.outer")
            if ri >= ro:
                raise ValidationError(where + ".annulus", "inner radius must be below outer radius")
            return (annulus_region(z, ri, ro, nv), f"annulus({z:g},{ri:g},{ro:g})",
                    {"annulus": {"center": _enc(z), "inner": ri, "outer": ro}})
        if kind == "faces":
            faces = []
            for fi, f in enumerate(body):
                fw = f"{where}.faces[{fi}]"
                ctx.keys(f, {"outer", "holes"}, fw)
                outer = _curve(ctx, f.get("outer"), fw + ".outer", tol)
                holes = tuple(_curve(ctx, h, f"{fw}.holes[{hi}]", tol) for hi, h in enumerate(f.get("holes", [])))
                faces.append(Face(outer, holes))
            K = CompactRegion(tuple(faces)).validate()
            echo = {"faces": [{"outer": [_enc(z) for z in f.outer.vertices],
                               "holes": [[_enc(z) for z in h.vertices] for h in f.holes]} for f in faces]}
            return K, f"faces({len(faces)})", echo
        if kind == "enlarge":
            ctx.keys(body, {"compact", "min_holes"}, where + ".enlarge")
            K, lab, inner = _compact(ctx, body.get("compact"), where + ".enlarge.compact", dom, tol, nv)
            mh = _int(body.get("min_holes", 0), where + ".enlarge.min_holes", 0)
            L = enlarge_to_omega_convex(K, dom, mh)
            return L, f"enlarge({lab},{mh})", {"enlarge": {"compact": inner, "min_holes": mh}}
    except HoloTransitError as exc:
        if isinstance(exc, (ValidationError, ParseError)):
            raise
        raise ValidationError(where, str(exc)) from exc
    raise ValidationError(where, f"unknown compact directive {kind!r}")


def _witness(ctx, w, n_maps) -> tuple:
    ctx.keys(w, _WITNESS_KEYS, "witness")
    n = None if w.get("n") is None else _int(w["n"], "witness.n", 1)
    targets = None
    if w.get("targets") is not None:
        targets = tuple(_cpx(t, f"witness.targets[{i}]") for i, t in enumerate(w["targets"]))
        if len(targets) != n_maps + 1:
            raise ValidationError("witness.targets", "need one target for K and one per map")
    basis = Monomial()
    if w.get("basis") is not None:
        b = w["basis"]
        ctx.keys(b, {"kind", "max_degree", "poles", "polynomial"}, "witness.basis")
        try:
            basis = basis_from_dict({"max_degree": 60, **b})
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError("witness.basis", str(exc)) from exc
    ws = WitnessSpec(n, targets, basis)
    echo = {"n": n, "targets": None if targets is None else [_enc(t) for t in targets],
            "basis": basis.to_dict()}
    return ws, echo


# ---------------------------------------------------------------------------
# entry points

def parse_config(text: str) -> ScenarioConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from exc
    ctx = _Ctx(text)
    ctx.keys(raw, _TOP_KEYS, "")
    missing = sorted(_REQUIRED - set(raw))
    if missing:
        raise ValidationError(missing[0], "required field is missing")
    if raw["schema_version"] != SCHEMA_VERSION:
        raise ValidationError("schema_version", f"expected {SCHEMA_VERSION}")
    if not isinstance(raw["maps"], list) or not raw["maps"]:
        raise ValidationError("maps", "expected a nonempty list of maps")
    maps = []
    for i, m in enumerate(raw["maps"]):
        try:
            maps.append(map_from_dict(m))
        except (HoloTransitError, KeyError, TypeError, IndexError, ValueError) as exc:
            raise ValidationError(f"maps[{i}]", str(exc)) from exc
    dom = _domain(ctx, raw["domain"], maps)
    ctx.keys(raw["family"], {"kind", "param"}, "family")
    family = family_from_dict(raw["family"])
    horizon = _int(raw["horizon"], "horizon", MIN_HORIZON)
    t = raw.get("tolerances", {})
    ctx.keys(t, _TOL_KEYS, "tolerances")
    tol = Tolerances(*(_pos_real(t.get(k, getattr(Tolerances, k)), f"tolerances.{k}")
                       for k in ("incidence", "separation", "eps_witness")))
    o = raw.get("outputs", {})
    ctx.keys(o, _OUT_KEYS, "outputs")
    for k in _OUT_KEYS:
        if k in o and o[k] is not None and (not isinstance(o[k], str) or not o[k]):
            raise ValidationError(f"outputs.{k}", "output paths must be nonempty strings")
    outputs = Outputs(o.get("report"), o.get("svg"))
    seed = _int(raw.get("seed", 0), "seed", 0)
    depth = _int(raw.get("exhaustion_depth", 0), "exhaustion_depth", 0)
    nv = _int(raw.get("vertices", DEFAULT_VERTICES), "vertices", 8)
    if not isinstance(raw["compacts"], list):
        raise ValidationError("compacts", "expected a list")
    built = [_compact(ctx, c, f"compacts[{i}]", dom, tol.incidence, nv)
             for i, c in enumerate(raw["compacts"])]
    witness, wecho = (None, None)
    if raw.get("witness") is not None:
        witness, wecho = _witness(ctx, raw["witness"], len(maps))
    echo = {
        "schema_version": SCHEMA_VERSION,
        "domain": _domain_echo(dom),
        "maps": [m.to_dict() for m in maps],
        "family": family_to_dict(family),
        "compacts": [b[2] for b in built],
        "horizon": horizon,
        "tolerances": {"incidence": tol.incidence, "separation": tol.separation,
                       "eps_witness": tol.eps_witness},
        "outputs": {"report": outputs.report, "svg": outputs.svg},
        "seed": seed,
        "exhaustion_depth": depth,
        "vertices": nv,
        "witness": wecho,
    }
    return ScenarioConfig(dom, tuple(maps), family, tuple(b[0] for b in built),
                          tuple(b[1] for b in built), horizon, tol, outputs, seed, depth,
                          witness, echo)


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"config is not UTF-8: {exc}") from exc
    return parse_config(text)
