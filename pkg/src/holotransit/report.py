"""Scenario execution and the JSON report document.

A report holds only JSON-native data (non-finite floats are written as the
strings "inf", "-inf" and "nan"), so ``ReportDocument.from_json(doc.to_json())``
is the identity.  Timing is recorded as deterministic work counters; wall-clock
seconds are added only on request because they break byte-determinism.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .config import SCHEMA_VERSION, ScenarioConfig
from .decider import OverallStatus, TransitivityReport, decide
from .dynamics import ImageTracker, IndexSetSample, shared_anchors
from .errors import HoloTransitError
from .families import FamilyVerdict
from .symbols import InjectivityStatus
from .witness import RationalWithPoles, constant, construct_witness

MAX_SNAPSHOT_VERTICES = 400
MARKER_REL = 1e-3          # images below this fraction of the view are drawn as markers
WITNESS_ATTEMPTS = 8       # successive members tried when the witness index is not fixed


def _json_safe(x):
    """Recursively convert to JSON-native values with non-finite floats as strings."""
    if isinstance(x, dict):
        return {str(k): _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    if isinstance(x, (bool, type(None), str)):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else ("nan" if math.isnan(x) else ("inf" if x > 0 else "-inf"))
    if isinstance(x, complex):
        return [_json_safe(x.real), _json_safe(x.imag)]
    raise TypeError(f"cannot serialise {type(x).__name__}")


@dataclass
class ReportDocument:
    config: dict
    status: str = "complete"            # "complete" or "incomplete"
    transitivity: dict | None = None
    samples: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    witness: dict | None = None
    geometry: dict | None = None
    timing: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION
    version: str = __version__

    def __post_init__(self):
        for name in ("config", "transitivity", "samples", "verdicts", "witness", "geometry",
                     "timing", "errors"):
            setattr(self, name, _json_safe(getattr(self, name)))

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ReportDocument":
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        return cls.from_dict(json.loads(text))

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_json())

    # typed views

    def sample_objects(self) -> list:
        return [IndexSetSample.from_dict(s["sample"]) for s in self.samples]

    def verdict_objects(self) -> list:
        return [FamilyVerdict.from_dict(v["verdict"]) for v in self.verdicts]

    def transitivity_report(self) -> TransitivityReport | None:
        if self.transitivity is None:
            return None
        return TransitivityReport.from_dict(self.transitivity, self.sample_objects(),
                                            self.verdict_objects())


# ---------------------------------------------------------------------------
# geometry snapshots

def _decimate(v: np.ndarray, limit: int = MAX_SNAPSHOT_VERTICES) -> np.ndarray:
    if v.size <= limit:
        return v
    return v[np.linspace(0, v.size - 1, limit).astype(int)]


def _outline(R, view: float) -> dict:
    """Absolute outline of a (possibly framed) region, or a marker when it is tiny."""
    diam = math.ldexp(R.diameter(), R.scale_exp)
    if not diam >= MARKER_REL * view:
        x0, y0, x1, y1 = R.bbox()
        c = complex(R.to_absolute([complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))])[0])
        return {"marker": c, "diameter": diam}
    curves = [_decimate(R.to_absolute(c.vertices)) for c in R.curves()]
    return {"curves": [[complex(z) for z in c] for c in curves], "diameter": diam}


def _domain_geometry(d) -> dict:
    b = d.base
    return {"base": None if b is None else {"center": b.center, "radius": b.radius},
            "excluded": [{"center": e.center, "radius": e.radius} for e in d.excluded]}


def snapshot_indices(H: int, first_member) -> list:
    return sorted({1, H} | ({first_member} if first_member else set()))


def geometry_snapshots(maps, K, H: int, first_member) -> dict:
    """K and phi_i^n(K) at n in {1, n0, H}; tiny images become markers."""
    K = K.absolute()
    view = K.diameter()
    wanted = snapshot_indices(H, first_member)
    anchors = shared_anchors(maps, K)
    trackers = [ImageTracker(m, K, a) for m, a in zip(maps, anchors)]
    shots = []
    for n in range(1, wanted[-1] + 1):
        try:
            for t in trackers:
                t.step()
        except HoloTransitError as exc:
            shots.append({"n": n, "error": f"{type(exc).__name__}: {exc}"})
            break
        if n in wanted:
            shots.append({"n": n, "images": [_outline(t.region(), view) for t in trackers]})
    return {"compact": _outline(K, view), "snapshots": shots, "first_member": first_member,
            "horizon": H}


# ---------------------------------------------------------------------------
# orchestration

def _witness_section(c: ScenarioConfig, n_list) -> dict:
    """Fit and verify a witness at the first index of n_list that verifies."""
    ws = c.witness
    targets = ws.targets if ws and ws.targets else tuple(range(len(c.maps) + 1))
    gs = [constant(t) for t in targets]
    basis = ws.basis if ws else None
    K = c.compacts[0]
    domain = c.domain if isinstance(basis, RationalWithPoles) else None
    attempts = []
    for n in n_list:
        fit, check = construct_witness(c.maps, n, K, gs, basis, c.tolerances.eps_witness, domain)
        attempts.append({"n": n, "degree": fit.degree, "sup_error": fit.sup_error,
                         "ok": check.ok})
        if check.ok:
            break
    return {"n": n, "targets": list(targets), "basis": fit.witness.descriptor,
            "degree": fit.degree, "fit_errors": fit.fit_errors,
            "validation_errors": fit.validation_errors, "reached_degree_cap": fit.reached_degree_cap,
            "condition": fit.condition, "overfit": fit.overfit,
            "breakdown_degree": fit.breakdown_degree, "attempts": attempts,
            "check": check.to_dict(), "function": fit.witness.to_dict()}


def run_witness(c: ScenarioConfig, n: int | None = None, members=None) -> dict:
    if n is None and c.witness is not None:
        n = c.witness.n
    if n is not None:
        return _witness_section(c, [n])
    if not members:
        raise HoloTransitError("no run-away index available for the witness")
    return _witness_section(c, list(members)[:WITNESS_ATTEMPTS])


def run_scenario(c: ScenarioConfig, wall_clock: bool = False, threads: int | None = None,
                 witness_n: int | None = None) -> ReportDocument:
    """Run decide, classify each sample, then the optional witness; failures of
    optional stages mark the report incomplete instead of aborting it."""
    t0 = time.perf_counter()
    errors = []
    rep = decide(c.domain, c.maps, c.family, c.compacts, c.horizon, c.exhaustion_depth,
                 c.tolerances.separation, seed=c.seed, labels=c.compact_labels, threads=threads)
    samples = [{"compact": lab, "sample": s.to_dict()}
               for lab, s in zip(rep.compacts_tested, rep.samples)]
    verdicts = [{"compact": lab, "verdict": v.to_dict()}
                for lab, v in zip(rep.compacts_tested, rep.verdicts)]
    work = {"map_evaluations": 0, "fresh_recomputes": 0, "indices_examined": 0}
    for s in rep.samples:
        work["map_evaluations"] += s.work.get("map_evaluations", 0)
        work["fresh_recomputes"] += s.work.get("fresh_recomputes", 0)
        work["indices_examined"] += s.horizon

    geometry = {"domain": _domain_geometry(c.domain), "compact": None, "snapshots": []}
    if rep.samples:
        first = rep.samples[0].first_member
        try:
            geometry.update(geometry_snapshots(c.maps, c.compacts[0], c.horizon, first))
        except HoloTransitError as exc:
            errors.append({"stage": "geometry", "error": f"{type(exc).__name__}: {exc}"})

    witness = None
    wants_witness = c.witness is not None or witness_n is not None
    if wants_witness and rep.status is not OverallStatus.PROVEN_IMPOSSIBLE:
        members = rep.samples[0].members if rep.samples else ()
        try:
            witness = run_witness(c, witness_n, members)
        except HoloTransitError as exc:
            errors.append({"stage": "witness", "error": f"{type(exc).__name__}: {exc}"})
        else:
            if not witness["check"]["ok"]:
                errors.append({"stage": "witness", "error": "no attempted index verified"})
    if any(cert.status is InjectivityStatus.INCONCLUSIVE for cert in rep.injectivity):
        errors.append({"stage": "injectivity", "error": "injectivity not certified"})

    timing = {"work": work}
    if wall_clock:
        timing["wall_seconds"] = time.perf_counter() - t0
    return ReportDocument(config=c.echo, status="incomplete" if errors else "complete",
                          transitivity=rep.to_dict(), samples=samples, verdicts=verdicts,
                          witness=witness, geometry=geometry, timing=timing, errors=errors)


def witness_report(c: ScenarioConfig, n: int, wall_clock: bool = False) -> ReportDocument:
    """Report holding only a witness section for a fixed index n."""
    t0 = time.perf_counter()
    errors, witness = [], None
    try:
        witness = run_witness(c, n)
        if not witness["check"]["ok"]:
            errors.append({"stage": "witness", "error": "witness did not verify"})
    except HoloTransitError as exc:
        errors.append({"stage": "witness", "error": f"{type(exc).__name__}: {exc}"})
    timing = {"work": {}}
    if wall_clock:
        timing["wall_seconds"] = time.perf_counter() - t0
    return ReportDocument(config=c.echo, status="incomplete" if errors else "complete",
                          witness=witness, timing=timing, errors=errors)
