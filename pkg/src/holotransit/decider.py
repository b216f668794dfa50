"""Top-level verdicts on disjoint F-transitivity of composition operators C_phi_1, ..., C_phi_N.

Dispatch on the connectivity class of the domain:

* finitely (but not simply) connected: no N >= 2 composition operators are
  disjoint transitive, so the verdict is ProvenImpossible with no computation;
* simply connected (the unit disk): injectivity of every symbol plus run-away
  index sets D(K) classified against the family;
* infinitely connected (finite truncation): as above, with every image required
  to be Omega-convex and the union K + images checked for Omega-convexity;
* the full plane: computed like the disk but reported OutsideHypothesis.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .domains import (CompactRegion, ConnectivityClass, DomainSpec, exhaustion, exhaustion_plan,
                      is_omega_convex, omega_convexity_of_union)
from .dynamics import pairwise_disjoint, run_away_set
from .errors import HypothesisViolation, PreconditionViolation
from .families import Infinite, classify, family_to_dict
from .geometry import SEPARATION_TOL
from .symbols import (InjectivityCertificate, InjectivityStatus, MapExpr, check_injective,
                      validate_self_map)

THREADS_ENV = "HOLO_TRANSIT_THREADS"


class OverallStatus(enum.Enum):
    PROVEN_IMPOSSIBLE = "ProvenImpossible"
    CONSISTENT = "ConsistentUpToHorizon"
    REFUTED = "RefutedAtHorizon"
    OUTSIDE_HYPOTHESIS = "OutsideHypothesis"


IMPOSSIBILITY_CHAIN = (
    "Omega is finitely connected and not simply connected: no N >= 2 composition "
    "operators on H(Omega) are disjoint transitive.",
    "Every family F of infinite sets satisfies F-transitive => transitive, so the "
    "verdict holds a fortiori for the requested family.",
)


@dataclass(frozen=True)
class TransitivityReport:
    domain_class: str
    status: OverallStatus
    family: object
    horizon: int
    injectivity: tuple = ()
    self_map_checks: tuple = ()
    samples: tuple = ()
    verdicts: tuple = ()
    compacts_tested: tuple = ()
    refuting: str | None = None
    narrative: tuple = ()
    internal_inconsistencies: tuple = ()
    at_truncation: bool = False

    __hash__ = None

    def to_dict(self) -> dict:
        return {
            "domain_class": self.domain_class,
            "status": self.status.value,
            "family": family_to_dict(self.family),
            "horizon": self.horizon,
            "injectivity": [c.to_dict() for c in self.injectivity],
            "self_map_checks": [dict(c) for c in self.self_map_checks],
            "compacts_tested": list(self.compacts_tested),
            "refuting": self.refuting,
            "narrative": list(self.narrative),
            "internal_inconsistencies": list(self.internal_inconsistencies),
            "at_truncation": self.at_truncation,
        }

    @classmethod
    def from_dict(cls, d: dict, samples=(), verdicts=()) -> "TransitivityReport":
        from .families import family_from_dict
        return cls(d["domain_class"], OverallStatus(d["status"]), family_from_dict(d["family"]),
                   d["horizon"], tuple(InjectivityCertificate.from_dict(c) for c in d["injectivity"]),
                   tuple(d["self_map_checks"]), tuple(samples), tuple(verdicts),
                   tuple(d["compacts_tested"]), d["refuting"], tuple(d["narrative"]),
                   tuple(d["internal_inconsistencies"]), d["at_truncation"])


@dataclass(frozen=True)
class UnionCheck:
    convex: bool
    internal_inconsistency: bool = False
    hole_id: str | None = None
    premises_hold: bool = True

    def __bool__(self):
        return self.convex


def union_convexity_check(K: CompactRegion, images, d: DomainSpec) -> UnionCheck:
    """Omega-convexity of K together with its images.

    When K and the images are pairwise disjoint, each Omega-convex and K has
    at least two holes, the union must be Omega-convex, so any false result is
    flagged as an internal inconsistency.  ``premises_hold`` records whether
    the inputs actually met those conditions (a false result with failed
    premises points at the caller, not at the geometry layer).
    """
    images = list(images)
    regions = [K] + images
    res = omega_convexity_of_union(regions, d)
    if res.convex:
        return UnionCheck(True)
    premises = (K.hole_count() >= 2 and all(is_omega_convex(R, d) for R in regions)
                and (len(regions) < 2 or bool(pairwise_disjoint(regions))))
    return UnionCheck(False, True, res.hole_id, premises)


def thread_count(default: int | None = None) -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return default or min(4, os.cpu_count() or 1)


def _largest(compacts):
    return max(compacts, key=lambda K: K.absolute().diameter())


def decide(d: DomainSpec, maps, f, compacts, H: int, exhaustion_depth: int = 0,
           tol: float = SEPARATION_TOL, samples: int = 512, seed: int = 0,
           labels=None, threads: int | None = None) -> TransitivityReport:
    maps = list(maps)
    if len(maps) < 2:
        raise HypothesisViolation("disjointness needs at least two symbols (N >= 2)")
    if not all(isinstance(m, MapExpr) for m in maps):
        raise HypothesisViolation("symbols must be map expressions")
    cls = d.declared_class
    truncated = cls is ConnectivityClass.INFINITELY_CONNECTED
    if cls is ConnectivityClass.FINITELY_CONNECTED:
        narrative = IMPOSSIBILITY_CHAIN if not isinstance(f, Infinite) else IMPOSSIBILITY_CHAIN[:1]
        return TransitivityReport(cls.value, OverallStatus.PROVEN_IMPOSSIBLE, f, H,
                                  narrative=narrative)

    checks = []
    for i, m in enumerate(maps):
        c = validate_self_map(m, d, samples, seed)
        checks.append({"map": i, "ok": c.ok, "samples": c.samples,
                       "truncation_hits": c.truncation_hits})
        if not c.ok:
            raise HypothesisViolation(f"map {i} is not a self-map: {c.z} -> {c.image}")

    compacts = [K.absolute() for K in compacts]
    labels = list(labels) if labels is not None else [f"compact{i}" for i in range(len(compacts))]
    if exhaustion_depth and compacts:
        plan = exhaustion_plan(d, compacts[0])
        for l in range(1, exhaustion_depth + 1):
            compacts.append(exhaustion(d, l, compacts[0], plan))
            labels.append(f"exhaustion{l}")
    if not compacts:
        raise PreconditionViolation("no compacts to test")
    for lab, K in zip(labels, compacts):
        if not K.within(d):
            raise PreconditionViolation(f"{lab} is not contained in the domain")
        if truncated:
            if len(K.faces) != 1 or K.hole_count() < 2 or not is_omega_convex(K, d):
                raise PreconditionViolation(
                    f"{lab} must be connected, Omega-convex and have at least two holes")

    big = _largest(compacts)
    certs = tuple(check_injective(m, big, seed=seed) for m in maps)
    narrative = []
    if truncated:
        narrative.append(f"verdict at truncation: {d.truncation_note}")
    for i, c in enumerate(certs):
        if c.status is InjectivityStatus.NOT_INJECTIVE:
            narrative.append(f"map {i} is not injective on the largest compact; witness {c.witness}")
            return TransitivityReport(cls.value, OverallStatus.REFUTED, f, H, certs, tuple(checks),
                                      (), (), tuple(labels), f"map {i} not injective",
                                      tuple(narrative), (), truncated)

    def work(K):
        return run_away_set(maps, K, H, d, require_convexity=truncated, tol=tol)

    n_threads = thread_count(threads)
    if n_threads > 1 and len(compacts) > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            sample_list = list(pool.map(work, compacts))
    else:
        sample_list = [work(K) for K in compacts]
    verdicts = [classify(s, f) for s in sample_list]

    inconsistencies = []
    for lab, s in zip(labels, sample_list):
        for n in s.internal_inconsistencies:
            inconsistencies.append(f"{lab}: union of K and images at n={n} is not Omega-convex")
            narrative.append(f"internal inconsistency: {inconsistencies[-1]}")

    if truncated:
        for lab, s in zip(labels, sample_list):
            conv = [r.n for r in s.rejections if r.reason == "not_omega_convex"]
            if conv:
                narrative.append(f"{lab}: {len(conv)} indices (first {conv[0]}) rejected only because "
                                 "an image hole misses the finitely many excluded disks")

    refuting = next((lab for lab, v in zip(labels, verdicts) if not v.consistent), None)
    inconclusive = [i for i, c in enumerate(certs) if c.status is InjectivityStatus.INCONCLUSIVE]
    if refuting is not None:
        status = OverallStatus.REFUTED
        narrative.append(f"{refuting}: run-away set refutes {f.name} at horizon {H}")
    elif d.is_full_plane:
        status = OverallStatus.OUTSIDE_HYPOTHESIS
        narrative.append("Omega is the whole plane; the disk characterization assumes Omega != C")
    elif inconclusive:
        status = OverallStatus.OUTSIDE_HYPOTHESIS
        narrative.append(f"injectivity not certified for maps {inconclusive}")
    else:
        status = OverallStatus.CONSISTENT
        narrative.append(f"ConsistentUpToHorizon (tested compacts: {', '.join(labels)})")
    if refuting is not None and d.is_full_plane:
        narrative.append("Omega is the whole plane; the verdict is outside the characterization's hypothesis")
        status = OverallStatus.OUTSIDE_HYPOTHESIS
    return TransitivityReport(cls.value, status, f, H, certs, tuple(checks), tuple(sample_list),
                              tuple(verdicts), tuple(labels), refuting, tuple(narrative),
                              tuple(inconsistencies), truncated)
