"""Furstenberg families as predicates on finite index samples.

A finite computation can refute membership or stay consistent with it, never
prove it, so verdicts are ``ConsistentUpToHorizon`` or ``RefutedAtHorizon``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import HorizonTooSmall, ValidationError

HORIZON_LABEL = "ConsistentUpToHorizon is not a proof of membership in the family"
THICK_PROXY_NOTE = "thick at a finite horizon: a run of the given length in [1,H] and in [H/2,H]"


class Status(enum.Enum):
    CONSISTENT = "ConsistentUpToHorizon"
    REFUTED = "RefutedAtHorizon"


@dataclass(frozen=True)
class Infinite:
    name = "infinite"

    @property
    def param(self):
        return None


@dataclass(frozen=True)
class Cofinite:
    tail_start_max: int
    name = "cofinite"

    @property
    def param(self):
        return self.tail_start_max


@dataclass(frozen=True)
class Syndetic:
    gap_bound: int
    name = "syndetic"

    @property
    def param(self):
        return self.gap_bound


@dataclass(frozen=True)
class Thick:
    run_length: int
    name = "thick"

    @property
    def param(self):
        return self.run_length


FAMILY_TYPES = {"infinite": Infinite, "cofinite": Cofinite, "syndetic": Syndetic, "thick": Thick}


def family_from_dict(d: dict):
    kind = d.get("kind")
    if kind not in FAMILY_TYPES:
        raise ValidationError("family.kind", f"unknown family {kind!r}")
    if kind == "infinite":
        if d.get("param") is not None:
            raise ValidationError("family.param", "the infinite family takes no parameter")
        return Infinite()
    p = d.get("param")
    if not isinstance(p, int) or isinstance(p, bool) or p < 1:
        raise ValidationError("family.param", "family parameter must be a positive integer")
    return FAMILY_TYPES[kind](p)


def family_to_dict(f) -> dict:
    return {"kind": f.name, "param": f.param}


def parse_family(kind: str, param: int | None = None):
    return family_from_dict({"kind": kind.lower(), "param": param})


@dataclass(frozen=True)
class FamilyVerdict:
    family: object
    status: Status
    horizon: int
    evidence: dict = field(default_factory=dict)

    __hash__ = None

    @property
    def consistent(self) -> bool:
        return self.status is Status.CONSISTENT

    def to_dict(self) -> dict:
        return {"family": family_to_dict(self.family), "status": self.status.value,
                "horizon": self.horizon, "evidence": dict(self.evidence)}

    @classmethod
    def from_dict(cls, d: dict) -> "FamilyVerdict":
        return cls(family_from_dict(d["family"]), Status(d["status"]), d["horizon"],
                   dict(d["evidence"]))


# ---------------------------------------------------------------------------
# evidence arithmetic

def _gaps(members, H):
    """Distances between consecutive points of 0, members..., H."""
    pts = [0] + list(members) + [H]
    return [b - a for a, b in zip(pts[:-1], pts[1:])]


def _longest_run(ms, lo, hi):
    best = cur = 0
    prev = None
    for m in ms:
        if m < lo or m > hi:
            continue
        cur = cur + 1 if prev is not None and m == prev + 1 else 1
        prev = m
        best = max(best, cur)
    return best


def top_half_start(H: int) -> int:
    return math.ceil(H / 2)


def evidence_for(members, H: int, f) -> dict:
    """Variant-specific evidence, recomputable from the member list alone."""
    ms = sorted(set(members))
    mset = set(ms)
    if isinstance(f, Infinite):
        return {"top_half_count": sum(1 for m in ms if m >= top_half_start(H)),
                "member_count": len(ms)}
    if isinstance(f, Cofinite):
        tail = H + 1
        while tail - 1 >= 1 and (tail - 1) in mset:
            tail -= 1
        first_gap = next((n for n in range(f.tail_start_max, H + 1) if n not in mset), None)
        return {"observed_tail_start": tail if tail <= H else None, "first_gap_after_t": first_gap}
    if isinstance(f, Syndetic):
        return {"max_gap": max(_gaps(ms, H)), "member_count": len(ms)}
    if isinstance(f, Thick):
        return {"max_run": _longest_run(ms, 1, H),
                "max_run_top_half": _longest_run(ms, top_half_start(H), H)}
    raise TypeError(f"unknown family {f!r}")


def _consistent(ev: dict, f) -> bool:
    if isinstance(f, Infinite):
        return ev["top_half_count"] >= 1
    if isinstance(f, Cofinite):
        return ev["first_gap_after_t"] is None
    if isinstance(f, Syndetic):
        return ev["member_count"] > 0 and ev["max_gap"] <= f.gap_bound
    if isinstance(f, Thick):
        return ev["max_run"] >= f.run_length and ev["max_run_top_half"] >= f.run_length
    raise TypeError(f"unknown family {f!r}")


def classify(sample, f, horizon: int | None = None) -> FamilyVerdict:
    """Verdict for an index sample (or a plain member collection with ``horizon``)."""
    if horizon is None:
        members, H = sample.members, sample.horizon
    else:
        members, H = sample, horizon
    if f.param is not None and H < 2 * f.param:
        raise HorizonTooSmall(f"horizon {H} is below twice the {f.name} parameter {f.param}")
    ev = evidence_for(members, H, f)
    status = Status.CONSISTENT if _consistent(ev, f) else Status.REFUTED
    return FamilyVerdict(f, status, H, ev)


def recheck(verdict: FamilyVerdict, members) -> bool:
    """Stored evidence and status agree with a recomputation from the members."""
    ev = evidence_for(members, verdict.horizon, verdict.family)
    return ev == verdict.evidence and _consistent(ev, verdict.family) == verdict.consistent


# ---------------------------------------------------------------------------
# implication matrix

@dataclass(frozen=True)
class ImplicationReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def _implies(strong, weak, H: int) -> bool:
    """Whether Consistent(strong) forces Consistent(weak) at horizon H for these parameters."""
    if isinstance(weak, Infinite):
        return not isinstance(strong, Infinite)
    if isinstance(strong, Cofinite):
        t = strong.tail_start_max
        if isinstance(weak, Syndetic):
            return t <= weak.gap_bound
        if isinstance(weak, Thick):
            return H - max(t, top_half_start(H)) + 1 >= weak.run_length
    return False


def implication_matrix(verdicts) -> ImplicationReport:
    """Flag Consistent(strong) with Refuted(weak) where the hierarchy forbids it.

    Checked: cofinite => thick, syndetic, infinite; syndetic => infinite;
    thick => infinite.  Parameters must be compatible for the implication to bind.
    """
    vs = [(f, v) for f, v in verdicts]
    out = []
    for fs, vs_ in vs:
        if not vs_.consistent:
            continue
        for fw, vw in vs:
            if vw.consistent or vw.horizon != vs_.horizon:
                continue
            if _implies(fs, fw, vs_.horizon):
                out.append(f"{fs.name}({fs.param}) consistent but {fw.name}({fw.param}) refuted")
    return ImplicationReport(tuple(out))
