"""Zero counting by the argument principle, using argument increments along a polyline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonIntegerResidual, ZeroOnContour
from .geometry import INCIDENCE_TOL, _vertices

MAX_STEP_ANGLE = np.pi / 3   # edges whose argument jumps more than this get subdivided
MAX_EVALUATIONS = 400_000
RESIDUAL_LIMIT = 0.1


@dataclass(frozen=True)
class ZeroCount:
    count: int
    residual: float   # |total / 2 pi - count| before rounding
    evaluations: int

    def __int__(self):
        return self.count

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.count == other
        if isinstance(other, ZeroCount):
            return (self.count, self.residual) == (other.count, other.residual)
        return NotImplemented

    __hash__ = None


def _eval(f, z, tol):
    w = np.asarray(f(z), dtype=complex)
    bad = ~np.isfinite(w) | (np.abs(w) <= tol)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise ZeroOnContour(f"f vanishes (or is singular) on the contour near {complex(z[k]):.6g}")
    return w


def argument_increment(f, curve, tol: float = INCIDENCE_TOL, budget: int = MAX_EVALUATIONS):
    """Total change of arg f along the closed polyline, and the number of evaluations.

    Each edge contributes the principal argument of f(b)/f(a); edges where that
    jump exceeds MAX_STEP_ANGLE are bisected (f sampled on the straight segment)
    until every jump is small, so the sum tracks the continuous argument.
    """
    v = _vertices(curve)
    a, b = v, np.roll(v, -1)
    fa = _eval(f, v, tol)
    fb = np.roll(fa, -1)
    evals = v.size
    total = 0.0
    while a.size:
        d = np.angle(fb / fa)
        small = np.abs(d) <= MAX_STEP_ANGLE
        total += float(d[small].sum())
        a, b, fa, fb = a[~small], b[~small], fa[~small], fb[~small]
        if not a.size:
            break
        evals += a.size
        if evals > budget:
            raise NonIntegerResidual(float("nan"), "argument tracking exceeded its evaluation budget")
        m = 0.5 * (a + b)
        if np.any(m == a) or np.any(m == b):
            raise NonIntegerResidual(float("nan"), "argument jump persists at machine resolution")
        fm = _eval(f, m, tol)
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
        fa, fb = np.concatenate([fa, fm]), np.concatenate([fm, fb])
    return total, evals


def zero_count(f, curve, tol: float = INCIDENCE_TOL) -> ZeroCount:
    """Zeros minus poles of f enclosed by the curve, weighted by winding number.

    f is any callable accepting complex arrays (map expressions, combs, lambdas).
    """
    total, evals = argument_increment(f, curve, tol)
    x = total / (2 * np.pi)
    n = int(np.rint(x))
    res = abs(x - n)
    if res > RESIDUAL_LIMIT:
        raise NonIntegerResidual(res, f"argument increment {x:.4f} turns is not near an integer")
    return ZeroCount(n, res, evals)
