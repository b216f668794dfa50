"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the criterion lines are
written straight to the terminal even when output is captured.
"""

import json
import time
from contextlib import contextmanager

import numpy as np
import pytest

from holotransit.argument import zero_count
from holotransit.cli import main
from holotransit.config import load_config, parse_config
from holotransit.decider import OverallStatus, decide, union_convexity_check
from holotransit.domains import CompactRegion, Face, annulus_region, disk_region, is_omega_convex, unit_disk
from holotransit.dynamics import image_of_compact, run_away_set
from holotransit.errors import ZeroOnContour
from holotransit.families import (Cofinite, Infinite, Status, Syndetic, Thick, classify,
                                  implication_matrix)
from holotransit.geometry import (ClosedPolyline, Orientation, circle, distance_to_curve, orientation,
                                  points_in_face, winding_numbers)
from holotransit.report import run_scenario, run_witness
from holotransit.symbols import Composite, InjectivityStatus, IterateSpec, Mobius, check_injective
from holotransit.witness import Witness, build_proof_comb, constant, verify_witness
from tests.oracles import face_oracle, hyperbolic_pair_members, ray_cast_inside

PHI = Mobius(1, 0.5, 0.5, 1)
PAIR = [PHI, Composite((PHI, PHI))]
CONFIGS = ("annulus_impossibility", "hyperbolic_pair", "rotation", "infinitely_connected", "witness")


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def record(number: int, title: str):
        try:
            yield
        except BaseException as exc:
            with capsys.disabled():
                print(f"\ncriterion {number:2d}: FAIL  {title} ({type(exc).__name__}: {exc})")
            raise
        with capsys.disabled():
            print(f"\ncriterion {number:2d}: PASS  {title}")
    return record


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


@pytest.fixture(scope="module")
def pair_200():
    return timed(run_away_set, PAIR, disk_region(0, 0.3), 200, unit_disk())


# ---------------------------------------------------------------------------

def test_c01_annulus_impossibility(criterion, tmp_path):
    with criterion(1, "annulus with two Mobius self-maps is ProvenImpossible in < 1 s"):
        out = tmp_path / "r.json"
        code, dt = timed(main, ["analyze", "--config", "configs/annulus_impossibility.json", "--out", str(out)])
        assert code == 0 and dt < 1.0
        assert json.loads(out.read_text())["transitivity"]["status"] == "ProvenImpossible"
        # every Mobius self-map of {1 < |z| < 3} is a rotation or z -> 3 e^{it} / z
        base = json.loads(open("configs/annulus_impossibility.json").read())
        rng = np.random.default_rng(1)
        for _ in range(5):
            maps = []
            for kind in rng.integers(0, 2, 2):
                u = np.exp(1j * rng.uniform(0, 2 * np.pi))
                m = ({"type": "mobius", "a": [u.real, u.imag], "b": [0, 0], "c": [0, 0], "d": [1, 0]}
                     if kind == 0 else
                     {"type": "mobius", "a": [0, 0], "b": [3 * u.real, 3 * u.imag], "c": [1, 0], "d": [0, 0]})
                maps.append(m)
            doc, dt = timed(run_scenario, parse_config(json.dumps({**base, "maps": maps})))
            assert doc.transitivity["status"] == "ProvenImpossible" and dt < 1.0


def test_c02_hyperbolic_pair_final_segment(criterion, pair_200):
    with criterion(2, "hyperbolic pair at H=200: final segment, oracle match, Cofinite consistent, < 30 s"):
        s, dt = pair_200
        oracle = hyperbolic_pair_members(0.3, 200)
        assert list(s.members) == oracle
        n0 = s.members[0]
        assert s.members == tuple(range(n0, 201))
        assert classify(list(s.members), Cofinite(n0), horizon=200).status is Status.CONSISTENT
        rep, dt2 = timed(decide, unit_disk(), PAIR, Cofinite(n0), [disk_region(0, 0.3)], 200)
        assert rep.status is OverallStatus.CONSISTENT
        assert dt < 30 and dt2 < 30


def test_c03_rotation_refutes_everything(criterion):
    with criterion(3, "rotation i*z with K=disk(0,0.5): no members, all four families refuted, < 5 s"):
        cfg = load_config("configs/rotation.json")
        assert cfg.maps[0] == Mobius(1j, 0, 0, 1)
        doc, dt = timed(run_scenario, cfg)
        assert dt < 5
        members = doc.sample_objects()[0].members
        assert members == ()
        for f in (Infinite(), Cofinite(1), Syndetic(1), Thick(1), Cofinite(50), Syndetic(50), Thick(50)):
            assert classify(list(members), f, horizon=cfg.horizon).status is Status.REFUTED
        assert doc.transitivity["status"] == "RefutedAtHorizon"


def test_c04_horizon_doubling_grows(criterion, pair_200):
    with criterion(4, "members(H=400) strictly contain members(H=200)"):
        s200, _ = pair_200
        s400 = run_away_set(PAIR, disk_region(0, 0.3), 400, unit_disk())
        assert set(s200.members) < set(s400.members)


def test_c05_infinitely_connected_images(criterion):
    with criterion(5, "infinitely connected fixture: member images Omega-convex, union check true"):
        cfg = load_config("configs/infinitely_connected.json")
        d, K = cfg.domain, cfg.compacts[0]
        assert len(d.excluded) == 8 and is_omega_convex(K, d)
        rep = decide(d, cfg.maps, cfg.family, cfg.compacts, cfg.horizon, labels=cfg.compact_labels)
        assert rep.internal_inconsistencies == ()
        members = rep.samples[0].members
        assert members
        for n in members:
            images = [image_of_compact(IterateSpec(m, n), K).absolute() for m in cfg.maps]
            for img in images:
                assert is_omega_convex(img, d), f"image at n={n} not Omega-convex"
            u = union_convexity_check(K, images, d)
            assert u, f"union check failed at n={n}: internal inconsistency"


def test_c06_argument_principle(criterion):
    with criterion(6, "zero_count of (z-0.2)(z-0.5) is 2; transfer identity on 20 Mobius fixtures"):
        zc = zero_count(lambda z: (z - 0.2) * (z - 0.5), circle(0, 1, 256))
        assert zc.count == 2 and zc.residual < 1e-3
        rng = np.random.default_rng(6)
        done = 0
        while done < 20:
            a = complex(*rng.uniform(-0.6, 0.6, 2))
            u = np.exp(1j * rng.uniform(0, 2 * np.pi))
            phi = Mobius(u, -u * a, -np.conj(a), 1)
            zeros = rng.uniform(-0.7, 0.7, (2, 2)) @ [1, 1j]
            f = lambda w: (w - zeros[0]) * (w - zeros[1])
            gamma = circle(0, 0.8, 256)
            try:
                lhs = zero_count(lambda z: f(phi(z)), gamma)
                rhs = zero_count(f, ClosedPolyline(phi(gamma.vertices)))
            except ZeroOnContour:
                continue
            assert lhs.count == rhs.count and lhs.residual < 1e-3 and rhs.residual < 1e-3
            done += 1


def test_c07_comb_normalization(criterion):
    with criterion(7, "comb counts: 1 around the zero and all poles, p+1 around the zero alone"):
        for p in (1, 2, 3):
            poles = tuple(0.6 * np.exp(2j * np.pi * k / p) for k in range(p))
            g = build_proof_comb(0.1 + 0.1j, poles, 2.5)
            assert zero_count(g, circle(0, 1.5)) == 1
            assert zero_count(g, circle(0.1 + 0.1j, 0.2)) == p + 1


def test_c08_witness(criterion):
    with criterion(8, "witness for targets 0, 1, 2 at a member n: sup error < 1e-6, degree <= 60"):
        cfg = load_config("configs/witness.json")
        members = run_away_set(cfg.maps, cfg.compacts[0], cfg.horizon, cfg.domain).members
        w = run_witness(cfg, None, members)
        n = w["n"]
        assert n in members and n >= members[0]
        assert w["check"]["ok"] and w["degree"] <= 60
        assert max(w["validation_errors"]) < 1e-6
        h = Witness.from_dict(w["function"])
        check = verify_witness(h, cfg.maps, n, cfg.compacts[0], [constant(t) for t in (0, 1, 2)], 1e-6)
        assert check.ok and max(check.errors) < 1e-6


def test_c09_family_axioms(criterion):
    with criterion(9, "500 nested pairs: upward heredity and implication matrix, zero violations"):
        H = 200
        rng = np.random.default_rng(9)
        violations = 0
        for _ in range(500):
            a = set(np.flatnonzero(rng.random(H) < rng.random()) + 1)
            b = a | set(np.flatnonzero(rng.random(H) < rng.random() * 0.3) + 1)
            A, B = sorted(int(x) for x in a), sorted(int(x) for x in b)
            t, g = int(rng.integers(1, H // 2)), int(rng.integers(1, H // 2))
            fams = [Infinite(), Cofinite(t), Syndetic(max(g, t)), Thick(min(g, H // 2 - t + 1))]
            for f in fams:
                if (classify(A, f, horizon=H).status is Status.CONSISTENT
                        and classify(B, f, horizon=H).status is not Status.CONSISTENT):
                    violations += 1
            for S in (A, B):
                if not implication_matrix([(f, classify(S, f, horizon=H)) for f in fams]):
                    violations += 1
        assert violations == 0


def _star(rng, n):
    t = np.sort(rng.uniform(0, 2 * np.pi, n))
    t = t[np.concatenate([[True], np.diff(t) > 1e-3])]
    gaps = np.diff(np.concatenate([t, [t[0] + 2 * np.pi]]))
    if t.size < 8 or gaps.max() >= 0.9 * np.pi:     # keep the polygon star-shaped about 0
        t = 2 * np.pi * np.arange(n) / n
    return ClosedPolyline(rng.uniform(0.5, 1.5, t.size) * np.exp(1j * t))


def test_c10_geometry_invariants(criterion):
    with criterion(10, "10^4 randomized winding, orientation and point-in-face cases; image topology kept"):
        rng = np.random.default_rng(10)
        wind = inface = orient = 0
        while min(wind, inface, orient) < 10_000:
            c = _star(rng, int(rng.integers(8, 40)))
            rev = c.reversed()
            assert orientation(c) is Orientation.POSITIVE and orientation(rev) is Orientation.NEGATIVE
            orient += 2
            pts = rng.uniform(-1.6, 1.6, (40, 2)) @ [1, 1j]
            pts = pts[distance_to_curve(c, pts) > 1e-6]
            inside = ray_cast_inside(c.vertices, pts)
            assert np.array_equal(winding_numbers(c, pts), inside.astype(int))
            assert np.array_equal(winding_numbers(rev, pts), -inside.astype(int))
            wind += 2 * pts.size
            hole = ClosedPolyline(circle(0, 0.2, 16).vertices * rng.uniform(0.5, 1.2))
            pts = pts[distance_to_curve(hole, pts) > 1e-6]
            assert np.array_equal(points_in_face(c, [hole], pts),
                                  face_oracle(c.vertices, [hole.vertices], pts))
            inface += pts.size

        two = CompactRegion((Face(circle(-0.4, 0.15), (circle(-0.4, 0.05),)), Face(circle(0.3, 0.1), ())))
        fixtures = [disk_region(0, 0.3), annulus_region(0.1, 0.2, 0.35), two,
                    load_config("configs/infinitely_connected.json").compacts[0]]
        maps = [PHI, Composite((PHI, PHI)), Mobius(1j, 0, 0, 1), Mobius(1, -0.3j, 0.3j, 1)]
        for K in fixtures:
            shape = [len(f.holes) for f in K.faces]
            for m in maps:
                if check_injective(m, K).status is not InjectivityStatus.INJECTIVE:
                    continue
                for n in (1, 5, 40):
                    img = image_of_compact(IterateSpec(m, n), K)
                    assert [len(f.holes) for f in img.faces] == shape


@pytest.mark.parametrize("name", CONFIGS)
def test_c11_determinism(criterion, name, tmp_path):
    with criterion(11, f"two runs of {name} give byte-identical reports"):
        outs = []
        for k in range(2):
            out, svg = tmp_path / f"{k}.json", tmp_path / f"{k}.svg"
            assert main(["analyze", "--config", f"configs/{name}.json", "--out", str(out),
                         "--svg", str(svg)]) == 0
            outs.append((out.read_bytes(), svg.read_bytes()))
        assert outs[0] == outs[1]
