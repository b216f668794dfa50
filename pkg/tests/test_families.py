import pytest
from hypothesis import given, strategies as st

from holotransit.errors import HorizonTooSmall, ValidationError
from holotransit.families import (Cofinite, FamilyVerdict, Infinite, Status, Syndetic, Thick,
                                  classify, evidence_for, family_from_dict, family_to_dict,
                                  implication_matrix, parse_family, recheck)

H = 200
EVENS = list(range(2, H + 1, 2))
TAIL = list(range(5, H + 1))


def status(members, f, horizon=H):
    return classify(members, f, horizon=horizon).status


def test_evens():
    assert status(EVENS, Syndetic(2)) is Status.CONSISTENT
    assert status(EVENS, Cofinite(50)) is Status.REFUTED
    assert status(EVENS, Thick(2)) is Status.REFUTED


def test_tail():
    assert status(TAIL, Cofinite(5)) is Status.CONSISTENT
    assert status(TAIL, Thick(10)) is Status.CONSISTENT
    assert status(TAIL, Syndetic(5)) is Status.CONSISTENT
    assert classify(TAIL, Cofinite(5), horizon=H).evidence["observed_tail_start"] == 5


def test_empty_refutes_everything():
    for f in (Infinite(), Cofinite(5), Syndetic(5), Thick(5)):
        assert status([], f) is Status.REFUTED


def test_horizon_too_small():
    with pytest.raises(HorizonTooSmall):
        classify([1, 2, 3], Thick(10), horizon=15)


def test_codec():
    for f in (Infinite(), Cofinite(3), Syndetic(4), Thick(5)):
        assert family_from_dict(family_to_dict(f)) == f
    assert parse_family("Thick", 3) == Thick(3)
    with pytest.raises(ValidationError):
        family_from_dict({"kind": "dense"})
    with pytest.raises(ValidationError):
        family_from_dict({"kind": "thick", "param": 0})


def test_verdict_round_trip_and_recheck():
    v = classify(EVENS, Syndetic(2), horizon=H)
    assert FamilyVerdict.from_dict(v.to_dict()) == v
    assert recheck(v, EVENS)
    assert not recheck(v, EVENS[:-10])


def test_implication_examples():
    fams = (Infinite(), Cofinite(5), Syndetic(5), Thick(10))
    ok = implication_matrix([(f, classify(TAIL, f, horizon=H)) for f in fams])
    assert ok
    corrupted = [(Cofinite(5), classify(TAIL, Cofinite(5), horizon=H)),
                 (Infinite(), FamilyVerdict(Infinite(), Status.REFUTED, H, {}))]
    bad = implication_matrix(corrupted)
    assert not bad and "infinite" in bad.violations[0]
    fams = (Infinite(), Cofinite(50), Syndetic(2), Thick(2))
    assert implication_matrix([(f, classify(EVENS, f, horizon=H)) for f in fams])


# ---------------------------------------------------------------------------
# properties

members_st = st.sets(st.integers(1, H), max_size=H)
family_st = st.one_of(st.just(Infinite()), st.builds(Cofinite, st.integers(1, H // 2)),
                      st.builds(Syndetic, st.integers(1, H // 2)),
                      st.builds(Thick, st.integers(1, H // 2)))


@given(members_st, members_st, family_st)
def test_upward_heredity(a, extra, f):
    b = a | extra
    if status(sorted(a), f) is Status.CONSISTENT:
        assert status(sorted(b), f) is Status.CONSISTENT


@given(members_st, st.integers(1, 100), st.integers(1, 100))
def test_implications_hold_on_every_sample(a, t, g):
    ms = sorted(a)
    fams = [Infinite(), Cofinite(t), Syndetic(max(g, t)), Thick(min(g, H // 2 - t + 1) if t <= H // 2 else 1)]
    assert implication_matrix([(f, classify(ms, f, horizon=H)) for f in fams])


@given(members_st, family_st)
def test_evidence_is_reproducible(a, f):
    v = classify(sorted(a), f, horizon=H)
    assert v.evidence == evidence_for(sorted(a), H, f)
    assert recheck(v, sorted(a))
