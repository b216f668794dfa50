import json

import pytest

from holotransit.config import load_config, parse_config
from holotransit.domains import ConnectivityClass, is_omega_convex
from holotransit.errors import ParseError, ValidationError
from holotransit.families import Cofinite, Infinite
from holotransit.witness import RationalWithPoles

PHI = {"type": "mobius", "a": [1, 0], "b": [0.5, 0], "c": [0.5, 0], "d": [1, 0]}


def minimal(**over) -> dict:
    cfg = {
        "schema_version": 1,
        "domain": {"base": {"center": [0, 0], "radius": 1}, "class": "simply_connected"},
        "maps": [PHI, {"type": "composite", "parts": [PHI, PHI]}],
        "family": {"kind": "infinite"},
        "compacts": [{"disk": {"center": [0, 0], "radius": 0.3}}],
        "horizon": 20,
    }
    cfg.update(over)
    return cfg


def parse(cfg: dict):
    return parse_config(json.dumps(cfg, indent=1))


def test_minimal_config_loads():
    c = parse(minimal())
    assert c.family == Infinite() and c.horizon == 20 and len(c.maps) == 2
    assert c.compact_labels == ("disk(0+0j,0.3)",)
    assert c.domain.declared_class is ConnectivityClass.SIMPLY_CONNECTED
    assert c.outputs.report is None and c.witness is None
    # the echo is itself a valid config describing the same scenario
    again = parse_config(json.dumps({k: v for k, v in c.echo.items() if v is not None}))
    assert again.echo == c.echo


def test_shipped_configs_load():
    for name in ("annulus_impossibility", "hyperbolic_pair", "rotation", "infinitely_connected", "witness"):
        c = load_config(f"configs/{name}.json")
        assert c.outputs.report == f"out/{name}.json"


def test_degenerate_mobius_names_the_map():
    bad = {"type": "mobius", "a": [1, 0], "b": [2, 0], "c": [1, 0], "d": [2, 0]}
    with pytest.raises(ValidationError) as exc:
        parse(minimal(maps=[bad, PHI]))
    assert exc.value.field == "maps[0]"


def test_unknown_key_reports_line():
    text = json.dumps(minimal(fooo=1), indent=1)
    with pytest.raises(ParseError) as exc:
        parse_config(text)
    lines = text.splitlines()
    assert exc.value.line is not None and '"fooo"' in lines[exc.value.line - 1]


def test_malformed_json_is_parse_error():
    with pytest.raises(ParseError) as exc:
        parse_config('{\n "schema_version": 1,\n "maps": [\n}')
    assert exc.value.line == 4


@pytest.mark.parametrize("over, field", [
    ({"horizon": 5}, "horizon"),
    ({"outputs": {"report": ""}}, "outputs.report"),
    ({"schema_version": 2}, "schema_version"),
    ({"domain": {"class": "doubly_connected"}}, "domain.class"),
    ({"compacts": [{"annulus": {"center": [0, 0], "inner": 0.5, "outer": 0.2}}]}, "compacts[0].annulus"),
    ({"family": {"kind": "cofinite", "param": 0}}, "family.param"),
])
def test_validation_errors_name_the_field(over, field):
    with pytest.raises(ValidationError) as exc:
        parse(minimal(**over))
    assert exc.value.field == field


def test_missing_required_field():
    cfg = minimal()
    del cfg["horizon"]
    with pytest.raises(ValidationError) as exc:
        parse(cfg)
    assert exc.value.field == "horizon"


def test_compact_directives():
    face = {"outer": [[-0.2, -0.2], [0, -0.2], [0.2, -0.2], [0.2, 0], [0.2, 0.2], [0, 0.2],
                      [-0.2, 0.2], [-0.2, 0]]}
    c = parse(minimal(family={"kind": "cofinite", "param": 3}, compacts=[
        {"annulus": {"center": [0, 0], "inner": 0.1, "outer": 0.3}},
        {"faces": [face]},
    ]))
    assert c.family == Cofinite(3)
    assert c.compact_labels == ("annulus(0+0j,0.1,0.3)", "faces(1)")
    assert c.compacts[0].hole_count() == 1 and c.compacts[1].hole_count() == 0


def test_excluded_orbit_and_enlarge():
    c = load_config("configs/infinitely_connected.json")
    assert len(c.domain.excluded) == 8
    assert c.domain.declared_class is ConnectivityClass.INFINITELY_CONNECTED
    K = c.compacts[0]
    assert K.hole_count() >= 2 and is_omega_convex(K, c.domain)


def test_witness_section():
    c = load_config("configs/witness.json")
    assert c.witness.targets == (0, 1, 2)
    assert isinstance(c.witness.basis, RationalWithPoles) and c.witness.basis.poles == (1.05,)
    with pytest.raises(ValidationError) as exc:
        parse(minimal(witness={"targets": [[0, 0]]}))
    assert exc.value.field == "witness.targets"
