import re
import xml.etree.ElementTree as ET

import pytest

from holotransit.config import load_config
from holotransit.report import ReportDocument, run_scenario
from holotransit.svg import emit_svg, render_svg

NS = "{http://www.w3.org/2000/svg}"


@pytest.fixture(scope="module")
def docs():
    return {name: run_scenario(load_config(f"configs/{name}.json"))
            for name in ("annulus_impossibility", "rotation", "hyperbolic_pair")}


def texts(svg: str) -> list:
    return [t.text for t in ET.fromstring(svg).iter(NS + "text")]


def test_svg_is_well_formed_and_deterministic(docs, tmp_path):
    doc = docs["hyperbolic_pair"]
    svg = render_svg(doc)
    assert svg == render_svg(ReportDocument.from_json(doc.to_json()))
    emit_svg(doc, tmp_path / "a.svg")
    assert (tmp_path / "a.svg").read_text() == svg
    # every coordinate is written with exactly three decimals
    nums = re.findall(r' (?:cx|cy|r|x|y)="([^"]+)"', svg)
    assert nums and all(re.fullmatch(r"-?\d+\.\d{3}", v) or v.isdigit() for v in nums)


def test_members_draw_images_with_legend(docs):
    svg = render_svg(docs["hyperbolic_pair"])
    t = texts(svg)
    assert "ConsistentUpToHorizon" in t
    assert {"K", "phi_1^n(K)", "phi_2^n(K)"} <= set(t)
    assert {"n=1", "n=2", "n=200"} <= set(t)


def test_no_members_caption(docs):
    svg = render_svg(docs["rotation"])
    t = texts(svg)
    assert "no run-away indices" in t and "K" in t
    assert not any(s.startswith("phi_") for s in t)


def test_impossibility_shows_domain_only(docs):
    root = ET.fromstring(render_svg(docs["annulus_impossibility"]))
    assert len(root.findall(NS + "path")) == 0
    assert len(root.findall(NS + "circle")) == 2
    assert [t.text for t in root.iter(NS + "text")] == ["ProvenImpossible"]
