"""Deterministic SVG 1.1 figures of a report's geometry.

Coordinates are written with a fixed format so identical reports give
byte-identical files.  The compact K is drawn in black, images of map i in
color i, and tiny images as markers.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

SIZE = 640
MARGIN = 40
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
DOMAIN_COLOR = "#888888"
FMT = "{:.3f}"


def _num(x: float) -> str:
    s = FMT.format(x)
    return "0.000" if s == "-0.000" else s


def _cpx(p) -> complex:
    return complex(p[0], p[1])


class _Canvas:
    def __init__(self, points):
        xs = [p.real for p in points] or [0.0]
        ys = [p.imag for p in points] or [0.0]
        self.x0, self.y1 = min(xs), max(ys)
        span = max(max(xs) - self.x0, self.y1 - min(ys), 1e-300)
        self.s = (SIZE - 2 * MARGIN) / span
        self.items = []

    def xy(self, z: complex):
        return _num(MARGIN + (z.real - self.x0) * self.s), _num(MARGIN + (self.y1 - z.imag) * self.s)

    def path(self, curve, color: str, width: float = 1.0, dash: bool = False):
        pts = [self.xy(z) for z in curve]
        d = "M" + " L".join(f"{x} {y}" for x, y in pts) + " Z"
        extra = ' stroke-dasharray="4 3"' if dash else ""
        self.items.append(f'<path d="{d}" fill="none" stroke="{color}" '
                          f'stroke-width="{_num(width)}"{extra}/>')

    def circle(self, c: complex, r: float, color: str, dash: bool = False):
        x, y = self.xy(c)
        extra = ' stroke-dasharray="4 3"' if dash else ""
        self.items.append(f'<circle cx="{x}" cy="{y}" r="{_num(r * self.s)}" fill="none" '
                          f'stroke="{color}"{extra}/>')

    def marker(self, c: complex, color: str):
        x, y = self.xy(c)
        self.items.append(f'<circle cx="{x}" cy="{y}" r="3.000" fill="{color}"/>')

    def text(self, x: float, y: float, s: str, color: str = "#000000", size: int = 12):
        self.items.append(f'<text x="{_num(x)}" y="{_num(y)}" font-family="monospace" '
                          f'font-size="{size}" fill="{color}">{escape(s)}</text>')


def _domain_points(dom):
    pts = []
    b = dom.get("base") if dom else None
    if b:
        c, r = _cpx(b["center"]), b["radius"]
        pts += [c - r - 1j * r, c + r + 1j * r]
    return pts


def _shape_points(shape):
    if shape is None:
        return []
    if "marker" in shape:
        return [_cpx(shape["marker"])]
    return [_cpx(p) for c in shape["curves"] for p in c]


def _draw_shape(cv: _Canvas, shape, color: str, width: float = 1.0):
    if "marker" in shape:
        cv.marker(_cpx(shape["marker"]), color)
    else:
        for c in shape["curves"]:
            cv.path([_cpx(p) for p in c], color, width)


def render_svg(report) -> str:
    """SVG text for a ReportDocument (or its dict form)."""
    doc = report.to_dict() if hasattr(report, "to_dict") else report
    geo = doc.get("geometry") or {}
    dom = geo.get("domain")
    K = geo.get("compact")
    shots = [s for s in geo.get("snapshots", []) if "images" in s]
    first = geo.get("first_member")

    pts = _domain_points(dom)
    if K is not None:
        pts += _shape_points(K)
        for s in shots:
            for img in s["images"]:
                pts += _shape_points(img)
    cv = _Canvas(pts)

    if dom:
        if dom.get("base"):
            cv.circle(_cpx(dom["base"]["center"]), dom["base"]["radius"], DOMAIN_COLOR, dash=True)
        for e in dom.get("excluded", []):
            cv.circle(_cpx(e["center"]), e["radius"], DOMAIN_COLOR, dash=True)
    legend = []
    if K is not None:
        _draw_shape(cv, K, "#000000", 1.5)
        legend.append(("K", "#000000"))
        n_maps = max((len(s["images"]) for s in shots), default=0)
        for s in shots if first else []:
            for i, img in enumerate(s["images"]):
                _draw_shape(cv, img, PALETTE[i % len(PALETTE)])
            anchor = s["images"][0]
            z = _cpx(anchor["marker"]) if "marker" in anchor else _cpx(anchor["curves"][0][0])
            x, y = cv.xy(z)
            cv.text(float(x) + 4, float(y) - 4, f"n={s['n']}")
        if first:
            legend += [(f"phi_{i + 1}^n(K)", PALETTE[i % len(PALETTE)]) for i in range(n_maps)]

    status = (doc.get("transitivity") or {}).get("status", "")
    cv.text(MARGIN, 20, status or "no transitivity verdict")
    if K is not None and not first:
        cv.text(MARGIN, SIZE - 12, "no run-away indices")
    for k, (label, color) in enumerate(legend):
        cv.text(SIZE - 150, 20 + 16 * k, label, color)

    head = ('<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
            f'viewBox="0 0 {SIZE} {SIZE}">\n<rect width="{SIZE}" height="{SIZE}" fill="#ffffff"/>\n')
    return head + "\n".join(cv.items) + "\n</svg>\n"


def emit_svg(report, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_svg(report))
