"""Deterministic SVG drawings of base diagrams and Kirby diagram summaries.

Layout radii are fixed, coordinates are printed with two decimals and
elements are emitted in a fixed order, so equal inputs give byte-equal
output.
"""

from __future__ import annotations

import math
from html import escape

from .basediagram import BaseDiagram, INWARD
from .kirby import HandleDecomposition

R0 = 60.0
STEP = 45.0


def _f(x: float) -> str:
    return f"{x:.2f}"


def _polar(cx: float, cy: float, r: float, theta: float) -> tuple[float, float]:
    return cx + r * math.cos(theta), cy - r * math.sin(theta)


def _header(w: float, h: float) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(w)}" height="{_f(h)}" viewBox="0 0 {_f(w)} {_f(h)}">',
        f'<rect x="0" y="0" width="{_f(w)}" height="{_f(h)}" fill="white"/>',
    ]


def render_base_diagram(d: BaseDiagram) -> str:
    """Fold circles as concentric circles, cusps as kinks, Lefschetz points as
    crosses, and arrow ticks pointing toward the higher Euler characteristic."""
    n = len(d.circles)
    size = 2 * (R0 + STEP * max(n, 1)) + 40
    cx = cy = size / 2
    out = _header(size, size)
    for i, c in enumerate(d.circles):
        r = R0 + STEP * i
        width = "3" if c.definite else "1.5"
        out.append(f'<circle class="{c.kind}" cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r)}" fill="none" stroke="black" stroke-width="{width}"/>')
        for t in range(4):
            theta = math.pi / 4 + t * math.pi / 2
            sign = -1 if c.arrow == INWARD else 1
            x1, y1 = _polar(cx, cy, r, theta)
            x2, y2 = _polar(cx, cy, r + sign * 8, theta)
            out.append(f'<line class="arrow" x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" stroke="black"/>')
        for j in range(c.cusps):
            theta = 2 * math.pi * j / c.cusps + math.pi / 2
            # kink: a small V opening toward the centre
            a = _polar(cx, cy, r, theta - 0.06)
            b = _polar(cx, cy, r + 7, theta)
            e = _polar(cx, cy, r, theta + 0.06)
            out.append(f'<polyline class="cusp" points="{_f(a[0])},{_f(a[1])} {_f(b[0])},{_f(b[1])} {_f(e[0])},{_f(e[1])}" fill="none" stroke="black"/>')
        for j in range(len(c.loops)):
            x, y = _polar(cx, cy, r, math.pi + 0.3 * j)
            out.append(f'<circle class="loop" cx="{_f(x)}" cy="{_f(y)}" r="5.00" fill="none" stroke="black"/>')
    for i, reg in enumerate(d.regions):
        r = 0.0 if i == 0 else R0 + STEP * (i - 0.5)
        x, y = _polar(cx, cy, r, -math.pi / 2) if i else (cx, cy)
        out.append(f'<text class="fiber" x="{_f(x)}" y="{_f(y + 4)}" font-size="11" text-anchor="middle">{escape(reg.fiber.label())}</text>')
        for j in range(reg.lefschetz):
            theta = 2 * math.pi * j / reg.lefschetz
            rr = 22.0 if i == 0 else r
            px, py = _polar(cx, cy, rr, theta) if (i or reg.lefschetz > 1) else (cx, cy - 18)
            out.append(
                f'<path class="lefschetz" d="M {_f(px - 4)} {_f(py - 4)} L {_f(px + 4)} {_f(py + 4)} '
                f'M {_f(px - 4)} {_f(py + 4)} L {_f(px + 4)} {_f(py - 4)}" stroke="black"/>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_kirby_summary(h: HandleDecomposition) -> str:
    """One row per 1-handle pair (twisted ones marked) and a list of 2-handles."""
    rows = len(h.one_handles) + len(h.two_handles) + 3
    w, ht = 420.0, 30.0 + 22.0 * rows
    out = _header(w, ht)
    y = 24.0
    title = escape(h.label or "diagram")
    out.append(f'<text x="10.00" y="{_f(y)}" font-size="13">{title}: h0={h.zero_handles} h4={h.four_handles}</text>')
    for e in h.one_handles:
        y += 22
        for x in (30.0, 80.0):
            out.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="7.00" fill="none" stroke="black"/>')
        mark = "twisted" if e.twisted else "untwisted"
        out.append(f'<text x="100.00" y="{_f(y + 4)}" font-size="11">{escape(e.name)} {mark} {e.ends[0]}-{e.ends[1]}</text>')
    names = h.names
    for t in h.two_handles:
        y += 22
        word = " ".join(names[g] + ("" if s == 1 else "^-1") for g, s in t.word) or "(unknot)"
        fr = ",".join(str(f) for f in t.framings)
        out.append(f'<text x="10.00" y="{_f(y)}" font-size="11">2-handle {escape(word)} [{fr}]</text>')
    y += 22
    out.append(f'<text x="10.00" y="{_f(y)}" font-size="11">3-handles: {h.three_untwisted} untwisted, {h.three_twisted} twisted</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
