"""SVG rendering of the rank-2 expectation square."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .geometry import ambient_box, optimal_odd_vertex
from .measures import MeasureReport, analyze
from .system import CyclicSystem, is_consistently_connected
from .vectorize import expectation_transform, reduced_description

SIZE = 480
MARGIN = 60
ORANGE = "#e64d26"
BLUE = "#14294d"


def _px(x: float, y: float) -> tuple[float, float]:
    scale = (SIZE - 2 * MARGIN) / 2
    return MARGIN + (x + 1) * scale, SIZE - MARGIN - (y + 1) * scale


class _Canvas:
    def __init__(self):
        self.parts: list[str] = []

    def line(self, a, b, stroke, width=1.4, dash=None, extra=""):
        (x1, y1), (x2, y2) = _px(*a), _px(*b)
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{stroke}" stroke-width="{width}"{d}{extra}/>')

    def rect(self, lo, hi, stroke, fill="none", opacity=1.0):
        (x1, y1), (x2, y2) = _px(lo[0], hi[1]), _px(hi[0], lo[1])
        self.parts.append(
            f'<rect x="{x1:.2f}" y="{y1:.2f}" width="{x2 - x1:.2f}" height="{y2 - y1:.2f}" '
            f'stroke="{stroke}" fill="{fill}" fill-opacity="{opacity}"/>')

    def dot(self, p, fill, r=4):
        x, y = _px(*p)
        self.parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}" fill="{fill}"/>')

    def text(self, p, s, dx=0, dy=0, size=13, anchor="start", fill="black"):
        x, y = _px(*p)
        self.parts.append(
            f'<text x="{x + dx:.2f}" y="{y + dy:.2f}" font-size="{size}" '
            f'font-family="serif" text-anchor="{anchor}" fill="{fill}">{escape(s)}</text>')

    def render(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
            '<svg version="1.1" xmlns="http://www.w3.org/2000/svg" '
            f'width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">\n'
            f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>\n')
        return head + "\n".join(self.parts) + "\n</svg>\n"


def polytope_svg(system: CyclicSystem, report: MeasureReport | None = None) -> str:
    """Square of bunch expectations with box, demicube, and measure segments."""
    if system.rank != 2:
        raise ValueError("polytope plots are only drawn for rank 2")
    if not is_consistently_connected(system, 1e-9):
        raise ValueError("polytope plots need a consistently connected system")
    report = report or analyze(system)
    box = ambient_box(system)
    x = expectation_transform(reduced_description(system)).phi_b
    cv = _Canvas()

    cv.rect((-1, -1), (1, 1), "gray")
    cv.rect(box.lo, box.hi, "gray", ORANGE, 0.25)
    cv.line((-1, -1), (1, 1), BLUE)
    lo, hi = max(box.lo), min(box.hi)
    if lo <= hi:
        cv.line((lo, lo), (hi, hi), BLUE, width=3.5)

    if report.contextual:
        vertex = tuple(float(v) for v in optimal_odd_vertex(x))
        step = x - np.array(vertex)
        den = step[0] - step[1]
        cv.dot(vertex, "gray")
        cv.text(vertex, "V*", dx=-8, dy=-8, anchor="end")
        if abs(den) > 1e-12:
            # where the ray from V* through phi(b*) meets the diagonal
            x_nc = np.array(vertex) + (vertex[1] - vertex[0]) / den * step
            cv.line(vertex, tuple(x_nc), BLUE, dash="6,4")
            cv.dot(tuple(x_nc), "gray")
            cv.text(tuple(x_nc), "x^NC", dx=8, dy=14)
        target = None
        if lo <= x[0] <= hi:
            target = (x[0], x[0])
        elif lo <= x[1] <= hi:
            target = (x[1], x[1])
        if target is not None:
            cv.line(tuple(x), target, ORANGE, width=2, dash="2,3")
            cv.dot(target, "gray")

    cv.dot(tuple(x), BLUE, r=5)
    cv.text(tuple(x), "phi(b*)", dx=8, dy=-8, fill=BLUE)
    cv.text((0, -1), "e_{1,2}", dy=32, anchor="middle")
    cv.text((-1, 0), "e_{2,1}", dx=-14, anchor="end")
    cv.text((1, -1), "C_b", dx=-6, dy=-8, anchor="end", fill="gray")
    cv.text((box.hi[0], box.lo[1]), "R_b", dx=-6, dy=-8, anchor="end", fill=BLUE)
    cv.text((-1, 1), f"CNT2 = {report.cnt2:.6g}", dy=-30)
    cv.text((-1, 1), f"CNTF = {report.cntf:.6g}", dx=200, dy=-30)
    return cv.render()
