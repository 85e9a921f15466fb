"""Static SVG figures of planar instances."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from html import escape

import structlog

from transversals.errors import InvalidInstanceError
from transversals.services.geometry import Point
from transversals.services.lifting import Instance
from transversals.services.transversal import Hyperplane

logger = structlog.get_logger()

Viewport = tuple[Fraction, Fraction, Fraction, Fraction]
DEFAULT_VIEWPORT: Viewport = (Fraction(-1), Fraction(-1), Fraction(1), Fraction(1))


@dataclass(frozen=True)
class RenderSpec:
    """Canvas and stroke settings. ``viewport`` is (xmin, ymin, xmax, ymax) in instance units."""

    width: int = 400
    height: int = 400
    margin: Fraction = Fraction(1)
    viewport: Viewport | None = None
    stroke: str = "#1f2937"
    stroke_width: str = "1.5"
    fill: str = "#93c5fd"
    point_radius: int = 3
    witness_stroke: str = "#dc2626"
    draw_witness: bool = True


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points: Sequence[Point]) -> list[Point]:
    """Counter-clockwise hull vertices by the monotone chain, collinear points dropped."""
    ordered = sorted(set(points))
    if len(ordered) <= 2:
        return ordered

    def chain(sequence: list[Point]) -> list[Point]:
        hull: list[Point] = []
        for p in sequence:
            while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
                hull.pop()
            hull.append(p)
        return hull

    lower = chain(ordered)
    upper = chain(ordered[::-1])
    return lower[:-1] + upper[:-1]


def _viewport(inst: Instance, spec: RenderSpec) -> Viewport:
    if spec.viewport is not None:
        return spec.viewport
    vertices = [v for m in inst.family for v in m.vertices]
    if not vertices:
        return DEFAULT_VIEWPORT
    xs = [v[0] for v in vertices]
    ys = [v[1] for v in vertices]
    return (
        min(xs) - spec.margin,
        min(ys) - spec.margin,
        max(xs) + spec.margin,
        max(ys) + spec.margin,
    )


def clip_line(hyperplane: Hyperplane, viewport: Viewport) -> tuple[Point, Point] | None:
    """Endpoints of the line normal·x = offset inside the viewport box, exactly."""
    (a, b), c = hyperplane.normal, hyperplane.offset
    xmin, ymin, xmax, ymax = viewport
    hits: set[Point] = set()
    if b != 0:
        for x in (xmin, xmax):
            y = (c - a * x) / b
            if ymin <= y <= ymax:
                hits.add((x, y))
    if a != 0:
        for y in (ymin, ymax):
            x = (c - b * y) / a
            if xmin <= x <= xmax:
                hits.add((x, y))
    if len(hits) < 2:
        return None
    ordered = sorted(hits)
    return ordered[0], ordered[-1]


class _Canvas:
    def __init__(self, viewport: Viewport, spec: RenderSpec):
        self.viewport = viewport
        self.spec = spec

    def map(self, p: Point) -> tuple[str, str]:
        xmin, ymin, xmax, ymax = self.viewport
        x = (p[0] - xmin) / (xmax - xmin) * self.spec.width
        y = self.spec.height - (p[1] - ymin) / (ymax - ymin) * self.spec.height
        return f"{float(x):.3f}", f"{float(y):.3f}"

    def path(self, points: Sequence[Point]) -> str:
        return " ".join(",".join(self.map(p)) for p in points)


def render_svg(
    inst: Instance, witness: Hyperplane | None = None, spec: RenderSpec | None = None
) -> bytes:
    """Points as circles, segments as polylines, polygons as exact hulls, witness as a line."""
    spec = spec or RenderSpec()
    if inst.d != 2:
        raise InvalidInstanceError(f"rendering needs d = 2, got d = {inst.d}", "d")
    viewport = _viewport(inst, spec)
    canvas = _Canvas(viewport, spec)
    style = f'stroke="{spec.stroke}" stroke-width="{spec.stroke_width}"'

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.width}" height="{spec.height}" '
        f'viewBox="0 0 {spec.width} {spec.height}">',
        '  <g id="family">',
    ]
    for member in inst.family:
        hull = convex_hull_2d(member.vertices)
        label = escape(member.id, quote=True)
        if len(hull) == 1:
            cx, cy = canvas.map(hull[0])
            lines.append(
                f'    <circle id="{label}" cx="{cx}" cy="{cy}" r="{spec.point_radius}" '
                f'fill="{spec.stroke}"/>'
            )
        elif len(hull) == 2:
            lines.append(
                f'    <polyline id="{label}" points="{canvas.path(hull)}" fill="none" {style}/>'
            )
        else:
            lines.append(
                f'    <polygon id="{label}" points="{canvas.path(hull)}" fill="{spec.fill}" '
                f'fill-opacity="0.5" {style}/>'
            )
    lines.append("  </g>")

    if witness is not None and spec.draw_witness:
        segment = clip_line(witness, viewport)
        if segment is None:
            logger.warning("Witness line misses the viewport", viewport=[str(v) for v in viewport])
        else:
            (x1, y1), (x2, y2) = canvas.map(segment[0]), canvas.map(segment[1])
            lines.append(
                f'  <line class="witness" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
                f'stroke="{spec.witness_stroke}" stroke-width="{spec.stroke_width}"/>'
            )
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode()
