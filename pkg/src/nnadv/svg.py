"""Deterministic SVG rendering of instances and directed tours."""
from __future__ import annotations

from .engine import TourPath
from .family import Instance

_UNIT = 48.0
_MARGIN = 36.0
_DOT_RADIUS = 4.0


def render_svg(instance: Instance, tour: TourPath | None = None) -> str:
    """Cities as dots, the tour as arrowed segments, landmarks labeled l and m.

    Output bytes are a pure function of the inputs (fixed number
    formatting, fixed element order).
    """
    if tour is not None:
        for idx in tour.order:
            if not 0 <= idx < instance.n:
                raise ValueError(f"tour city {idx} is not in the instance")

    s = instance.scale
    xs = [c.x / s for c in instance.cities]
    ys = [c.y / s for c in instance.cities]
    max_y = max(ys)

    def px(x: float) -> float:
        return _MARGIN + (x - min(xs)) * _UNIT

    def py(y: float) -> float:
        return _MARGIN + (max_y - y) * _UNIT

    width = px(max(xs)) + _MARGIN
    height = py(min(ys)) + _MARGIN
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1f}" height="{height:.1f}" '
        f'viewBox="0 0 {width:.1f} {height:.1f}">',
        "<defs>",
        '<marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" '
        'markerHeight="7" orient="auto-start-reverse">'
        '<path d="M 0 0 L 10 5 L 0 10 z" fill="#1f5fbf"/></marker>',
        "</defs>",
    ]

    if tour is not None and len(tour.order) > 1:
        pairs = list(zip(tour.order, tour.order[1:]))
        if tour.closed:
            pairs.append((tour.order[-1], tour.order[0]))
        for a, b in pairs:
            out.append(
                f'<line x1="{px(xs[a]):.2f}" y1="{py(ys[a]):.2f}" '
                f'x2="{px(xs[b]):.2f}" y2="{py(ys[b]):.2f}" '
                'stroke="#1f5fbf" stroke-width="2" marker-end="url(#arrow)"/>'
            )

    for i in range(instance.n):
        out.append(f'<circle cx="{px(xs[i]):.2f}" cy="{py(ys[i]):.2f}" r="{_DOT_RADIUS:.1f}" fill="#222"/>')

    for label, idx in (("l", instance.landmark_l), ("m", instance.landmark_m)):
        anchor_y = py(ys[idx]) + (20.0 if ys[idx] <= min(ys) else -12.0)
        out.append(
            f'<text x="{px(xs[idx]):.2f}" y="{anchor_y:.2f}" font-size="16" '
            f'font-family="serif" font-style="italic" text-anchor="middle">{label}</text>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"
