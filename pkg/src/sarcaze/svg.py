"""Tiny deterministic SVG writer.

Produces byte-identical output for identical inputs: coordinates are
formatted with a fixed two-decimal format and elements are emitted in call
order.  Covers just the primitives the render commands need.
"""

from __future__ import annotations

from xml.sax.saxutils import escape


def _fmt(v: float) -> str:
    return f"{float(v):.2f}"


class SvgCanvas:
    def __init__(self, width: float, height: float):
        self.width = width
        self.height = height
        self._parts: list[str] = []

    def line(self, x1, y1, x2, y2, stroke="#444444", stroke_width=1.0, opacity=1.0):
        self._parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{stroke}" stroke-width="{_fmt(stroke_width)}" opacity="{_fmt(opacity)}" />'
        )

    def circle(self, cx, cy, r, fill="#1f77b4", opacity=1.0):
        self._parts.append(
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" '
            f'fill="{fill}" opacity="{_fmt(opacity)}" />'
        )

    def rect(self, x, y, w, h, fill="#1f77b4", opacity=1.0):
        self._parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}" '
            f'fill="{fill}" opacity="{_fmt(opacity)}" />'
        )

    def path(self, d: str, stroke="#444444", stroke_width=1.0, fill="none", opacity=1.0):
        self._parts.append(
            f'<path d="{d}" stroke="{stroke}" stroke-width="{_fmt(stroke_width)}" '
            f'fill="{fill}" opacity="{_fmt(opacity)}" />'
        )

    def text(self, x, y, content: str, size=12.0, fill="#000000", anchor="start"):
        self._parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{_fmt(size)}" '
            f'font-family="monospace" fill="{fill}" text-anchor="{anchor}">'
            f"{escape(content)}</text>"
        )

    def arc(self, x1, y1, x2, y2, bulge, stroke="#444444", stroke_width=1.0, opacity=1.0):
        """Quadratic curve from (x1,y1) to (x2,y2) bowed by ``bulge`` px
        perpendicular to the midpoint; positive bulge bows upward."""
        mx = (x1 + x2) / 2.0
        my = (y1 + y2) / 2.0 - bulge
        d = f"M {_fmt(x1)} {_fmt(y1)} Q {_fmt(mx)} {_fmt(my)} {_fmt(x2)} {_fmt(y2)}"
        self.path(d, stroke=stroke, stroke_width=stroke_width, opacity=opacity)

    def render(self) -> str:
        body = "\n".join(self._parts)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(self.width)}" '
            f'height="{_fmt(self.height)}" viewBox="0 0 {_fmt(self.width)} {_fmt(self.height)}">\n'
            f'<rect x="0.00" y="0.00" width="{_fmt(self.width)}" height="{_fmt(self.height)}" '
            f'fill="#ffffff" opacity="1.00" />\n'
            f"{body}\n</svg>\n"
        )


def line_chart(series, labels, title, width=640.0, height=400.0, x_ticks=None) -> str:
    """Multi-series line chart; ``series`` is a list of (x, y) point lists.

    Axes are scaled to the data envelope with a 5% margin.
    """
    margin = 60.0
    xs = [p[0] for pts in series for p in pts]
    ys = [p[1] for pts in series for p in pts]
    if not xs:
        raise ValueError("line_chart needs at least one point")
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05
    y_lo, y_hi = y_lo - pad * (y_hi - y_lo), y_hi + pad * (y_hi - y_lo)

    def sx(x):
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def sy(y):
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin)

    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    canvas = SvgCanvas(width, height)
    canvas.line(margin, height - margin, width - margin, height - margin, stroke="#000000")
    canvas.line(margin, margin, margin, height - margin, stroke="#000000")
    canvas.text(width / 2, margin / 2, title, size=14.0, anchor="middle")
    for tick in x_ticks or sorted(set(xs)):
        canvas.line(sx(tick), height - margin, sx(tick), height - margin + 5, stroke="#000000")
        canvas.text(sx(tick), height - margin + 20, f"{tick:g}", size=10.0, anchor="middle")
    for frac in (0.0, 0.5, 1.0):
        yv = y_lo + frac * (y_hi - y_lo)
        canvas.line(margin - 5, sy(yv), margin, sy(yv), stroke="#000000")
        canvas.text(margin - 10, sy(yv) + 4, f"{yv:.1f}", size=10.0, anchor="end")
    for i, pts in enumerate(series):
        color = palette[i % len(palette)]
        for (xa, ya), (xb, yb) in zip(pts, pts[1:]):
            canvas.line(sx(xa), sy(ya), sx(xb), sy(yb), stroke=color, stroke_width=2.0)
        for x, y in pts:
            canvas.circle(sx(x), sy(y), 3.0, fill=color)
        canvas.text(width - margin + 5, margin + 15 * i + 10, labels[i], size=10.0, fill=color)
    return canvas.render()


def bar_chart(names, values, title, width=640.0, height=400.0, highlight=None) -> str:
    """Horizontal bar chart, longest axis label aligned on the left.

    ``highlight`` is an optional set of names drawn in a second color.
    """
    margin_left = 90.0
    margin = 40.0
    if not names:
        raise ValueError("bar_chart needs at least one bar")
    v_hi = max(max(values), 0.0)
    if v_hi == 0.0:
        v_hi = 1.0
    inner_h = height - 2 * margin
    slot = inner_h / len(names)
    bar_h = slot * 0.7
    canvas = SvgCanvas(width, height)
    canvas.text(width / 2, margin / 2 + 5, title, size=14.0, anchor="middle")
    highlight = highlight or set()
    for i, (name, value) in enumerate(zip(names, values)):
        y = margin + i * slot
        w = (max(value, 0.0) / v_hi) * (width - margin_left - margin)
        color = "#d62728" if name in highlight else "#1f77b4"
        canvas.rect(margin_left, y, w, bar_h, fill=color)
        canvas.text(margin_left - 6, y + bar_h * 0.75, name, size=10.0, anchor="end")
        canvas.text(margin_left + w + 4, y + bar_h * 0.75, f"{value:.3f}", size=9.0)
    canvas.line(margin_left, margin, margin_left, height - margin, stroke="#000000")
    return canvas.render()
