"""Static SVG renderings of the report types.

Pure string building from already-aggregated report objects: no display
stack, no extra computation, deterministic output. Charts use a fixed
canvas with a linear value axis and skip undefined (NaN) values.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .evaluation import QuantileUpliftReport, SegmentReport
from .importance import ImportanceReport
from .segments import GroupCateTable

WIDTH = 640
HEIGHT = 400
MARGIN_TOP = 36
MARGIN_BOTTOM = 48
MARGIN_RIGHT = 20

BAR_FILL = "#4878a8"
BAR_FILL_ALT = "#c08a3e"
AXIS_COLOR = "#303030"
GRID_COLOR = "#cccccc"
FONT = "font-family=\"sans-serif\" font-size=\"11\""


def _fmt(value: float) -> str:
    return f"{value:.2f}"


class _Canvas:
    """Collects SVG elements for one chart."""

    def __init__(self, title: str):
        self.parts: list[str] = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
            f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2:.0f}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14" fill="{AXIS_COLOR}">'
            f"{escape(title)}</text>",
        ]

    def line(self, x1, y1, x2, y2, color=AXIS_COLOR, dash=None):
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" '
            f'y2="{_fmt(y2)}" stroke="{color}" stroke-width="1"{extra}/>'
        )

    def rect(self, x, y, w, h, fill):
        self.parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" '
            f'height="{_fmt(h)}" fill="{fill}"/>'
        )

    def text(self, x, y, content, anchor="middle", color=AXIS_COLOR):
        self.parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" text-anchor="{anchor}" '
            f'{FONT} fill="{color}">{escape(str(content))}</text>'
        )

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


class _ValueAxis:
    """Linear mapping from data values to vertical pixel positions."""

    def __init__(self, values, top=MARGIN_TOP, bottom=HEIGHT - MARGIN_BOTTOM):
        finite = [v for v in values if v is not None and math.isfinite(v)]
        if not finite:
            finite = [0.0, 1.0]
        low, high = min(finite), max(finite)
        if low == high:
            low -= 1.0
            high += 1.0
        pad = 0.05 * (high - low)
        self.low = low - pad
        self.high = high + pad
        self.top = top
        self.bottom = bottom

    def y(self, value: float) -> float:
        span = self.high - self.low
        return self.bottom - (value - self.low) / span * (self.bottom - self.top)

    def ticks(self, count: int = 5) -> list[float]:
        step = (self.high - self.low) / (count - 1)
        return [self.low + i * step for i in range(count)]


def _draw_value_axis(canvas: _Canvas, axis: _ValueAxis, x_left: float, x_right: float):
    for tick in axis.ticks():
        y = axis.y(tick)
        canvas.line(x_left, y, x_right, y, color=GRID_COLOR)
        canvas.text(x_left - 6, y + 4, f"{tick:.2f}", anchor="end")
    canvas.line(x_left, axis.top, x_left, axis.bottom)


def render_quantile_plot(report: QuantileUpliftReport) -> str:
    """Vertical bars with interval whiskers, one per quantile."""
    canvas = _Canvas("Observed uplift by predicted-effect quantile")
    values = []
    for row in report.rows:
        values.extend([row.mean_uplift, row.ci_low, row.ci_high])
    values.append(0.0)
    axis = _ValueAxis(values)
    x_left = 64.0
    x_right = WIDTH - MARGIN_RIGHT
    _draw_value_axis(canvas, axis, x_left, x_right)

    zero_y = axis.y(0.0)
    canvas.line(x_left, zero_y, x_right, zero_y, dash="4,3")
    n = len(report.rows)
    slot = (x_right - x_left) / max(n, 1)
    for i, row in enumerate(report.rows):
        cx = x_left + (i + 0.5) * slot
        canvas.text(cx, HEIGHT - MARGIN_BOTTOM + 16, str(row.quantile))
        if math.isfinite(row.mean_uplift):
            bar_w = 0.6 * slot
            y_val = axis.y(row.mean_uplift)
            top = min(y_val, zero_y)
            canvas.rect(cx - bar_w / 2, top, bar_w, abs(y_val - zero_y), BAR_FILL)
        if math.isfinite(row.ci_low) and math.isfinite(row.ci_high):
            y_lo = axis.y(row.ci_low)
            y_hi = axis.y(row.ci_high)
            canvas.line(cx, y_hi, cx, y_lo)
            canvas.line(cx - 4, y_lo, cx + 4, y_lo)
            canvas.line(cx - 4, y_hi, cx + 4, y_hi)
    canvas.text((x_left + x_right) / 2, HEIGHT - 12, "quantile of predicted effect")
    return canvas.render()


def render_importance_plot(report: ImportanceReport) -> str:
    """Horizontal bars, most important variable on top."""
    canvas = _Canvas("Heterogeneity importance by variable")
    x_left = 150.0
    x_right = WIDTH - MARGIN_RIGHT
    values = [0.0]
    for e in report.entries:
        values.extend([e.score, e.ci_low, e.ci_high])
    finite = [v for v in values if math.isfinite(v)]
    low = min(0.0, min(finite))
    high = max(finite) if max(finite) > low else low + 1.0
    pad = 0.05 * (high - low)
    low -= pad
    high += pad

    def x_of(value: float) -> float:
        return x_left + (value - low) / (high - low) * (x_right - x_left)

    top = float(MARGIN_TOP)
    bottom = float(HEIGHT - MARGIN_BOTTOM)
    n = len(report.entries)
    slot = (bottom - top) / max(n, 1)
    zero_x = x_of(0.0)
    canvas.line(zero_x, top, zero_x, bottom)
    for i, entry in enumerate(report.entries):
        cy = top + (i + 0.5) * slot
        canvas.text(x_left - 8, cy + 4, entry.variable, anchor="end")
        if math.isfinite(entry.score):
            bar_h = 0.6 * slot
            x_val = x_of(entry.score)
            canvas.rect(
                min(zero_x, x_val), cy - bar_h / 2, abs(x_val - zero_x), bar_h, BAR_FILL
            )
        if math.isfinite(entry.ci_low) and math.isfinite(entry.ci_high):
            x_lo = x_of(entry.ci_low)
            x_hi = x_of(entry.ci_high)
            canvas.line(x_lo, cy, x_hi, cy)
            canvas.line(x_lo, cy - 4, x_lo, cy + 4)
            canvas.line(x_hi, cy - 4, x_hi, cy + 4)
    scale = "renormalized" if report.renormalized else "raw-averaged"
    canvas.text((x_left + x_right) / 2, HEIGHT - 12, f"mean Gini importance ({scale})")
    return canvas.render()


def render_segment_plot(report: SegmentReport) -> str:
    """Grouped bars: category mix of the two extreme segments."""
    canvas = _Canvas(f"Category mix of extreme segments: {report.variable}")
    x_left = 64.0
    x_right = WIDTH - MARGIN_RIGHT
    values = list(report.bottom.proportions) + list(report.top.proportions) + [0.0]
    axis = _ValueAxis(values)
    _draw_value_axis(canvas, axis, x_left, x_right)

    zero_y = axis.y(0.0)
    categories = report.bottom.categories
    slot = (x_right - x_left) / max(len(categories), 1)
    bar_w = 0.3 * slot
    for i, category in enumerate(categories):
        cx = x_left + (i + 0.5) * slot
        canvas.text(cx, HEIGHT - MARGIN_BOTTOM + 16, category)
        for offset, fill, proportions in (
            (-bar_w, BAR_FILL, report.bottom.proportions),
            (0.0, BAR_FILL_ALT, report.top.proportions),
        ):
            y_val = axis.y(proportions[i])
            canvas.rect(cx + offset, y_val, bar_w, zero_y - y_val, fill)
    canvas.rect(x_left, 26, 10, 10, BAR_FILL)
    canvas.text(x_left + 16, 35, report.bottom.segment, anchor="start")
    canvas.rect(x_left + 160, 26, 10, 10, BAR_FILL_ALT)
    canvas.text(x_left + 176, 35, report.top.segment, anchor="start")
    return canvas.render()


def render_group_cate_plot(table: GroupCateTable) -> str:
    """Observed uplift per category of one variable."""
    canvas = _Canvas(f"Observed uplift by category: {table.variable}")
    x_left = 64.0
    x_right = WIDTH - MARGIN_RIGHT
    values = [r.uplift for r in table.rows] + [0.0]
    axis = _ValueAxis(values)
    _draw_value_axis(canvas, axis, x_left, x_right)

    zero_y = axis.y(0.0)
    canvas.line(x_left, zero_y, x_right, zero_y, dash="4,3")
    slot = (x_right - x_left) / max(len(table.rows), 1)
    for i, row in enumerate(table.rows):
        cx = x_left + (i + 0.5) * slot
        canvas.text(cx, HEIGHT - MARGIN_BOTTOM + 16, row.category)
        if math.isfinite(row.uplift):
            bar_w = 0.6 * slot
            y_val = axis.y(row.uplift)
            canvas.rect(
                cx - bar_w / 2, min(y_val, zero_y), bar_w, abs(y_val - zero_y), BAR_FILL
            )
        else:
            canvas.text(cx, zero_y - 6, "n/a")
    return canvas.render()
