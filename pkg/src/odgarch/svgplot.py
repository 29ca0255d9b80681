"""Minimal deterministic SVG boxplot emitter (Tukey convention)."""

import numpy as np


def box_stats(values):
    """Median, quartiles and 1.5*IQR whiskers; fliers beyond the whiskers."""
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        raise ValueError("empty data")
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = v[(v >= lo_fence) & (v <= hi_fence)]
    whis_lo = float(inside.min())
    whis_hi = float(inside.max())
    fliers = v[(v < lo_fence) | (v > hi_fence)]
    return {"q1": float(q1), "median": float(med), "q3": float(q3),
            "whisker_lo": whis_lo, "whisker_hi": whis_hi,
            "fliers": [float(f) for f in fliers]}


def _fmt(x):
    return f"{x:.6g}"


def _ticks(lo, hi, target=6):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    mag = 10.0 ** np.floor(np.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = np.ceil(lo / step) * step
    return list(np.arange(start, hi + 0.5 * step, step))


class SvgCanvas:
    def __init__(self, width, height):
        self.width = width
        self.height = height
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        ]

    def line(self, x1, y1, x2, y2, stroke="black", width=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{stroke}" stroke-width="{width}"{d}/>')

    def rect(self, x, y, w, h, stroke="black", fill="none"):
        self.parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}" '
            f'stroke="{stroke}" fill="{fill}"/>')

    def circle(self, cx, cy, r=2.0, stroke="black", fill="none"):
        self.parts.append(
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{r}" '
            f'stroke="{stroke}" fill="{fill}"/>')

    def text(self, x, y, s, size=11, anchor="middle"):
        self.parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{size}" '
            f'font-family="sans-serif" text-anchor="{anchor}">{s}</text>')

    def cross(self, cx, cy, half=3.5, stroke="blue"):
        self.line(cx - half, cy - half, cx + half, cy + half, stroke=stroke, width=1.5)
        self.line(cx - half, cy + half, cx + half, cy - half, stroke=stroke, width=1.5)

    def to_string(self):
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def boxplot_panel(groups, title="", ref_line=None, true_value=None,
                  mean_markers=False, width=640, height=420):
    """Tukey boxplots for [(label, values), ...] groups.

    ref_line draws a solid horizontal reference (e.g. a zero line for
    log-likelihood gaps); true_value draws a dashed red line with
    optional Monte Carlo mean crosses.
    """
    if not groups or any(len(v) == 0 for _, v in groups):
        raise ValueError("boxplot requires nonempty groups")
    ml, mr, mt, mb = 60, 15, 30, 40
    plot_w = width - ml - mr
    plot_h = height - mt - mb

    all_vals = np.concatenate([np.asarray(v, dtype=float) for _, v in groups])
    lo = min(float(all_vals.min()), *( [ref_line] if ref_line is not None else [] ),
             *( [true_value] if true_value is not None else [] ))
    hi = max(float(all_vals.max()), *( [ref_line] if ref_line is not None else [] ),
             *( [true_value] if true_value is not None else [] ))
    pad = 0.05 * (hi - lo) if hi > lo else 1.0
    lo -= pad
    hi += pad

    def ty(v):
        return mt + plot_h * (hi - v) / (hi - lo)

    c = SvgCanvas(width, height)
    c.rect(ml, mt, plot_w, plot_h)
    for tick in _ticks(lo, hi):
        c.line(ml - 4, ty(tick), ml, ty(tick))
        c.text(ml - 8, ty(tick) + 4, _fmt(tick), size=10, anchor="end")
    if title:
        c.text(ml + plot_w / 2, mt - 10, title, size=13)
    if ref_line is not None:
        c.line(ml, ty(ref_line), ml + plot_w, ty(ref_line), stroke="red", width=1.2)
    if true_value is not None:
        c.line(ml, ty(true_value), ml + plot_w, ty(true_value),
               stroke="red", width=1.2, dash="6,4")

    k = len(groups)
    slot = plot_w / k
    box_w = 0.5 * slot
    for i, (label, values) in enumerate(groups):
        cx = ml + (i + 0.5) * slot
        st = box_stats(values)
        x0 = cx - box_w / 2
        c.rect(x0, ty(st["q3"]), box_w, ty(st["q1"]) - ty(st["q3"]))
        c.line(x0, ty(st["median"]), x0 + box_w, ty(st["median"]), width=1.6)
        c.line(cx, ty(st["q3"]), cx, ty(st["whisker_hi"]))
        c.line(cx, ty(st["q1"]), cx, ty(st["whisker_lo"]))
        c.line(cx - box_w / 4, ty(st["whisker_hi"]), cx + box_w / 4, ty(st["whisker_hi"]))
        c.line(cx - box_w / 4, ty(st["whisker_lo"]), cx + box_w / 4, ty(st["whisker_lo"]))
        for f in st["fliers"]:
            c.circle(cx, ty(f))
        if mean_markers:
            c.cross(cx, ty(float(np.mean(values))))
        c.text(cx, mt + plot_h + 16, str(label), size=11)
    return c.to_string()
