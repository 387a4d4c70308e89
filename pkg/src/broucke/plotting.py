"""Minimal hand-rolled SVG line plots (no plotting dependency).

The CSV and .dat files are the canonical sweep artifacts; these plots
exist for quick visual inspection only.  Non-finite samples and samples
outside an explicit y-range split the polyline.
"""

import math
import os

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 16, 20, 44
COLORS = ["#1f6fb2", "#c24f2e", "#3c8a4e", "#8145a8"]


def _ticks(lo, hi, n=6):
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-12 * abs(step):
        ticks.append(round(t, 12))
        t += step
    return ticks


def write_line_svg(path, x, series, xlabel="", ylabel="", ylim=None):
    """Write one SVG with a polyline per named series.

    series maps label -> list of y values (same length as x); ylim
    optionally clips the visible y-range.
    """
    x = [float(v) for v in x]
    finite_y = [v for ys in series.values() for v in ys
                if v is not None and math.isfinite(v)
                and (ylim is None or ylim[0] <= v <= ylim[1])]
    if not x or not finite_y:
        raise ValueError("nothing plottable")
    x_lo, x_hi = min(x), max(x)
    if ylim is not None:
        y_lo, y_hi = ylim
    else:
        y_lo, y_hi = min(finite_y), max(finite_y)
        if y_hi == y_lo:
            y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
        pad = 0.05 * (y_hi - y_lo)
        y_lo, y_hi = y_lo - pad, y_hi + pad

    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(v):
        return MARGIN_L + pw * (v - x_lo) / (x_hi - x_lo)

    def sy(v):
        return MARGIN_T + ph * (1.0 - (v - y_lo) / (y_hi - y_lo))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" '
        f'fill="none" stroke="#444"/>',
    ]
    for t in _ticks(x_lo, x_hi):
        px = sx(t)
        parts.append(f'<line x1="{px:.1f}" y1="{MARGIN_T + ph}" '
                     f'x2="{px:.1f}" y2="{MARGIN_T + ph + 5}" stroke="#444"/>')
        parts.append(f'<text x="{px:.1f}" y="{MARGIN_T + ph + 18}" '
                     f'font-size="11" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y_lo, y_hi):
        py = sy(t)
        parts.append(f'<line x1="{MARGIN_L - 5}" y1="{py:.1f}" '
                     f'x2="{MARGIN_L}" y2="{py:.1f}" stroke="#444"/>')
        parts.append(f'<text x="{MARGIN_L - 8}" y="{py + 4:.1f}" '
                     f'font-size="11" text-anchor="end">{t:g}</text>')
    if xlabel:
        parts.append(f'<text x="{MARGIN_L + pw / 2}" y="{HEIGHT - 8}" '
                     f'font-size="12" text-anchor="middle">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="14" y="{MARGIN_T + ph / 2}" font-size="12" '
                     f'text-anchor="middle" transform="rotate(-90 14 '
                     f'{MARGIN_T + ph / 2})">{ylabel}</text>')

    for k, (label, ys) in enumerate(series.items()):
        color = COLORS[k % len(COLORS)]
        segments, seg = [], []
        for xv, yv in zip(x, ys):
            ok = (yv is not None and math.isfinite(yv)
                  and y_lo <= yv <= y_hi)
            if ok:
                seg.append(f"{sx(xv):.2f},{sy(yv):.2f}")
            elif seg:
                segments.append(seg)
                seg = []
        if seg:
            segments.append(seg)
        for seg in segments:
            if len(seg) == 1:
                cx, cy = seg[0].split(",")
                parts.append(f'<circle cx="{cx}" cy="{cy}" r="1.5" '
                             f'fill="{color}"/>')
            else:
                parts.append(f'<polyline points="{" ".join(seg)}" '
                             f'fill="none" stroke="{color}" '
                             f'stroke-width="1.2"/>')
        parts.append(f'<text x="{MARGIN_L + pw - 6}" '
                     f'y="{MARGIN_T + 16 + 14 * k}" font-size="12" '
                     f'text-anchor="end" fill="{color}">{label}</text>')

    parts.append("</svg>")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
    return path
