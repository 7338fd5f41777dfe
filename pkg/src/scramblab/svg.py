"""Small dependency-free SVG plots: line charts, histograms and heatmaps."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

W, H = 640, 440
ML, MR, MT, MB = 70, 150, 40, 55
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]


def _fmt(v: float) -> str:
    return f"{v:.4g}"


class _Frame:
    def __init__(self, xlim, ylim, log_x=False, log_y=False):
        self.log_x, self.log_y = log_x, log_y
        self.x0, self.x1 = (np.log10(v) if log_x else v for v in xlim)
        self.y0, self.y1 = (np.log10(v) if log_y else v for v in ylim)
        if self.x1 == self.x0:
            self.x1 = self.x0 + 1
        if self.y1 == self.y0:
            self.y1 = self.y0 + 1

    def px(self, x):
        x = np.log10(x) if self.log_x else x
        return ML + (x - self.x0) / (self.x1 - self.x0) * (W - ML - MR)

    def py(self, y):
        y = np.log10(y) if self.log_y else y
        return H - MB - (y - self.y0) / (self.y1 - self.y0) * (H - MT - MB)


def _axes(fr: _Frame, xlabel, ylabel, title):
    out = [
        f'<rect x="{ML}" y="{MT}" width="{W - ML - MR}" height="{H - MT - MB}" '
        'fill="none" stroke="black"/>',
        f'<text x="{(W - MR + ML) / 2}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="16" y="{(H - MB + MT) / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(H - MB + MT) / 2})">{escape(ylabel)}</text>',
        f'<text x="{(W - MR + ML) / 2}" y="24" text-anchor="middle">{escape(title)}</text>',
    ]
    for k in range(6):
        xv = fr.x0 + k * (fr.x1 - fr.x0) / 5
        yv = fr.y0 + k * (fr.y1 - fr.y0) / 5
        xs = ML + k * (W - ML - MR) / 5
        ys = H - MB - k * (H - MT - MB) / 5
        xl = 10**xv if fr.log_x else xv
        yl = 10**yv if fr.log_y else yv
        out.append(f'<text x="{xs:.1f}" y="{H - MB + 16}" text-anchor="middle" '
                   f'font-size="11">{_fmt(xl)}</text>')
        out.append(f'<text x="{ML - 6}" y="{ys + 4:.1f}" text-anchor="end" '
                   f'font-size="11">{_fmt(yl)}</text>')
    return out


def _doc(body):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'font-family="sans-serif" font-size="13">\n'
        '<rect width="100%" height="100%" fill="white"/>\n' + "\n".join(body) + "\n</svg>\n"
    )


def _legend(labels, colors, dashed=()):
    out = []
    for k, (lab, col) in enumerate(zip(labels, colors)):
        y = MT + 14 + 20 * k
        dash = ' stroke-dasharray="5,3"' if k in dashed else ""
        out.append(f'<line x1="{W - MR + 10}" y1="{y}" x2="{W - MR + 34}" y2="{y}" '
                   f'stroke="{col}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{W - MR + 40}" y="{y + 4}" font-size="11">{escape(lab)}</text>')
    return out


def line_plot(series, xlabel="", ylabel="", title="", log_x=False, log_y=False,
              markers=False) -> str:
    """``series``: list of (label, x, y) triples. Non-positive values are
    dropped on log axes."""
    cleaned = []
    for label, x, y in series:
        x, y = np.asarray(x, float), np.asarray(y, float)
        keep = np.isfinite(x) & np.isfinite(y)
        if log_x:
            keep &= x > 0
        if log_y:
            keep &= y > 0
        cleaned.append((label, x[keep], y[keep]))
    xs = np.concatenate([c[1] for c in cleaned if c[1].size] or [np.array([0.0, 1.0])])
    ys = np.concatenate([c[2] for c in cleaned if c[2].size] or [np.array([0.0, 1.0])])
    fr = _Frame((xs.min(), xs.max()), (ys.min(), ys.max()), log_x, log_y)
    body = _axes(fr, xlabel, ylabel, title)
    for k, (label, x, y) in enumerate(cleaned):
        col = COLORS[k % len(COLORS)]
        pts = " ".join(f"{fr.px(a):.2f},{fr.py(b):.2f}" for a, b in zip(x, y))
        if markers:
            body += [f'<circle cx="{fr.px(a):.2f}" cy="{fr.py(b):.2f}" r="3" fill="{col}"/>'
                     for a, b in zip(x, y)]
        else:
            body.append(f'<polyline points="{pts}" fill="none" stroke="{col}" stroke-width="1.6"/>')
    body += _legend([c[0] for c in cleaned], [COLORS[k % len(COLORS)] for k in range(len(cleaned))])
    return _doc(body)


def histogram_plot(edges, density, overlays=(), xlabel="s", ylabel="P(s)", title="") -> str:
    """Bars from ``edges``/``density`` plus (label, x, y) reference curves."""
    edges = np.asarray(edges, float)
    density = np.asarray(density, float)
    ymax = max([density.max()] + [np.max(o[2]) for o in overlays]) * 1.05
    fr = _Frame((edges[0], edges[-1]), (0.0, ymax))
    body = _axes(fr, xlabel, ylabel, title)
    for lo, hi, d in zip(edges[:-1], edges[1:], density):
        x, y = fr.px(lo), fr.py(d)
        body.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{fr.px(hi) - x:.2f}" '
                    f'height="{fr.py(0) - y:.2f}" fill="#9ecae1" stroke="#3182bd" stroke-width="0.5"/>')
    cols = COLORS[1:]
    for k, (label, x, y) in enumerate(overlays):
        pts = " ".join(f"{fr.px(a):.2f},{fr.py(b):.2f}" for a, b in zip(x, y))
        body.append(f'<polyline points="{pts}" fill="none" stroke="{cols[k]}" '
                    'stroke-width="1.8" stroke-dasharray="5,3"/>')
    body += _legend([o[0] for o in overlays], cols[: len(overlays)], dashed=range(len(overlays)))
    return _doc(body)


def _viridis_like(t):
    t = float(np.clip(t, 0, 1))
    stops = np.array([[68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37]])
    pos = t * (len(stops) - 1)
    i = min(int(pos), len(stops) - 2)
    c = stops[i] + (pos - i) * (stops[i + 1] - stops[i])
    return "#%02x%02x%02x" % tuple(int(round(v)) for v in c)


def heatmap_plot(x_axis, y_axis, values, xlabel="", ylabel="", title="", mark=None) -> str:
    """``values[i, j]`` is drawn at (x_axis[i], y_axis[j]); NaN cells are left blank."""
    x_axis, y_axis = np.asarray(x_axis, float), np.asarray(y_axis, float)
    values = np.asarray(values, float)

    def edges(a):
        if a.size == 1:
            return np.array([a[0] - 0.5, a[0] + 0.5])
        mid = 0.5 * (a[1:] + a[:-1])
        return np.concatenate([[2 * a[0] - mid[0]], mid, [2 * a[-1] - mid[-1]]])

    xe, ye = edges(x_axis), edges(y_axis)
    fr = _Frame((xe[0], xe[-1]), (ye[0], ye[-1]))
    body = _axes(fr, xlabel, ylabel, title)
    finite = values[np.isfinite(values)]
    vmin, vmax = (finite.min(), finite.max()) if finite.size else (0.0, 1.0)
    span = vmax - vmin or 1.0
    for i in range(len(x_axis)):
        for j in range(len(y_axis)):
            v = values[i, j]
            if not np.isfinite(v):
                continue
            x, y = fr.px(xe[i]), fr.py(ye[j + 1])
            body.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{fr.px(xe[i + 1]) - x:.2f}" '
                        f'height="{fr.py(ye[j]) - y:.2f}" fill="{_viridis_like((v - vmin) / span)}"/>')
    if mark is not None:
        body.append(f'<circle cx="{fr.px(mark[0]):.2f}" cy="{fr.py(mark[1]):.2f}" r="5" '
                    'fill="none" stroke="red" stroke-width="2"/>')
    for k in range(6):
        y = MT + 20 + 30 * k
        v = vmax - k * span / 5
        body.append(f'<rect x="{W - MR + 14}" y="{y - 10}" width="18" height="18" '
                    f'fill="{_viridis_like((v - vmin) / span)}"/>')
        body.append(f'<text x="{W - MR + 38}" y="{y + 4}" font-size="11">{_fmt(v)}</text>')
    return _doc(body)
