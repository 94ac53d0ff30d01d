"""Minimal SVG writers for line plots and heatmaps.

Heatmap pixels are embedded as a base64 PNG produced with zlib, which
keeps files small for 10^5-cell maps.
"""

from __future__ import annotations

import base64
import math
import struct
import zlib
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

# viridis sampled at 9 evenly spaced stops
_VIRIDIS = np.array(
    [
        [68, 1, 84],
        [71, 44, 122],
        [59, 81, 139],
        [44, 113, 142],
        [33, 144, 141],
        [39, 173, 129],
        [92, 200, 99],
        [170, 220, 50],
        [253, 231, 37],
    ],
    dtype=float,
)

PALETTE = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def colormap(t: np.ndarray) -> np.ndarray:
    """Map values in [0, 1] to uint8 RGB."""
    t = np.clip(np.nan_to_num(t, nan=0.0), 0.0, 1.0) * (len(_VIRIDIS) - 1)
    i = np.minimum(t.astype(int), len(_VIRIDIS) - 2)
    f = (t - i)[..., None]
    rgb = _VIRIDIS[i] * (1 - f) + _VIRIDIS[i + 1] * f
    return np.round(rgb).astype(np.uint8)


def png_bytes(rgb: np.ndarray) -> bytes:
    """Encode an (H, W, 3) uint8 array as PNG, first row at the top."""
    h, w, _ = rgb.shape
    raw = b"".join(b"\x00" + rgb[r].tobytes() for r in range(h))

    def chunk(tag: bytes, data: bytes) -> bytes:
        return struct.pack(">I", len(data)) + tag + data + struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF)

    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0))
        + chunk(b"IDAT", zlib.compress(raw, 9))
        + chunk(b"IEND", b"")
    )


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 10))
        v += step
    return ticks


class _Frame:
    def __init__(self, xlim, ylim, width=640, height=420, left=70, right=30, top=40, bottom=55):
        self.xlim, self.ylim = xlim, ylim
        self.width, self.height = width, height
        self.x0, self.x1 = left, width - right
        self.y0, self.y1 = top, height - bottom

    def sx(self, x):
        a, b = self.xlim
        return self.x0 + (x - a) / (b - a) * (self.x1 - self.x0)

    def sy(self, y):
        a, b = self.ylim
        return self.y1 - (y - a) / (b - a) * (self.y1 - self.y0)

    def axes(self, title, xlabel, ylabel) -> list[str]:
        out = [
            f'<rect x="{self.x0}" y="{self.y0}" width="{self.x1 - self.x0}" height="{self.y1 - self.y0}" fill="none" stroke="#000"/>',
            f'<text x="{(self.x0 + self.x1) / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
            f'<text x="{(self.x0 + self.x1) / 2}" y="{self.height - 12}" text-anchor="middle" font-size="13">{escape(xlabel)}</text>',
            f'<text x="16" y="{(self.y0 + self.y1) / 2}" text-anchor="middle" font-size="13" '
            f'transform="rotate(-90 16 {(self.y0 + self.y1) / 2})">{escape(ylabel)}</text>',
        ]
        for t in nice_ticks(*self.xlim):
            x = self.sx(t)
            out.append(f'<line x1="{x:.1f}" y1="{self.y1}" x2="{x:.1f}" y2="{self.y1 + 5}" stroke="#000"/>')
            out.append(f'<text x="{x:.1f}" y="{self.y1 + 18}" text-anchor="middle" font-size="11">{_fmt(t)}</text>')
        for t in nice_ticks(*self.ylim):
            y = self.sy(t)
            out.append(f'<line x1="{self.x0 - 5}" y1="{y:.1f}" x2="{self.x0}" y2="{y:.1f}" stroke="#000"/>')
            out.append(f'<text x="{self.x0 - 8}" y="{y + 4:.1f}" text-anchor="end" font-size="11">{_fmt(t)}</text>')
        return out


def _doc(width, height, body: list[str]) -> str:
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">\n' + "\n".join(body) + "\n</svg>\n"
    )


def _padded(lo, hi):
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return 0.0, 1.0
    if hi <= lo:
        return lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def line_plot(
    series: Sequence[dict],
    title: str,
    xlabel: str,
    ylabel: str,
) -> str:
    """Line plot. Each series is ``{"label", "x", "y"}`` with optional ``"err"`` (shaded +-band)."""
    xs = np.concatenate([np.asarray(s["x"], float) for s in series])
    ys = []
    for s in series:
        y = np.asarray(s["y"], float)
        e = np.asarray(s.get("err", np.zeros_like(y)), float)
        ys += [y - e, y + e]
    ys = np.concatenate(ys)
    ys = ys[np.isfinite(ys)]
    fr = _Frame(_padded(xs.min(), xs.max()), _padded(ys.min() if len(ys) else 0, ys.max() if len(ys) else 1))
    body = fr.axes(title, xlabel, ylabel)
    for k, s in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        x = np.asarray(s["x"], float)
        y = np.asarray(s["y"], float)
        if "err" in s:
            e = np.asarray(s["err"], float)
            upper = [f"{fr.sx(a):.1f},{fr.sy(b):.1f}" for a, b in zip(x, y + e)]
            lower = [f"{fr.sx(a):.1f},{fr.sy(b):.1f}" for a, b in zip(x[::-1], (y - e)[::-1])]
            body.append(f'<polygon points="{" ".join(upper + lower)}" fill="{color}" fill-opacity="0.18" stroke="none"/>')
        pts = " ".join(f"{fr.sx(a):.1f},{fr.sy(b):.1f}" for a, b in zip(x, y) if math.isfinite(b))
        body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.8"/>')
        if len(x) <= 30:
            for a, b in zip(x, y):
                if math.isfinite(b):
                    body.append(f'<circle cx="{fr.sx(a):.1f}" cy="{fr.sy(b):.1f}" r="2.5" fill="{color}"/>')
        ly = fr.y0 + 16 + 16 * k
        body.append(f'<line x1="{fr.x1 - 120}" y1="{ly}" x2="{fr.x1 - 100}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        body.append(f'<text x="{fr.x1 - 95}" y="{ly + 4}" font-size="11">{escape(str(s["label"]))}</text>')
    return _doc(fr.width, fr.height, body)


def heatmap(
    x: np.ndarray,
    z: np.ndarray,
    values: np.ndarray,
    title: str,
    vmin: float,
    vmax: float,
    boxes: Sequence[tuple[float, float, float, float, str]] = (),
    unit: str = "dB",
) -> str:
    """Heatmap of ``values[iz, ix]`` with z upward and a labelled colour bar.

    ``boxes`` are ``(x_min, x_max, z_min, z_max, stroke_colour)`` outlines.
    """
    x = np.asarray(x, float)
    z = np.asarray(z, float)
    hx = 0.5 * (x[1] - x[0]) if len(x) > 1 else 0.5
    hz = 0.5 * (z[1] - z[0]) if len(z) > 1 else 0.5
    xlim = (x[0] - hx, x[-1] + hx)
    zlim = (z[0] - hz, z[-1] + hz)
    aspect = (zlim[1] - zlim[0]) / (xlim[1] - xlim[0])
    plot_w = 520
    plot_h = max(120, int(round(plot_w * aspect)))
    fr = _Frame(xlim, zlim, width=70 + plot_w + 110, height=40 + plot_h + 55, right=110)
    t = (np.asarray(values, float) - vmin) / (vmax - vmin if vmax > vmin else 1.0)
    img = base64.b64encode(png_bytes(colormap(t[::-1]))).decode()
    body = [
        f'<image x="{fr.x0}" y="{fr.y0}" width="{fr.x1 - fr.x0}" height="{fr.y1 - fr.y0}" preserveAspectRatio="none" '
        f'style="image-rendering:pixelated" href="data:image/png;base64,{img}"/>'
    ]
    body += fr.axes(title, "x (m)", "z (m)")
    for x0, x1, z0, z1, color in boxes:
        body.append(
            f'<rect x="{fr.sx(x0):.1f}" y="{fr.sy(z1):.1f}" width="{fr.sx(x1) - fr.sx(x0):.1f}" '
            f'height="{fr.sy(z0) - fr.sy(z1):.1f}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
    # colour bar
    bx = fr.x1 + 20
    n = 64
    ramp = colormap(np.linspace(1, 0, n)[:, None])
    ramp_img = base64.b64encode(png_bytes(np.repeat(ramp, 4, axis=1))).decode()
    body.append(
        f'<image x="{bx}" y="{fr.y0}" width="16" height="{fr.y1 - fr.y0}" preserveAspectRatio="none" '
        f'href="data:image/png;base64,{ramp_img}"/>'
    )
    body.append(f'<rect x="{bx}" y="{fr.y0}" width="16" height="{fr.y1 - fr.y0}" fill="none" stroke="#000"/>')
    for tick in nice_ticks(vmin, vmax):
        y = fr.y1 - (tick - vmin) / (vmax - vmin if vmax > vmin else 1.0) * (fr.y1 - fr.y0)
        body.append(f'<line x1="{bx + 16}" y1="{y:.1f}" x2="{bx + 21}" y2="{y:.1f}" stroke="#000"/>')
        body.append(f'<text x="{bx + 24}" y="{y + 4:.1f}" font-size="11">{_fmt(tick)}</text>')
    body.append(f'<text x="{bx + 8}" y="{fr.y0 - 8}" text-anchor="middle" font-size="11">{escape(unit)}</text>')
    return _doc(fr.width, fr.height, body)
