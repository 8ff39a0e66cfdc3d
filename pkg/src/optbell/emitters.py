"""File writers: sweep CSV, PGM images and a small SVG line-plot emitter."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union
from xml.sax.saxutils import escape

import numpy as np

from .experiment import BellCurve, BellRow

PathLike = Union[str, Path]

CSV_HEADER = ("theta", "phi_B", "E_AB", "E_AC", "E_CB", "O", "O_theory", "violated")


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def curve_to_csv(curve: BellCurve) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in curve.rows:
        w.writerow([_fmt(r.theta), _fmt(r.phi_b), _fmt(r.e_ab), _fmt(r.e_ac), _fmt(r.e_cb),
                    _fmt(r.o), _fmt(r.o_theory), "true" if r.violated else "false"])
    return buf.getvalue()


def write_csv(curve: BellCurve, path: PathLike) -> None:
    Path(path).write_text(curve_to_csv(curve), encoding="utf-8", newline="")


def read_csv_rows(text: str) -> list[BellRow]:
    """Parse sweep CSV text back into rows (values at printed precision)."""
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    rows = []
    for rec in reader:
        if not rec:
            continue
        *nums, flag = rec
        if flag not in ("true", "false"):
            raise ValueError(f"bad violated flag {flag!r}")
        rows.append(BellRow(*(float(v) for v in nums), violated=flag == "true"))
    return rows


# PGM (P5) -----------------------------------------------------------------

def pgm_bytes(image: np.ndarray) -> bytes:
    img = np.asarray(image)
    if img.ndim != 2 or img.dtype != np.uint8:
        raise ValueError("PGM export needs a 2D uint8 array")
    h, w = img.shape
    return b"P5\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(img).tobytes()


def write_pgm(image: np.ndarray, path: PathLike) -> None:
    Path(path).write_bytes(pgm_bytes(image))


def read_pgm(data: bytes) -> np.ndarray:
    """Minimal P5 reader (no header comments), used to check exports."""
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        end = pos
        while end < len(data) and not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end])
        pos = end
    if tokens[0] != b"P5":
        raise ValueError("not a binary PGM")
    w, h, maxval = (int(t) for t in tokens[1:])
    if maxval != 255:
        raise ValueError("only 8-bit PGM supported")
    pixels = data[pos + 1: pos + 1 + w * h]
    return np.frombuffer(pixels, dtype=np.uint8).reshape(h, w)


# SVG ------------------------------------------------------------------------

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def line_plot_svg(series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
                  *, hlines: Iterable[float] = (), title: str = "", xlabel: str = "",
                  ylabel: str = "", width: int = 640, height: int = 400,
                  dashed: Optional[set[str]] = None) -> str:
    """SVG 1.1 line plot: one polyline per ``(label, xs, ys)`` series, plus axes.

    ``hlines`` draws horizontal reference lines (e.g. the local-realism bound).
    """
    dashed = dashed or set()
    ml, mr, mt, mb = 60, 130, 30, 45
    pw, ph = width - ml - mr, height - mt - mb
    xs_all = np.concatenate([np.asarray(s[1], float) for s in series])
    ys_all = np.concatenate([np.asarray(s[2], float) for s in series] +
                            [np.asarray(list(hlines), float)])
    x0, x1 = float(xs_all.min()), float(xs_all.max())
    y0, y1 = float(ys_all.min()), float(ys_all.max())
    pad = 0.05 * (y1 - y0 or 1.0)
    y0, y1 = y0 - pad, y1 + pad
    if x1 == x0:
        x1 = x0 + 1.0

    def sx(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return mt + (y1 - y) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _nice_ticks(x0, x1):
        X = sx(t)
        out.append(f'<line x1="{X:.2f}" y1="{mt + ph}" x2="{X:.2f}" y2="{mt + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{mt + ph + 18}" font-size="11" '
                   f'text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y0, y1):
        Y = sy(t)
        out.append(f'<line x1="{ml - 5}" y1="{Y:.2f}" x2="{ml}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{ml - 8}" y="{Y + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{t:g}</text>')
    for h in hlines:
        Y = sy(h)
        out.append(f'<line x1="{ml}" y1="{Y:.2f}" x2="{ml + pw}" y2="{Y:.2f}" '
                   'stroke="gray" stroke-dasharray="2,3"/>')
    for k, (label, xs, ys) in enumerate(series):
        color = _PALETTE[k % len(_PALETTE)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        dash = ' stroke-dasharray="6,4"' if label in dashed else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{pts}"/>')
        ly = mt + 14 + 18 * k
        out.append(f'<line x1="{ml + pw + 10}" y1="{ly}" x2="{ml + pw + 30}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="1.5"{dash}/>')
        out.append(f'<text x="{ml + pw + 35}" y="{ly + 4}" font-size="11">{escape(label)}</text>')
    if title:
        out.append(f'<text x="{ml + pw / 2:.1f}" y="{mt - 10}" font-size="13" '
                   f'text-anchor="middle">{escape(title)}</text>')
    if xlabel:
        out.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 8}" font-size="12" '
                   f'text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="14" y="{mt + ph / 2:.1f}" font-size="12" text-anchor="middle" '
                   f'transform="rotate(-90 14 {mt + ph / 2:.1f})">{escape(ylabel)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def curve_svg(curve: BellCurve) -> str:
    th = curve.thetas
    return line_plot_svg(
        [(f"<O> ({curve.backend.value})", th, curve.values),
         ("q sin(theta) - cos(theta)", th, curve.column("o_theory"))],
        hlines=[1.0],
        title=f"<O> vs theta, q = {curve.q:g}",
        xlabel="theta [rad]", ylabel="<O>",
        dashed={"q sin(theta) - cos(theta)"},
    )
