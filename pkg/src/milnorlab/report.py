"""Deterministic JSON reports and static SVG scatter plots."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, is_dataclass

import numpy as np

from . import __version__
from .parse import format_germ
from .poly import MapGerm

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"]


def _plain(obj):
    """Recursively turn dataclasses, numpy values and tuples into JSON-ready data."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return _plain(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _float_text(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = "%.17g" % x
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _emit(obj, indent: int, level: int, out: list):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(pad + json.dumps(k) + ": ")
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
        elif all(not isinstance(v, (dict, list)) for v in obj):
            # flat arrays stay on one line
            out.append("[" + ", ".join(_scalar(v) for v in obj) + "]")
        else:
            out.append("[\n")
            for i, v in enumerate(obj):
                out.append(pad)
                _emit(v, indent, level + 1, out)
                out.append(",\n" if i < len(obj) - 1 else "\n")
            out.append(end + "]")
    else:
        out.append(_scalar(obj))


def _scalar(v) -> str:
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, float):
        return _float_text(v)
    if isinstance(v, int):
        return str(v)
    return json.dumps(v)


def dumps(obj, indent: int = 1) -> str:
    """JSON text with every float printed to 17 significant digits.

    Non-finite floats become the strings "inf", "-inf", "nan".
    """
    out: list[str] = []
    _emit(_plain(obj), indent, 0, out)
    return "".join(out) + "\n"


def loads(text: str):
    def fix(v):
        if isinstance(v, dict):
            return {k: fix(x) for k, x in v.items()}
        if isinstance(v, list):
            return [fix(x) for x in v]
        if v in ("inf", "-inf", "nan"):
            return float(v)
        return v

    return fix(json.loads(text))


def point_cloud(points, labels=None) -> dict:
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.size == 0:
        P = P.reshape(0, P.shape[-1] if P.ndim == 2 else 0)
    lab = np.zeros(len(P), dtype=int) if labels is None else np.asarray(labels, dtype=int)
    return {"shape": list(P.shape), "data": [float(x) for x in P.ravel()], "labels": [int(x) for x in lab]}


def cloud_array(cloud: dict) -> tuple[np.ndarray, np.ndarray]:
    shape = tuple(cloud["shape"])
    return np.asarray(cloud["data"], dtype=float).reshape(shape), np.asarray(cloud["labels"], dtype=int)


def build_report(G: MapGerm, command: str, config: dict, verdicts: dict, clouds: dict | None = None) -> dict:
    """Top-level report: meta, config, verdicts, point_clouds."""
    meta = {
        "tool": "milnorlab",
        "version": __version__,
        "command": command,
        "germ_name": G.name,
        "germ": format_germ(G),
    }
    return {"meta": meta, "config": _plain(config), "verdicts": _plain(verdicts), "point_clouds": clouds or {}}


# ---------------------------------------------------------------- SVG

SIZE = 480
MARGIN = 56


def _view_matrix(dim: int, projection) -> tuple[np.ndarray, list[str]]:
    proj = tuple(int(i) for i in projection)
    if len(proj) not in (2, 3):
        raise ValueError("projection takes two or three coordinate indices")
    if len(set(proj)) != len(proj):
        raise ValueError("projection indices must be distinct")
    for i in proj:
        if not 0 <= i < dim:
            raise IndexError(f"projection index {i} out of range for dimension {dim}")
    V = np.zeros((2, dim))
    if len(proj) == 2:
        V[0, proj[0]] = V[1, proj[1]] = 1.0
        return V, [f"x{proj[0]}", f"x{proj[1]}"]
    # fixed orthographic view: azimuth 30 deg, elevation 20 deg
    az, el = math.radians(30.0), math.radians(20.0)
    right = np.array([math.cos(az), math.sin(az), 0.0])
    up = np.array([-math.sin(el) * math.sin(az), math.sin(el) * math.cos(az), math.cos(el)])
    for row, basis in enumerate((right, up)):
        for j, i in enumerate(proj):
            V[row, i] = basis[j]
    return V, ["view right", "view up"]


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def emit_svg(report: dict, projection=(0, 1), which: str | None = None) -> str:
    """2D scatter of one point cloud of ``report``, coloured by label.

    ``which`` names the cloud (default: the first one).  Three projection
    indices give an orthographic view from a fixed direction.
    """
    clouds = report.get("point_clouds", {})
    if which is None:
        which = next(iter(clouds), None)
    if which is not None and which not in clouds:
        raise KeyError(f"no point cloud named {which!r}; have {sorted(clouds)}")
    if which is None:
        dim = max(max(projection) + 1, 2)
        P, labels = np.zeros((0, dim)), np.zeros(0, dtype=int)
    else:
        P, labels = cloud_array(clouds[which])
        dim = P.shape[1]
    V, axis_names = _view_matrix(dim, projection)
    Q = P @ V.T
    if len(Q):
        lo, hi = Q.min(axis=0), Q.max(axis=0)
    else:
        lo, hi = np.array([-1.0, -1.0]), np.array([1.0, 1.0])
    centre, span = (lo + hi) / 2, hi - lo
    # a (numerically) flat axis borrows the other axis' extent
    big = span.max() if span.max() > 0 else 1.0
    span = np.where(span > 1e-9 * big, span, big)
    lo, hi = centre - 0.55 * span, centre + 0.55 * span
    inner = SIZE - 2 * MARGIN

    def sx(x):
        return MARGIN + (x - lo[0]) / (hi[0] - lo[0]) * inner

    def sy(y):
        return SIZE - MARGIN - (y - lo[1]) / (hi[1] - lo[1]) * inner

    title = f"{report.get('meta', {}).get('germ_name', '')} {which or '(empty)'}".strip()
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
        f'<text x="{SIZE / 2:.2f}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{_esc(title)}</text>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{inner}" height="{inner}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(lo[0], hi[0]):
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{SIZE - MARGIN}" x2="{x:.2f}" y2="{SIZE - MARGIN + 5}" stroke="black"/>')
        out.append(
            f'<text x="{x:.2f}" y="{SIZE - MARGIN + 18}" text-anchor="middle" font-family="sans-serif" font-size="10">{t:.3g}</text>'
        )
    for t in _ticks(lo[1], hi[1]):
        y = sy(t)
        out.append(f'<line x1="{MARGIN - 5}" y1="{y:.2f}" x2="{MARGIN}" y2="{y:.2f}" stroke="black"/>')
        out.append(
            f'<text x="{MARGIN - 8}" y="{y + 3:.2f}" text-anchor="end" font-family="sans-serif" font-size="10">{t:.3g}</text>'
        )
    out.append(
        f'<text x="{SIZE / 2:.2f}" y="{SIZE - 12}" text-anchor="middle" font-family="sans-serif" font-size="12">{axis_names[0]}</text>'
    )
    out.append(
        f'<text x="14" y="{SIZE / 2:.2f}" text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 14 {SIZE / 2:.2f})">{axis_names[1]}</text>'
    )
    for lab in sorted(set(labels.tolist())):
        colour = PALETTE[lab % len(PALETTE)] if lab >= 0 else "#000000"
        sel = Q[labels == lab]
        out.append(f'<g fill="{colour}" fill-opacity="0.7">')
        out.extend(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="1.6"/>' for x, y in sel)
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
