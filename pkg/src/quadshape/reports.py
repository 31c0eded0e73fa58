"""Deterministic report writers.

Downstream tooling diffs report files byte-for-byte between runs, so all
serialization here is hand-rolled with fixed float formatting (%.17g keeps
doubles round-trippable) and no timestamps, hostnames, or other
run-dependent noise.  The JSON writer covers exactly the types the reports
use: dict, list/tuple, str, bool, None, int, and float (including numpy
scalars and arrays).
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import TWO_PI


def format_float(x):
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    if x == int(x) and abs(x) < 1e16:
        return "%.1f" % x
    return "%.17g" % x


_ESCAPES = {'"': '\\"', "\\": "\\\\", "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _json_string(s):
    out = ['"']
    for ch in s:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append("\\u%04x" % ord(ch))
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _json_value(value, indent, level):
    pad = " " * (indent * (level + 1))
    close_pad = " " * (indent * level)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f"{pad}{_json_string(str(k))}: {_json_value(v, indent, level + 1)}"
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + close_pad + "}"
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{pad}{_json_value(v, indent, level + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + close_pad + "]"
    if isinstance(value, str):
        return _json_string(value)
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    raise TypeError(f"cannot serialize {type(value).__name__} deterministically")


def to_json(value, indent=2):
    return _json_value(value, indent, 0) + "\n"


def write_json(value, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(to_json(value))


def write_csv(path, header, columns):
    """Write named columns of equal length with %.17g floats."""
    cols = [np.asarray(c) for c in columns]
    rows = len(cols[0])
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for i in range(rows):
            fh.write(",".join(format_float(c[i]) for c in cols) + "\n")


STATE_CSV_HEADER = "theta,x,y,u_nu,psi,kappa,w"


def write_state_csv(state, path):
    c = state.curve
    write_csv(path, STATE_CSV_HEADER,
              [c.theta, c.points[:, 0], c.points[:, 1],
               state.u_nu, state.psi, c.kappa, c.weights])


def write_matrix_csv(matrix, path):
    matrix = np.asarray(matrix, dtype=float)
    with open(path, "w", newline="\n") as fh:
        for row in matrix:
            fh.write(",".join(format_float(v) for v in row) + "\n")


def curves_svg(curves, labels=None, size=220, pad=12):
    """A horizontal strip of curve snapshots as a standalone SVG string."""
    if labels is None:
        labels = [""] * len(curves)
    spans = []
    for curve in curves:
        pts = curve.points
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        spans.append((lo, hi, float(np.max(hi - lo))))
    width = size * len(curves)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{size + 18}" viewBox="0 0 {width} {size + 18}">',
    ]
    for idx, (curve, label) in enumerate(zip(curves, labels)):
        lo, hi, span = spans[idx]
        scale = (size - 2 * pad) / span if span > 0 else 1.0
        cx = 0.5 * (lo[0] + hi[0])
        cy = 0.5 * (lo[1] + hi[1])
        x0 = idx * size + size / 2
        coords = []
        for px, py in curve.points:
            sx = x0 + (px - cx) * scale
            sy = size / 2 - (py - cy) * scale
            coords.append("%.2f,%.2f" % (sx, sy))
        coords.append(coords[0])
        parts.append(
            f'<polyline points="{" ".join(coords)}" fill="none" '
            f'stroke="black" stroke-width="1.2"/>')
        if label:
            parts.append(
                f'<text x="{x0:.1f}" y="{size + 13}" font-size="11" '
                f'text-anchor="middle" font-family="monospace">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_curves_svg(curves, labels, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(curves_svg(curves, labels))


def metric_params_dict(params):
    return {"A": params.A, "k": params.k}


def source_dict(source):
    return {
        "disks": [
            {"x": d.cx, "y": d.cy, "rho": d.rho, "mass": d.mass}
            for d in source.disks
        ],
        "total_mass": source.total_mass,
    }


def curve_dict(curve):
    return {
        "n": curve.n,
        "area": curve.area,
        "perimeter": curve.perimeter,
        "diameter": curve.diameter,
        "min_kappa": float(np.min(curve.kappa)),
        "max_kappa": float(np.max(curve.kappa)),
        "total_curvature": float(np.sum(curve.kappa * curve.weights)),
        "total_curvature_gap": float(np.sum(curve.kappa * curve.weights) - TWO_PI),
    }
