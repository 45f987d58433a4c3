"""SVG 1.1 drawing of a planar C-coconvex set."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .coconvex import CCoconvexSet
from .errors import UnsupportedPlotDimension

SIZE = 480
PAD = 24


class _View:
    """Affine map from world coordinates to the SVG viewport (y flipped)."""

    def __init__(self, pts):
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        span = float(np.max(hi - lo)) or 1.0
        self.scale = (SIZE - 2 * PAD) / span
        self.lo = lo
        self.hi = hi

    def __call__(self, p):
        x = PAD + (p[0] - self.lo[0]) * self.scale
        y = SIZE - PAD - (p[1] - self.lo[1]) * self.scale
        return f"{x:.3f},{y:.3f}"


def _poly(view, pts, style):
    return f'<polygon points="{" ".join(view(p) for p in pts)}" style="{style}"/>'


def _line(view, a, b, style):
    (x1, y1), (x2, y2) = (view(a).split(","), view(b).split(","))
    return f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" style="{style}"/>'


def render(A: CCoconvexSet, title: str = "") -> str:
    """Cone, A• (truncated), A and the attained halfspace lines with normals."""
    if A.n != 2:
        raise UnsupportedPlotDimension(f"plot supports n = 2 only, got n = {A.n}")
    R = A.real_vertices
    hmax = float(np.max(R @ A.cone.zeta))
    t = 1.5 * hmax
    G = A.cone.generators
    ends = t * G / (G @ A.cone.zeta)[:, None]
    view = _View(np.vstack([np.zeros(2), ends, R]))
    # order boundary vertices of A• by angle between the two rays
    ang = np.arctan2(R[:, 1], R[:, 0])
    a0 = np.arctan2(G[0, 1], G[0, 0])
    order = np.argsort(np.mod(ang - a0, 2 * np.pi))
    chain = R[order]
    first, last = (G[0], G[1])
    lam0 = (t - chain[0] @ A.cone.zeta) / (first @ A.cone.zeta)
    lam1 = (t - chain[-1] @ A.cone.zeta) / (last @ A.cone.zeta)
    closed = np.vstack([chain[0] + lam0 * first, chain, chain[-1] + lam1 * last])
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f"<title>{escape(title or 'C-coconvex set')}</title>",
        _poly(view, closed, "fill:#c6dbef;stroke:none"),
        _poly(view, np.vstack([np.zeros(2), chain]), "fill:#fdd0a2;stroke:#e6550d;stroke-width:1.5"),
    ]
    for e in ends:
        out.append(_line(view, np.zeros(2), e, "stroke:#000;stroke-width:1.5"))
    for u, s, m in zip(A.omega.vectors, A.support, A.facet_measures):
        foot = -s * u
        tangent = np.array([-u[1], u[0]])
        half = 0.6 * hmax
        out.append(_line(view, foot - half * tangent, foot + half * tangent, "stroke:#3182bd;stroke-dasharray:4,3"))
        ids = np.flatnonzero(np.abs(R @ u + s) <= 1e-9 * max(1.0, s))
        mid = R[ids].mean(axis=0) if len(ids) else foot
        out.append(_line(view, mid, mid + 0.15 * hmax * u, "stroke:#31a354;stroke-width:2"))
    out.append("</svg>")
    return "\n".join(out) + "\n"
