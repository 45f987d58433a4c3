"""Bounded polytopes from halfspaces: vertices, facets, volumes.

Vertex enumeration is incremental (double description): start from a known
bounded polytope and clip by one halfspace at a time.  The clip step lives
in a compiled extension with a numpy fallback, see ``_kernel``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import linprog

from . import _kernel
from .errors import DimensionTooHigh, Empty, LowDimensional, NotUnit, Unbounded

ANGLE_TOL = 1e-8
MERGE_OFFSET_TOL = 1e-9
MAX_DIM = 4


class Halfspace(NamedTuple):
    """The set ``{x : x·normal <= offset}``."""

    normal: np.ndarray
    offset: float


class Facet(NamedTuple):
    index: int
    normal: np.ndarray
    offset: float
    vertex_ids: tuple
    measure: float


def _perp_basis(a):
    _, _, vt = np.linalg.svd(np.asarray(a, dtype=float)[None, :])
    return vt[1:]


def face_measure(points, normal) -> float:
    """(n-1)-measure of the convex hull of ``points`` lying in a hyperplane."""
    pts = np.asarray(points, dtype=float)
    n = pts.shape[1]
    if len(pts) < n:
        return 0.0
    if n == 2:
        d = np.array([-normal[1], normal[0]])
        pr = pts @ d
        return float(pr.max() - pr.min())
    B = _perp_basis(normal)
    xy = (pts - pts.mean(axis=0)) @ B.T
    if n == 3:
        ang = np.arctan2(xy[:, 1], xy[:, 0])
        q = xy[np.argsort(ang, kind="stable")]
        x, y = q[:, 0], q[:, 1]
        return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))
    from scipy.spatial import ConvexHull, QhullError

    try:
        return float(ConvexHull(xy).volume)
    except QhullError:
        return 0.0


@dataclass(frozen=True, eq=False)
class Polytope:
    """Immutable bounded polytope with its H- and V-descriptions.

    ``normals``/``offsets`` list every halfspace that was intersected, in
    order.  Halfspaces without an (n-1)-dimensional face are listed in
    ``inactive``; ``facets`` holds the others.
    """

    vertices: np.ndarray
    incidence: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    facets: tuple
    inactive: tuple
    volume: float

    @property
    def n(self) -> int:
        return self.vertices.shape[1]

    def facet_measure(self, u) -> float:
        return facet_measure(self, u)

    def support_value(self, u) -> float:
        return support_value(self, u)

    def facet_for(self, index: int):
        for f in self.facets:
            if f.index == index:
                return f
        return None

    def closing_residual(self) -> float:
        """Norm of the sum of measure-weighted facet normals."""
        if not self.facets:
            return 0.0
        return float(np.linalg.norm(sum(f.measure * f.normal for f in self.facets)))

    def to_record(self) -> dict:
        return {
            "vertices": self.vertices.tolist(),
            "facets": [
                {
                    "normal": f.normal.tolist(),
                    "offset": float(f.offset),
                    "vertices": list(f.vertex_ids),
                    "measure": float(f.measure),
                }
                for f in self.facets
            ],
            "volume": float(self.volume),
        }


def volume(p: Polytope) -> float:
    return p.volume


def facet_measure(p: Polytope, u) -> float:
    """Measure of the facet with outer normal ``u``; 0 when absent."""
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    for f in p.facets:
        if np.linalg.norm(f.normal - u) <= ANGLE_TOL:
            return f.measure
    return 0.0


def support_value(p: Polytope, u) -> float:
    return float(np.max(p.vertices @ np.asarray(u, dtype=float)))


class _Builder:
    """Mutable working state of an incremental halfspace intersection."""

    def __init__(self, V, I, normals, offsets):
        self.V = np.ascontiguousarray(V, dtype=float)
        self.I = np.ascontiguousarray(I, dtype=np.uint64)
        self.A = [np.asarray(a, dtype=float) for a in normals]
        self.b = [float(x) for x in offsets]

    def add(self, a, b):
        col = len(self.A)
        need = col // 64 + 1
        if self.I.shape[1] < need:
            pad = np.zeros((self.I.shape[0], need - self.I.shape[1]), dtype=np.uint64)
            self.I = np.ascontiguousarray(np.hstack([self.I, pad]))
        a = np.ascontiguousarray(a, dtype=float)
        scale = max(1.0, float(np.max(np.abs(self.V))), abs(b))
        V, I, status = _kernel.clip(self.V, self.I, a, float(b), col, self.V.shape[1], 1e-11 * scale)
        if status == _kernel.NO_INTERIOR:
            raise LowDimensional("halfspace leaves no interior")
        self.V, self.I = V, I
        self.A.append(a)
        self.b.append(float(b))
        return status

    def finish(self, skip=()) -> Polytope:
        V, I = self.V, self.I
        n = V.shape[1]
        A = np.array(self.A)
        b = np.array(self.b)
        scale = max(1.0, float(np.max(np.abs(V))))
        tiny = 1e-13 * scale ** (n - 1)
        facets, inactive = [], []
        skip = set(skip)
        for h in range(len(A)):
            if h in skip:
                continue
            word, bit = divmod(h, 64)
            on = (I[:, word] >> np.uint64(bit)) & np.uint64(1)
            ids = np.flatnonzero(on)
            m = face_measure(V[ids], A[h]) if len(ids) >= n else 0.0
            if m > tiny:
                facets.append(Facet(h, A[h], float(b[h]), tuple(int(i) for i in ids), m))
            else:
                inactive.append(h)
        c = V.mean(axis=0)
        vol = sum((f.offset - f.normal @ c) * f.measure for f in facets) / n
        V = V.copy()
        V.setflags(write=False)
        A.setflags(write=False)
        b.setflags(write=False)
        return Polytope(V, I, A, b, tuple(facets), tuple(inactive), float(vol))


def cone_builder(cone, t: float) -> _Builder:
    """Builder initialised with ``C_t``; halfspace 0..F-1 are the cone facets, F the cut."""
    G = cone.generators
    Q = cone.facet_normals
    F = len(Q)
    n = cone.n
    heights = G @ cone.zeta
    V = np.vstack([np.zeros(n), t * G / heights[:, None]])
    W = (F + 1) // 64 + 1
    I = np.zeros((len(V), W), dtype=np.uint64)
    tight = np.abs(G @ Q.T) <= 1e-9
    for j in range(F):
        w, bit = divmod(j, 64)
        I[0, w] |= np.uint64(1) << np.uint64(bit)
        I[1:, w][tight[:, j]] |= np.uint64(1) << np.uint64(bit)
    w, bit = divmod(F, 64)
    I[1:, w] |= np.uint64(1) << np.uint64(bit)
    return _Builder(V, I, list(Q) + [cone.zeta], list(np.zeros(F)) + [t])


def cone_truncation(cone, t: float) -> Polytope:
    return cone_builder(cone, t).finish()


def _merge(normals, offsets):
    keepA, keepb, index = [], [], []
    for a, b in zip(normals, offsets):
        for k, (a2, b2) in enumerate(zip(keepA, keepb)):
            if np.linalg.norm(a - a2) <= ANGLE_TOL and abs(b - b2) <= MERGE_OFFSET_TOL:
                keepb[k] = min(b, b2)
                index.append(k)
                break
        else:
            index.append(len(keepA))
            keepA.append(a)
            keepb.append(b)
    return np.array(keepA), np.array(keepb), index


def intersect_halfspaces(hs) -> Polytope:
    """Intersect a list of :class:`Halfspace` (or ``(normal, offset)`` pairs).

    Parallel halfspaces that agree within tolerance are merged; the result
    lists the merged halfspaces in first-appearance order.
    """
    hs = list(hs)
    if not hs:
        raise Unbounded("no halfspaces")
    A = np.array([np.asarray(h[0], dtype=float) for h in hs])
    b = np.array([float(h[1]) for h in hs])
    n = A.shape[1]
    if n > MAX_DIM:
        raise DimensionTooHigh(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
    if np.any(np.abs(np.linalg.norm(A, axis=1) - 1.0) > 1e-8):
        raise NotUnit("halfspace normals must be unit vectors")
    A, b, _ = _merge(A, b)

    lo, hi = np.empty(n), np.empty(n)
    for i in range(n):
        for sign, out in ((1.0, lo), (-1.0, hi)):
            c = np.zeros(n)
            c[i] = sign
            res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * n, method="highs")
            if res.status == 2:
                raise Empty("halfspaces have empty intersection")
            if res.status == 3:
                raise Unbounded(f"recession direction along axis {i}")
            if res.status != 0:
                raise Unbounded(res.message)
            out[i] = res.x[i]
    scale = max(1.0, float(np.max(np.abs(np.concatenate([lo, hi])))))
    # Chebyshev ball detects an empty interior
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res = linprog(
        c,
        A_ub=np.hstack([A, np.ones((len(A), 1))]),
        b_ub=b,
        bounds=[(None, None)] * n + [(None, scale)],
        method="highs",
    )
    if res.status != 0 or -res.fun <= 1e-9 * scale:
        raise LowDimensional("intersection has empty interior")

    margin = 1.0 + (hi - lo)
    lo, hi = lo - margin, hi + margin
    H = len(A)
    corners = np.array(np.meshgrid(*[[0, 1]] * n, indexing="ij")).reshape(n, -1).T
    V = np.where(corners == 1, hi, lo).astype(float)
    box_A, box_b = [], []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        box_A += [-e, e]
        box_b += [-lo[i], hi[i]]
    # box facets take the first 2n columns
    I = np.zeros((len(V), (2 * n + H) // 64 + 1), dtype=np.uint64)
    for i in range(n):
        for side in (0, 1):
            col = 2 * i + side
            w, bit = divmod(col, 64)
            I[corners[:, i] == side, w] |= np.uint64(1) << np.uint64(bit)
    bld = _Builder(V, I, box_A, box_b)
    for a, off in zip(A, b):
        bld.add(a, off)
    P = bld.finish(skip=range(2 * n))
    # strip the auxiliary box columns
    return _reindex(P, 2 * n)


def _reindex(P: Polytope, drop: int) -> Polytope:
    facets = tuple(f._replace(index=f.index - drop) for f in P.facets)
    inactive = tuple(h - drop for h in P.inactive)
    normals = P.normals[drop:]
    offsets = P.offsets[drop:]
    return Polytope(P.vertices, P.incidence, normals, offsets, facets, inactive, P.volume)
