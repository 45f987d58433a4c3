"""Pointed polyhedral cones, their polars and the direction domain.

A cone is stored by its extreme rays (unit generators) together with the
outward unit normals of its facets, so both descriptions are available
without recomputation.  Directions admissible as facet normals of a
C-close set are the unit vectors in the interior of the polar cone.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DegenerateCone,
    DimensionTooHigh,
    NonPositiveT,
    NotPointed,
    NotUnit,
    ZetaFailure,
)

EPS = 1e-9
MAX_DIM = 4


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Cone:
    """Pointed polyhedral cone with nonempty interior."""

    generators: np.ndarray
    zeta: np.ndarray
    facet_normals: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.generators.shape[1]

    def polar(self) -> "Cone":
        return polar_cone(self)

    def in_omega(self, u) -> bool:
        return in_omega(self, u)

    def truncate(self, t: float):
        return truncate(self, t)

    def contains(self, x, tol: float = EPS) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(self.facet_normals @ x <= tol * max(1.0, np.linalg.norm(x))))

    def same_as(self, other: "Cone", tol: float = 1e-9) -> bool:
        if other is self:
            return True
        if other.n != self.n or len(other.generators) != len(self.generators):
            return False
        d = self.generators @ other.generators.T
        return bool(np.all(d.max(axis=1) > 1.0 - tol) and np.all(d.max(axis=0) > 1.0 - tol))

    def to_record(self) -> dict:
        return {"n": self.n, "generators": self.generators.tolist()}

    def __repr__(self):
        return f"Cone(n={self.n}, generators={self.generators.tolist()})"


def _interior_functional(G):
    """Maximize ``delta`` subject to ``G z >= delta`` and ``|z|_inf <= 1``."""
    m, n = G.shape
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A = np.hstack([-G, np.ones((m, 1))])
    res = linprog(
        c,
        A_ub=A,
        b_ub=np.zeros(m),
        bounds=[(-1.0, 1.0)] * n + [(None, 1.0)],
        method="highs",
    )
    if res.status != 0:
        return None, 0.0
    return res.x[:n], -res.fun


def _unique_rows(X, tol=1e-9):
    keep = []
    for x in X:
        if not any(float(x @ y) > 1.0 - tol for y in keep):
            keep.append(x)
    return np.array(keep)


def _facets_from_generators(G):
    m, n = G.shape
    normals = []
    for combo in itertools.combinations(range(m), n - 1):
        sub = G[list(combo)]
        _, sv, vt = np.linalg.svd(sub)
        if n - 1 > 0 and sv[-1] < 1e-10:
            continue
        nv = vt[-1]
        d = G @ nv
        if np.all(d <= EPS):
            pass
        elif np.all(d >= -EPS):
            nv = -nv
        else:
            continue
        nv /= np.linalg.norm(nv)
        if not any(float(nv @ q) > 1.0 - 1e-9 for q in normals):
            normals.append(nv)
    return np.array(normals)


def make_cone(generators) -> Cone:
    """Build a cone from (not necessarily unit, not necessarily extreme) generators."""
    G = np.atleast_2d(np.asarray(generators, dtype=float))
    if G.size == 0:
        raise DegenerateCone("empty generator list")
    m, n = G.shape
    if n < 2:
        raise DegenerateCone("cones need dimension n >= 2")
    if n > MAX_DIM:
        raise DimensionTooHigh(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
    norms = np.linalg.norm(G, axis=1)
    if np.any(norms < 1e-12):
        raise DegenerateCone("zero generator")
    G = G / norms[:, None]
    G = _unique_rows(G)

    z, delta = _interior_functional(G)
    if z is None or delta <= EPS:
        raise NotPointed("generators span a line (no strictly positive functional)")
    if np.linalg.matrix_rank(G, tol=1e-9) < n:
        raise DegenerateCone("generators do not span the ambient space")

    normals = _facets_from_generators(G)
    # drop generators that are not extreme rays
    tight = np.abs(G @ normals.T) <= 1e-9
    extreme = []
    for i in range(len(G)):
        act = normals[tight[i]]
        if len(act) and np.linalg.matrix_rank(act, tol=1e-9) == n - 1:
            extreme.append(i)
    G = G[extreme]

    zeta = G.mean(axis=0)
    zeta /= np.linalg.norm(zeta)
    if np.min(G @ zeta) <= EPS:
        zeta = z / np.linalg.norm(z)
        if np.min(G @ zeta) <= EPS:
            raise ZetaFailure("no strictly positive functional found on the generators")
    return Cone(_frozen(G), _frozen(zeta), _frozen(normals))


def polar_cone(c: Cone) -> Cone:
    """Polar cone; its generators are the outward facet normals of ``c``."""
    if "polar" not in c._cache:
        c._cache["polar"] = make_cone(c.facet_normals)
    return c._cache["polar"]


def in_omega(c: Cone, u, eps: float = EPS) -> bool:
    u = np.asarray(u, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > 1e-8:
        raise NotUnit(f"|u| = {np.linalg.norm(u)!r} is not 1")
    return bool(np.all(c.generators @ u < -eps))


def truncate(c: Cone, t: float):
    """The bounded polytope ``C_t = C ∩ {x·ζ <= t}``."""
    from .polytope import cone_truncation

    if not t > 0:
        raise NonPositiveT(f"truncation height must be positive, got {t!r}")
    return cone_truncation(c, t)


def omega_grid(c: Cone, count: int) -> np.ndarray:
    """Roughly ``count`` unit directions covering the closure of Ω_C.

    The grid includes the boundary of Ω_C.  Points are laid out on the slice
    of the polar cone by the hyperplane ``{x · w = 1}`` with ``w`` in ``-int C``.
    """
    Q = c.facet_normals
    n = c.n
    if n == 2:
        a, b = Q[0], Q[1]
        ang = np.arccos(np.clip(a @ b, -1.0, 1.0))
        e = b - (a @ b) * a
        e /= np.linalg.norm(e)
        th = np.linspace(0.0, ang, count)
        return np.cos(th)[:, None] * a + np.sin(th)[:, None] * e
    w = -c.generators.sum(axis=0)
    w /= np.linalg.norm(w)
    P = Q / (Q @ w)[:, None]
    # orthonormal basis of w-perp
    _, _, vt = np.linalg.svd(w[None, :])
    B = vt[1:]
    xy = P @ B.T
    if n == 3:
        from scipy.spatial import ConvexHull

        hull = ConvexHull(xy)
        poly = xy[hull.vertices]
        area = hull.volume
        h = np.sqrt(area / count)
        lo, hi = poly.min(axis=0), poly.max(axis=0)
        gx = np.arange(lo[0], hi[0] + h, h)
        gy = np.arange(lo[1], hi[1] + h, h)
        X, Y = np.meshgrid(gx, gy)
        pts = np.column_stack([X.ravel(), Y.ravel()])
        # boundary samples along every polygon edge
        edge = []
        for i in range(len(poly)):
            p0, p1 = poly[i], poly[(i + 1) % len(poly)]
            k = max(2, int(np.ceil(np.linalg.norm(p1 - p0) / h)) + 1)
            s = np.linspace(0.0, 1.0, k)[:-1]
            edge.append(p0 + s[:, None] * (p1 - p0))
        pts = np.vstack([pts] + edge)
    else:
        # n == 4: random-free lattice over the bounding box of the slice
        lo, hi = xy.min(axis=0), xy.max(axis=0)
        k = max(3, int(round(count ** (1.0 / 3.0))))
        axes = [np.linspace(lo[i], hi[i], k) for i in range(3)]
        mesh = np.meshgrid(*axes)
        pts = np.column_stack([m.ravel() for m in mesh])
        pts = np.vstack([pts, xy])
    X = w[None, :] + pts @ B
    inside = np.all(X @ c.generators.T <= 1e-12, axis=1)
    X = X[inside]
    return X / np.linalg.norm(X, axis=1)[:, None]
