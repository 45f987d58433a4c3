"""C-coconvex sets determined by a finite direction set.

A set in the class 𝒦(C, ω) is stored through its C-close partner
``A• = C ∩ ⋂_{u∈ω} {x : x·u <= -h̄(u)}`` truncated far away by
``{x·ζ <= t*}``.  The co-volume of ``A = C \\ A•`` is then the difference of
two polytope volumes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cone import Cone, in_omega
from .errors import (
    EmptyOmega,
    InternalGeometryError,
    NonPositiveF,
    NotUnit,
    ZeroP,
    ZeroVolume,
)
from .polytope import ANGLE_TOL, Polytope, cone_builder, cone_truncation

ATTAIN_TOL = 1e-9


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """Finite set of pairwise distinct unit directions in Ω_C."""

    vectors: np.ndarray

    @classmethod
    def of(cls, cone: Cone, dirs) -> "DirectionSet":
        if isinstance(dirs, DirectionSet):
            dirs = dirs.vectors
        U = np.atleast_2d(np.asarray(dirs, dtype=float))
        if U.size == 0:
            raise EmptyOmega("direction set is empty")
        if U.shape[1] != cone.n:
            raise NotUnit(f"directions have dimension {U.shape[1]}, cone has {cone.n}")
        for i, u in enumerate(U):
            if not in_omega(cone, u):
                raise NotUnit(f"direction {i} = {u.tolist()} is not in the interior of the polar cone")
            for j in range(i):
                if np.linalg.norm(u - U[j]) <= ANGLE_TOL:
                    raise NotUnit(f"directions {j} and {i} coincide")
        return cls(_frozen(U))

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def index_of(self, u, tol: float = ANGLE_TOL):
        d = np.linalg.norm(self.vectors - np.asarray(u, dtype=float), axis=1)
        i = int(np.argmin(d))
        return i if d[i] <= tol else None

    def union(self, other: "DirectionSet") -> "DirectionSet":
        rows = list(self.vectors)
        for u in other.vectors:
            if self.index_of(u) is None:
                rows.append(u)
        return DirectionSet(_frozen(rows))


@dataclass(frozen=True, eq=False)
class SupportVector:
    """Positive values h̄(A, u) aligned with a :class:`DirectionSet`."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise NonPositiveF("support values must be positive and finite")
        object.__setattr__(self, "values", _frozen(v))


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finite nonnegative measure on Ω_C with atoms at ``directions``."""

    directions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "directions", _frozen(np.atleast_2d(self.directions)))
        w = _frozen(np.atleast_1d(self.weights))
        if np.any(w < 0):
            raise ValueError("measure weights must be nonnegative")
        object.__setattr__(self, "weights", w)

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    @property
    def atoms(self):
        return list(zip(self.directions, self.weights))

    def weight_at(self, u) -> float:
        d = np.linalg.norm(self.directions - np.asarray(u, dtype=float), axis=1)
        i = int(np.argmin(d))
        return float(self.weights[i]) if d[i] <= ANGLE_TOL else 0.0

    def scaled(self, alpha: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.directions, alpha * self.weights)

    def to_record(self) -> dict:
        return {"atoms": [{"u": u.tolist(), "w": float(w)} for u, w in self.atoms]}


@dataclass(frozen=True, eq=False)
class CCoconvexSet:
    """A C-coconvex set ``A`` in 𝒦(C, ω) with cached geometry.

    ``support`` holds attained values h̄(A, u) on ω, ``requested`` the values
    the set was built from.  ``body`` is ``A• ∩ C_{t*}``.
    """

    cone: Cone
    omega: DirectionSet
    support: np.ndarray
    requested: np.ndarray
    t_star: float
    body: Polytope
    covolume: float
    facet_measures: np.ndarray
    real_vertices: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.cone.n

    @property
    def attained(self) -> np.ndarray:
        """Directions whose halfspace touches A• at the requested value."""
        r = self.requested
        return np.abs(self.support - r) <= ATTAIN_TOL * np.maximum(1.0, r)

    @property
    def active(self) -> np.ndarray:
        """Directions carrying a facet of positive measure."""
        return self.facet_measures > 0

    def h(self, u) -> np.ndarray:
        """Support function h̄(A, u) = min over A• of -u·x, for u in the closure of Ω_C."""
        U = np.asarray(u, dtype=float)
        vals = -(self.real_vertices @ np.atleast_2d(U).T).max(axis=0)
        return vals if U.ndim == 2 else float(vals[0])

    def dilate(self, alpha: float) -> "CCoconvexSet":
        return wulff_shape(self.cone, self.omega, alpha * self.support)

    def with_support(self, s) -> "CCoconvexSet":
        return wulff_shape(self.cone, self.omega, s)

    def to_record(self) -> dict:
        return {
            "cone": self.cone.to_record(),
            "omega": self.omega.vectors.tolist(),
            "support": self.support.tolist(),
        }

    def __repr__(self):
        return (
            f"CCoconvexSet(n={self.n}, |omega|={len(self.omega)}, "
            f"support={self.support.tolist()}, covolume={self.covolume!r})"
        )


def _cone_unit_volume(cone: Cone) -> float:
    if "unit_volume" not in cone._cache:
        cone._cache["unit_volume"] = cone_truncation(cone, 1.0).volume
    return cone._cache["unit_volume"]


def generous_height(cone: Cone, omega: np.ndarray, f: np.ndarray) -> float:
    """Height t with ``C ∩ {x·ζ >= t}`` inside every halfspace of the Wulff shape."""
    G = cone.generators
    gz = G @ cone.zeta
    gu = -(omega @ G.T)  # (m, k), positive on Ω_C
    return float(np.max(f[:, None] * gz[None, :] / gu))


def wulff_shape(cone: Cone, omega, f) -> CCoconvexSet:
    """Wulff shape ``C ∩ ⋂ H⁻(u, -f(u))`` as a C-coconvex set.

    Parameters
    ----------
    cone : Cone
    omega : DirectionSet or array_like (m, n)
    f : array_like (m,) or SupportVector
        Positive values on ω.

    Returns
    -------
    CCoconvexSet
        Attained values ``h̄(A, u) >= f(u)`` are stored; directions whose
        halfspace misses A• are reported by ``attained``.
    """
    if not isinstance(omega, DirectionSet):
        omega = DirectionSet.of(cone, omega)
    if isinstance(f, SupportVector):
        f = f.values
    f = np.asarray(f, dtype=float).reshape(-1)
    if len(omega) == 0:
        raise EmptyOmega("direction set is empty")
    if f.shape != (len(omega),):
        raise NonPositiveF(f"expected {len(omega)} support values, got {f.shape}")
    if not np.all(np.isfinite(f)) or np.any(f <= 0):
        raise NonPositiveF("support values must be positive and finite")

    U = omega.vectors
    F = len(cone.facet_normals)
    T = 2.0 * generous_height(cone, U, f)
    bld = cone_builder(cone, T)
    for u, fu in zip(U, f):
        bld.add(u, -fu)
    word, bit = divmod(F, 64)
    on_cut = ((bld.I[:, word] >> np.uint64(bit)) & np.uint64(1)).astype(bool)
    real = bld.V[~on_cut]
    hmax = float(np.max(real @ cone.zeta))
    t_star = 2.0 * hmax
    if t_star < T * (1.0 - 1e-9):
        cut2 = len(bld.A)
        bld.add(cone.zeta, t_star)
    else:
        t_star, cut2 = T, F
    body = bld.finish()

    w2, b2 = divmod(cut2, 64)
    on2 = ((body.incidence[:, w2] >> np.uint64(b2)) & np.uint64(1)).astype(bool)
    real = body.vertices[~on2]
    real.setflags(write=False)

    allowed = set(range(F + 1 + len(U))) | {cut2}
    measures = np.zeros(len(U))
    for fc in body.facets:
        if fc.index not in allowed:
            raise InternalGeometryError(f"unexpected facet index {fc.index}")
        if F < fc.index <= F + len(U):
            measures[fc.index - F - 1] = fc.measure

    cov = _difference_volume(cone, body, cut2, t_star, f, measures)
    if not cov > 0:
        raise ZeroVolume(f"co-volume {cov!r} is not positive")
    attained = -(real @ U.T).max(axis=0)
    return CCoconvexSet(
        cone=cone,
        omega=omega,
        support=_frozen(attained),
        requested=_frozen(f),
        t_star=t_star,
        body=body,
        covolume=float(cov),
        facet_measures=_frozen(measures),
        real_vertices=real,
    )


def _difference_volume(cone, body, cut, t, f, measures) -> float:
    """``V(C_t) - V(body)`` with both volumes taken from the origin.

    Cone facets pass through the origin and drop out; the slice at height
    ``t`` is shared by both polytopes unless an ω-halfspace clips it, so the
    large terms cancel before any rounding happens.
    """
    n = cone.n
    F = len(cone.facet_normals)
    fc = body.facet_for(cut)
    gap = 0.0
    if fc is not None:
        ids = list(fc.vertex_ids)
        omega_cols = range(F + 1, F + 1 + len(f))
        I = body.incidence[ids]
        clipped = any(((I[:, c // 64] >> np.uint64(c % 64)) & np.uint64(1)).any() for c in omega_cols)
        if clipped:
            gap = n * _cone_unit_volume(cone) * t ** (n - 1) - fc.measure
    else:
        gap = n * _cone_unit_volume(cone) * t ** (n - 1)
    return float((t * gap + np.dot(f, measures)) / n)


def covolume(a: CCoconvexSet) -> float:
    return a.covolume


def covolume_at(a: CCoconvexSet, t: float) -> float:
    """Co-volume recomputed with the far cut at height ``t`` (``t >= t*/2``)."""
    bld = cone_builder(a.cone, t)
    for u, fu in zip(a.omega.vectors, a.support):
        bld.add(u, -fu)
    body = bld.finish()
    F = len(a.cone.facet_normals)
    m = np.zeros(len(a.omega))
    for fc in body.facets:
        if F < fc.index <= F + len(a.omega):
            m[fc.index - F - 1] = fc.measure
    return _difference_volume(a.cone, body, F, t, a.support, m)


def surface_measure(a: CCoconvexSet) -> DiscreteMeasure:
    return DiscreteMeasure(a.omega.vectors, a.facet_measures)


def _check_p(p):
    if p == 0:
        raise ZeroP("p must be nonzero")


def lp_surface_measure(a: CCoconvexSet, p: float) -> DiscreteMeasure:
    _check_p(p)
    return DiscreteMeasure(a.omega.vectors, a.support ** (1.0 - p) * a.facet_measures)


def cone_volume_measure(a: CCoconvexSet) -> DiscreteMeasure:
    return DiscreteMeasure(a.omega.vectors, a.support * a.facet_measures / a.n)


def is_c_determined(cone: Cone, omega, s) -> bool:
    """True iff every halfspace of the Wulff shape of ``s`` touches it."""
    return bool(np.all(wulff_shape(cone, omega, s).attained))
