import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coconvex.errors import DimensionTooHigh, Empty, LowDimensional, NotUnit, Unbounded
from coconvex.polytope import Halfspace, facet_measure, intersect_halfspaces, support_value, volume

from conftest import SQRT2

D = np.array([1.0, 1.0]) / SQRT2
TRIANGLE = [Halfspace([-1.0, 0.0], 0.0), Halfspace([0.0, -1.0], 0.0), Halfspace(D, SQRT2)]


def cube(n=3):
    hs = []
    for i in range(n):
        e = np.eye(n)[i]
        hs += [Halfspace(-e, 0.0), Halfspace(e, 1.0)]
    return hs


def random_tangent_polytope(seed, n, m):
    """Halfspaces tangent to spheres of varying radii around a jittered centre."""
    rng = np.random.default_rng(seed)
    N = rng.normal(size=(m, n))
    N /= np.linalg.norm(N, axis=1)[:, None]
    c = rng.normal(scale=0.2, size=n)
    r = rng.uniform(0.5, 1.5, m)
    return [Halfspace(a, float(a @ c + ri)) for a, ri in zip(N, r)] + [
        Halfspace(s * np.eye(n)[i], float(s * c[i] + 2.0)) for i in range(n) for s in (1, -1)
    ]


def test_triangle():
    P = intersect_halfspaces(TRIANGLE)
    assert sorted(map(tuple, np.round(P.vertices, 12))) == [(0, 0), (0, 2), (2, 0)]
    assert volume(P) == pytest.approx(2.0, abs=1e-13)
    assert sorted(f.measure for f in P.facets) == pytest.approx([2, 2, 2 * SQRT2], abs=1e-13)


@pytest.mark.parametrize("u, expected", [(D, 2 * SQRT2), ([1, 0], 0.0), ([-1, 0], 2.0)])
def test_triangle_facet_measure(u, expected):
    assert facet_measure(intersect_halfspaces(TRIANGLE), u) == pytest.approx(expected, abs=1e-13)


@pytest.mark.parametrize("u, expected", [(-D, 0.0), (D, SQRT2)])
def test_triangle_support(u, expected):
    assert support_value(intersect_halfspaces(TRIANGLE), u) == pytest.approx(expected, abs=1e-13)


def test_cube():
    P = intersect_halfspaces(cube())
    assert P.volume == pytest.approx(1.0, abs=1e-13)
    assert len(P.facets) == 6
    assert all(f.measure == pytest.approx(1.0, abs=1e-13) for f in P.facets)
    assert facet_measure(P, [0, 0, 1]) == pytest.approx(1.0, abs=1e-13)


def test_redundant_halfspace_inactive():
    P = intersect_halfspaces(TRIANGLE + [Halfspace(D, 3 / SQRT2)])
    assert P.volume == pytest.approx(2.0, abs=1e-13)
    assert P.inactive == (3,)


def test_parallel_duplicates_merge():
    P = intersect_halfspaces(TRIANGLE + [Halfspace(D, SQRT2 + 1e-12)])
    assert len(P.normals) == 3
    assert P.volume == pytest.approx(2.0, abs=1e-12)


def test_errors():
    with pytest.raises(Unbounded):
        intersect_halfspaces(TRIANGLE[:2])
    with pytest.raises(Empty):
        intersect_halfspaces(TRIANGLE + [Halfspace(-D, -2.0)])
    with pytest.raises(LowDimensional):
        intersect_halfspaces(TRIANGLE + [Halfspace([1.0, 0.0], 0.0)])
    with pytest.raises(NotUnit):
        intersect_halfspaces([Halfspace([2.0, 0.0], 1.0)] + TRIANGLE)
    with pytest.raises(DimensionTooHigh):
        intersect_halfspaces(cube(5))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hypercube_volume(n):
    P = intersect_halfspaces(cube(n))
    assert P.volume == pytest.approx(1.0, rel=1e-12)
    assert len(P.vertices) == 2**n
    assert all(f.measure == pytest.approx(1.0, rel=1e-12) for f in P.facets)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(2, 4), m=st.integers(3, 25))
def test_structural_invariants(seed, n, m):
    P = intersect_halfspaces(random_tangent_polytope(seed, n, m))
    total = sum(f.measure for f in P.facets)
    # closing condition
    assert P.closing_residual() <= 1e-8 * total
    # vertices satisfy every halfspace
    assert np.all(P.vertices @ P.normals.T <= P.offsets + 1e-9)
    assert P.volume > 0
    for f in P.facets:
        pts = P.vertices[list(f.vertex_ids)]
        assert np.linalg.matrix_rank(pts[1:] - pts[0], tol=1e-9) == n - 1
    # divergence identity with the origin as apex
    assert P.volume == pytest.approx(sum(f.offset * f.measure for f in P.facets) / n, rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(2, 4))
def test_order_insensitive(seed, n):
    hs = random_tangent_polytope(seed, n, 12)
    P = intersect_halfspaces(hs)
    perm = np.random.default_rng(seed).permutation(len(hs))
    Q = intersect_halfspaces([hs[i] for i in perm])
    assert Q.volume == pytest.approx(P.volume, rel=1e-10)
    mp = sorted(f.measure for f in P.facets)
    mq = sorted(f.measure for f in Q.facets)
    assert mq == pytest.approx(mp, rel=1e-10)


@pytest.mark.parametrize("seed, n", [(1, 2), (2, 2), (3, 3), (4, 3)])
def test_volume_monte_carlo(seed, n):
    hs = random_tangent_polytope(seed, n, 10)
    P = intersect_halfspaces(hs)
    lo, hi = P.vertices.min(axis=0), P.vertices.max(axis=0)
    rng = np.random.default_rng(seed)
    N = 10**6
    X = lo + (hi - lo) * rng.random((N, n))
    inside = np.all(X @ P.normals.T <= P.offsets, axis=1)
    box = np.prod(hi - lo)
    q = inside.mean()
    est, se = box * q, box * np.sqrt(q * (1 - q) / N)
    assert abs(P.volume - est) <= 3 * se


def test_simplex_volumes():
    for n in (2, 3, 4):
        hs = [Halfspace(-e, 0.0) for e in np.eye(n)] + [Halfspace(np.ones(n) / np.sqrt(n), 1 / np.sqrt(n))]
        P = intersect_halfspaces(hs)
        assert P.volume == pytest.approx(1 / np.prod(range(1, n + 1)), rel=1e-12)
