import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coconvex import (
    DirectionSet,
    cone_volume_measure,
    is_c_determined,
    lp_surface_measure,
    make_cone,
    surface_measure,
    wulff_shape,
)
from coconvex.coconvex import covolume_at
from coconvex.errors import EmptyOmega, NonPositiveF, NotUnit, ZeroP

from conftest import SQRT2, U_STAR, instance


def test_quadrant_set(quad_set):
    A = quad_set
    assert A.covolume == pytest.approx(2.0, abs=1e-12)
    assert A.support == pytest.approx([SQRT2], abs=1e-14)
    assert bool(A.attained.all()) and bool(A.active.all())


def test_quadrant_measures(quad_set):
    assert surface_measure(quad_set).weights == pytest.approx([2 * SQRT2], abs=1e-12)
    assert lp_surface_measure(quad_set, 0.5).weights == pytest.approx([2**1.75], abs=1e-12)
    assert np.array_equal(lp_surface_measure(quad_set, 1.0).weights, surface_measure(quad_set).weights)
    m = cone_volume_measure(quad_set)
    assert m.weight_at(U_STAR) == pytest.approx(2.0, abs=1e-12)
    assert m.total == pytest.approx(quad_set.covolume, rel=1e-13)


def test_quadrant_dilation(quad_set):
    for a in (0.5, 3.0):
        B = quad_set.dilate(a)
        assert B.covolume == pytest.approx(2 * a**2, rel=1e-12)
        assert cone_volume_measure(B).total == pytest.approx(a**2 * 2.0, rel=1e-12)


def test_inactive_direction(quadrant):
    """A deep cut at (-0.8,-0.6) hides the diagonal halfspace."""
    U = [U_STAR, [-0.8, -0.6]]
    A = wulff_shape(quadrant, U, [SQRT2, 10.0])
    assert list(A.attained) == [False, True]
    assert list(A.active) == [False, True]
    # A• has vertices (12.5, 0) and (0, 50/3); the nearer one is attained
    assert A.support[0] == pytest.approx(12.5 / SQRT2, rel=1e-12)
    assert A.support[1] == pytest.approx(10.0, rel=1e-14)
    assert A.body.support_value(U_STAR) == pytest.approx(-A.support[0], rel=1e-12)
    assert not is_c_determined(quadrant, U, [SQRT2, 10.0])
    assert is_c_determined(quadrant, [U_STAR], [SQRT2])
    assert surface_measure(A).weights[0] == 0.0


def test_two_direction_monte_carlo(quadrant):
    """Facet lengths against uniform samples along each supporting line."""
    U = np.array([U_STAR, [-0.6, -0.8]])
    A = wulff_shape(quadrant, U, [1.0, 1.0])
    rng = np.random.default_rng(0)
    for i, u in enumerate(U):
        foot = -A.support[i] * u
        tang = np.array([-u[1], u[0]])
        L = 10.0
        t = rng.uniform(-L, L, 10**6)
        X = foot + t[:, None] * tang
        ok = np.all(X >= 0, axis=1) & np.all(X @ U.T <= -A.support + 1e-12, axis=1)
        est = 2 * L * ok.mean()
        assert est == pytest.approx(A.facet_measures[i], rel=0.01)


def test_errors(quadrant):
    with pytest.raises(EmptyOmega):
        wulff_shape(quadrant, np.zeros((0, 2)), [])
    with pytest.raises(NonPositiveF):
        wulff_shape(quadrant, [U_STAR], [0.0])
    with pytest.raises(NonPositiveF):
        wulff_shape(quadrant, [U_STAR], [1.0, 2.0])
    with pytest.raises(NotUnit):
        wulff_shape(quadrant, [[0.0, -1.0]], [1.0])
    with pytest.raises(NotUnit):
        DirectionSet.of(quadrant, [U_STAR, U_STAR])
    with pytest.raises(ZeroP):
        lp_surface_measure(wulff_shape(quadrant, [U_STAR], [1.0]), 0)


def test_octant_closed_form():
    c = make_cone(np.eye(3))
    u = -np.ones(3) / np.sqrt(3)
    A = wulff_shape(c, [u], [1.0])
    # simplex x+y+z < √3: volume √3³/6, face area (√3·√2)²·√3/4
    assert A.covolume == pytest.approx(np.sqrt(3) / 2, rel=1e-12)
    assert A.facet_measures[0] == pytest.approx(1.5 * np.sqrt(3), rel=1e-12)


def test_h_homogeneous_and_concave():
    _, _, A, _ = instance(5)
    rng = np.random.default_rng(1)
    Q = A.cone.facet_normals
    x = rng.dirichlet(np.ones(len(Q)), 200) @ Q
    y = rng.dirichlet(np.ones(len(Q)), 200) @ Q
    hx, hy = A.h(x), A.h(y)
    assert np.all(A.h((x + y) / 2) >= (hx + hy) / 2 - 1e-12)
    assert np.allclose(A.h(3.0 * x), 3.0 * hx, rtol=1e-13)
    assert np.all(hx > 0)


seeds = st.integers(0, 10**5)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.integers(2, 3))
def test_volume_identity(seed, n):
    _, _, A, _ = instance(seed, n, 3 + n)
    assert abs(A.covolume - A.support @ A.facet_measures / n) <= 1e-9 * A.covolume


@settings(max_examples=25, deadline=None)
@given(seed=seeds, n=st.integers(2, 3))
def test_truncation_independent(seed, n):
    _, _, A, _ = instance(seed, n, 4)
    assert covolume_at(A, 2 * A.t_star) == pytest.approx(A.covolume, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, n=st.integers(2, 3), bump=st.floats(0.0, 0.5))
def test_monotone(seed, n, bump):
    _, omega, A, _ = instance(seed, n, 4)
    rng = np.random.default_rng(seed)
    B = wulff_shape(A.cone, omega, A.support * (1 + bump * rng.random(len(omega))))
    # B• ⊆ A•, i.e. A ⊆ B
    assert np.all(B.support >= A.support - 1e-12)
    assert B.covolume >= A.covolume * (1 - 1e-12)


@pytest.mark.parametrize("seed, n", [(3, 2), (4, 3)])
def test_weak_convergence(seed, n):
    _, omega, A, _ = instance(seed, n, 4)
    rng = np.random.default_rng(seed)
    delta = rng.uniform(-1, 1, len(omega))
    errs = []
    for k in range(1, 6):
        Ak = wulff_shape(A.cone, omega, A.support * (1 + 0.1 * 2.0**-k * delta))
        # test functions f = 1 and f = h̄(A,·)
        e1 = abs(np.sum(Ak.facet_measures) - np.sum(A.facet_measures))
        e2 = abs(Ak.facet_measures @ A.support - A.facet_measures @ A.support)
        errs.append(max(e1, e2))
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < errs[0] / 8


def test_record_fields(quad_set):
    rec = quad_set.to_record()
    assert set(rec) == {"cone", "omega", "support"}
    assert rec["cone"]["n"] == 2
