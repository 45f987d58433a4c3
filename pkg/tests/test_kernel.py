import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coconvex import _kernel
from coconvex.polytope import intersect_halfspaces

from test_polytope import random_tangent_polytope

needs_ext = pytest.mark.skipif(_kernel.clip_compiled is None, reason="compiled extension not built")


def test_backend_name():
    assert _kernel.BACKEND in ("compiled", "python")
    if _kernel.clip_compiled is not None and os.environ.get("COCONVEX_PURE_PYTHON") is None:
        assert _kernel.BACKEND == "compiled"


def test_env_forces_python():
    env = dict(os.environ, COCONVEX_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from coconvex import _kernel; print(_kernel.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


def _clip_sequence(clip, hs, n):
    from benchmark_box import box

    V, I = box(n)
    col = 2 * n
    for a, b in hs:
        need = col // 64 + 1
        if I.shape[1] < need:
            I = np.ascontiguousarray(np.hstack([I, np.zeros((len(I), need - I.shape[1]), dtype=np.uint64)]))
        V, I, status = clip(V, I, np.ascontiguousarray(a, dtype=float), float(b), col, n, 1e-11 * 3.0)
        col += 1
    return V, I


@needs_ext
@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(2, 4), m=st.integers(1, 70))
def test_backends_agree(seed, n, m):
    rng = np.random.default_rng(seed)
    N = rng.normal(size=(m, n))
    N /= np.linalg.norm(N, axis=1)[:, None]
    hs = [(a, 1.0) for a in N]
    Vp, Ip = _clip_sequence(_kernel.clip_python, hs, n)
    Vc, Ic = _clip_sequence(_kernel.clip_compiled, hs, n)
    assert Vp.shape == Vc.shape
    op, oc = np.lexsort(Vp.T), np.lexsort(Vc.T)
    np.testing.assert_allclose(Vp[op], Vc[oc], atol=1e-12)
    np.testing.assert_array_equal(Ip[op], Ic[oc])


@pytest.mark.parametrize("seed, n", [(0, 2), (1, 3), (2, 4)])
def test_pure_python_polytope_matches(seed, n, monkeypatch):
    hs = random_tangent_polytope(seed, n, 15)
    P = intersect_halfspaces(hs)
    monkeypatch.setattr(_kernel, "clip", _kernel.clip_python)
    Q = intersect_halfspaces(hs)
    assert Q.volume == pytest.approx(P.volume, rel=1e-12)
    assert len(Q.vertices) == len(P.vertices)


def test_status_codes():
    # a cut missing the box is redundant; one excluding it leaves no interior
    from benchmark_box import box

    for clip in filter(None, (_kernel.clip_python, _kernel.clip_compiled)):
        V, I = box(2)
        _, _, st_ = clip(V, I, np.array([1.0, 0.0]), 5.0, 4, 2, 1e-11)
        assert st_ == _kernel.REDUNDANT
        _, _, st_ = clip(V, I, np.array([1.0, 0.0]), -5.0, 4, 2, 1e-11)
        assert st_ == _kernel.NO_INTERIOR
        V2, _, st_ = clip(V, I, np.array([1.0, 0.0]), 0.0, 4, 2, 1e-11)
        assert st_ == _kernel.OK and len(V2) == 4
