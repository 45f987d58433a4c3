import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coconvex import lp_surface_measure, solve_lp_minkowski
from coconvex.errors import GenerationFailure
from coconvex.lab import (
    InstanceGenerator,
    check_log_bm,
    check_log_minkowski,
    check_lp_bm,
    check_lp_minkowski_ineq,
    check_minkowski,
    check_pair,
    check_uniqueness,
    check_wulff_equivalence,
    find_strict_inclusion,
    is_dilation,
    random_instance,
)
from coconvex.report import CheckReport

from conftest import instance


def test_lp_bm_dilated_quadrant(quad_set):
    rep = check_lp_bm(quad_set.dilate(3.0), quad_set, 0.5)
    assert rep.passed and rep.equality
    assert rep.details["equality_matches_dilation"]


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_lp_bm_random_strict(seed):
    _, _, A1, A2 = instance(seed)
    rep = check_lp_bm(A1, A2, 0.5)
    assert rep.passed and not rep.equality and rep.slack > 0


def test_lp_minkowski_cases():
    _, _, A, B = instance(4)
    same = check_lp_minkowski_ineq(A, A, 0.5)
    assert same.equality and same.left == pytest.approx(A.covolume**2, rel=1e-12)
    assert check_lp_minkowski_ineq(B.dilate(2.0), B, 0.5).equality
    assert not check_lp_minkowski_ineq(A, B, 0.5).equality


def test_wulff_dilation():
    _, _, A1, _ = instance(5)
    rep = check_wulff_equivalence(A1.dilate(2.0), A1, 0.5)
    assert rep.passed and rep.equality
    # Ā = (1 + α^p)^{1/p} A₂
    assert rep.left == pytest.approx((1 + 2**0.5) * A1.covolume ** (0.5 / 2), rel=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_wulff_decomposition(seed):
    _, _, A1, A2 = instance(seed)
    rep = check_wulff_equivalence(A1, A2, 0.5)
    assert rep.details["decomposition_residual"] < 1e-9
    assert rep.details["inclusion_holds"]


def test_log_bm_cases():
    _, _, A1, A2 = instance(6)
    assert check_log_bm(A1.dilate(5.0), A1, 0.3).equality
    slacks = [check_log_bm(A1, A2, t).slack for t in np.linspace(0.1, 0.9, 9)]
    assert all(s > 0 for s in slacks)


def test_log_minkowski_cases():
    _, _, A1, A2 = instance(7)
    same = check_log_minkowski(A1, A1)
    assert same.left == 0.0 and same.right == 0.0 and same.equality
    e = check_log_minkowski(A1, A1.dilate(np.e))
    assert e.left == pytest.approx(1.0, rel=1e-12) and e.right == pytest.approx(1.0, rel=1e-12)
    assert e.equality
    r = check_log_minkowski(A1, A2)
    assert r.passed and not r.equality


def test_classical_minkowski():
    _, _, A1, A2 = instance(8)
    assert check_minkowski(A1, A2).passed
    assert check_minkowski(A1, A1.dilate(3.0)).equality


@pytest.mark.parametrize("seed, n", [(1, 2), (2, 3)])
def test_classical_bm_via_sum(seed, n):
    _, _, A1, A2 = instance(seed, n, 4)
    rep = check_lp_bm(A1, A2, 1.0)
    assert rep.passed and rep.details["exact"]


def test_uniqueness_identity():
    _, _, A, _ = instance(9)
    rep = check_uniqueness(A, A, 0.5)
    assert rep.passed and rep.details["same_set"]


def test_uniqueness_round_trip():
    _, _, A, _ = instance(10, 2, 4)
    r = solve_lp_minkowski(A.cone, lp_surface_measure(A, 0.5), 0.5)
    rep = check_uniqueness(A, r.solution, 0.5)
    assert rep.passed and rep.details["same_measure"] and rep.details["same_set"]


def test_check_pair_all_families():
    _, _, A1, A2 = instance(11)
    reps = check_pair(A1, A2)
    assert len(reps) == 3 + 3 + 3 + 3 + 1 + 1
    assert all(r.passed and not r.equality for r in reps)


def test_generator_deterministic():
    a = random_instance(InstanceGenerator(seed=42))
    b = random_instance(InstanceGenerator(seed=42))
    assert json.dumps(a[2].to_record()) == json.dumps(b[2].to_record())
    assert json.dumps(a[3].to_record()) == json.dumps(b[3].to_record())


def test_generator_3d_all_active():
    _, omega, A1, A2 = random_instance(InstanceGenerator(n=3, omega_size=5, seed=3))
    assert len(omega) == 5
    assert A1.active.all() and A2.active.all()
    assert A1.attained.all() and A2.attained.all()
    assert not is_dilation(A1, A2)


def test_generator_failure():
    with pytest.raises(GenerationFailure):
        random_instance(InstanceGenerator(omega_size=40, separation=0.5, seed=1))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_generated_invariants(seed):
    cone, omega, A1, A2 = instance(seed)
    for A in (A1, A2):
        assert A.active.all() and A.attained.all()
        assert np.all((A.support >= 0.5 - 1e-12) & (A.support <= 2.0 + 1e-12))
        assert np.all(omega.vectors @ cone.generators.T < -0.05)


def test_strict_inclusion_witness():
    w = find_strict_inclusion(range(1, 40))
    assert w is not None
    assert w["gap"] > 1e-4
    assert w["h_sum"] > w["h_wulff"]


@settings(max_examples=200)
@given(
    left=st.floats(-1e6, 1e6, allow_nan=False),
    right=st.floats(-1e6, 1e6, allow_nan=False),
)
def test_report_orientation(left, right):
    rep = CheckReport.from_sides("x", left, right)
    assert rep.passed == (right - left >= -1e-8 * max(1.0, abs(right)))
    if rep.equality:
        assert rep.passed
