"""Batch verification of the L_p Brunn-Minkowski family on generated instances.

Every check returns a :class:`CheckReport` oriented so that ``slack >= 0``
means the inequality holds.  Equality flags are cross-checked against
dilation detection on the support vectors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    PSum,
    log_co_sum,
    log_mixed_volume,
    lp_mixed_volume,
    mixed_volume_1,
    p_co_sum,
)
from .cone import Cone, make_cone, omega_grid
from .coconvex import (
    CCoconvexSet,
    DirectionSet,
    cone_volume_measure,
    lp_surface_measure,
    wulff_shape,
)
from .errors import GenerationFailure
from .report import EQUALITY_TOL, VIOLATION_TOL, CheckReport

MAX_ROUNDS = 1000
MAX_LEVEL = 2
DILATION_TOL = 1e-8


@dataclass(frozen=True)
class InstanceGenerator:
    """Seeded source of instance pairs on a shared cone and direction set."""

    n: int = 2
    cone_generators: int | None = None
    omega_size: int = 3
    support_range: tuple = (0.5, 2.0)
    seed: int = 0
    margin: float = 0.05
    separation: float = 0.05
    min_spread: float = 0.05


def _random_cone(rng, n, k):
    if n == 2:
        phi = rng.uniform(0.0, 2.0 * np.pi)
        beta = rng.uniform(0.3, 1.2)
        return make_cone([[np.cos(phi - beta), np.sin(phi - beta)], [np.cos(phi + beta), np.sin(phi + beta)]])
    k = k or n
    axis = rng.normal(size=n)
    axis /= np.linalg.norm(axis)
    _, _, vt = np.linalg.svd(axis[None, :])
    B = vt[1:]
    beta = rng.uniform(0.4, 0.9)
    if n == 3:
        ang = 2.0 * np.pi * (np.arange(k) + rng.uniform(-0.25, 0.25, k)) / k + rng.uniform(0, 2 * np.pi)
        W = np.column_stack([np.cos(ang), np.sin(ang)]) @ B
    else:
        W = rng.normal(size=(k, n - 1))
        W /= np.linalg.norm(W, axis=1)[:, None]
        W = W @ B
    G = np.cos(beta) * axis + np.sin(beta) * W
    return make_cone(G)


def _random_directions(rng, cone: Cone, m, margin, separation, rounds):
    """Rejection-sample ``m`` directions; returns ``(U or None, rounds used)``."""
    Q = cone.facet_normals
    out = []
    for k in range(1, rounds + 1):
        lam = rng.dirichlet(np.ones(len(Q)))
        u = lam @ Q
        u /= np.linalg.norm(u)
        if np.max(cone.generators @ u) >= -margin:
            continue
        if any(np.linalg.norm(u - v) < separation for v in out):
            continue
        out.append(u)
        if len(out) == m:
            return np.array(out), k
    return None, rounds


def random_instance(g: InstanceGenerator):
    """Return ``(cone, omega, A1, A2)`` with every ω-direction carrying a facet.

    All rejection steps draw on one budget of ``MAX_ROUNDS`` rounds.
    """
    rng = np.random.default_rng(g.seed)
    lo, hi = g.support_range
    budget = MAX_ROUNDS
    while budget > 0:
        cone = _random_cone(rng, g.n, g.cone_generators)
        U, used = _random_directions(rng, cone, g.omega_size, g.margin, g.separation, budget)
        budget -= max(used, 1)
        if U is None:
            continue
        omega = DirectionSet.of(cone, U)
        A1 = _all_active(rng, cone, omega, lo, hi)
        A2 = _all_active(rng, cone, omega, lo, hi) if A1 is not None else None
        if A2 is not None and _spread(A1, A2) >= g.min_spread:
            return cone, omega, A1, A2
    raise GenerationFailure(f"no admissible instance after {MAX_ROUNDS} rejection rounds (seed {g.seed})")


def _spread(A1, A2) -> float:
    # near-proportional pairs sit within the equality tolerance of every check
    r = A2.support / A1.support
    return float((r.max() - r.min()) / r.max())


def _all_active(rng, cone, omega, lo, hi, repairs=20):
    """Uniform support values, redrawing those of facet-less directions.

    A redrawn value is taken above the attained support value, so that its
    halfspace cuts; values always stay in ``[lo, hi]``.
    """
    s = rng.uniform(lo, hi, len(omega))
    for _ in range(repairs):
        A = wulff_shape(cone, omega, s)
        dead = ~A.active
        if not dead.any():
            return A
        bottom = A.support[dead]
        if np.any(bottom >= hi):
            return None
        s = A.requested.copy()
        s[dead] = rng.uniform(bottom, hi)
    return None


def fingerprint(A1, A2=None, **extra) -> dict:
    fp = {"cone": A1.cone.generators.tolist(), "omega": A1.omega.vectors.tolist(), "s1": A1.support.tolist()}
    if A2 is not None:
        fp["omega2"] = A2.omega.vectors.tolist()
        fp["s2"] = A2.support.tolist()
    fp.update(extra)
    return fp


def is_dilation(A1, A2, tol: float = DILATION_TOL) -> bool:
    """True iff ``A1 = αA2``, judged on support values over ω₁ ∪ ω₂."""
    U = A1.omega.union(A2.omega).vectors
    r = A1.h(U) / A2.h(U)
    return bool(np.max(r) - np.min(r) <= tol * np.max(r))


def _finish(rep: CheckReport, A1, A2) -> CheckReport:
    dil = is_dilation(A1, A2)
    rep.details["dilation"] = dil
    rep.details["equality_matches_dilation"] = rep.equality == dil
    return rep


def _combined_check(name, make, left_of, right, fp, A1, A2):
    """Check ``left(V) <= right`` for a combination with a co-volume bracket."""
    level = 0
    while True:
        S = make(level)
        lo_v, hi_v = S.covolume_bounds
        left_hi, left_lo = left_of(hi_v), left_of(lo_v)
        scale = max(1.0, abs(right))
        s_lo, s_hi = right - left_hi, right - left_lo
        decided = s_lo >= -VIOLATION_TOL * scale and (s_lo > EQUALITY_TOL * scale or S.exact)
        if S.exact or decided or level >= MAX_LEVEL:
            break
        level += 1
    rep = CheckReport.from_sides(
        name,
        left_hi,
        right,
        fp,
        {"covolume_bounds": [lo_v, hi_v], "exact": S.exact, "level": level},
        slack_bounds=(s_lo, s_hi),
    )
    return _finish(rep, A1, A2)


def check_lp_bm(A1: CCoconvexSet, A2: CCoconvexSet, p: float) -> CheckReport:
    """``V(A₁ ⊕ₚ A₂)^{p/n} <= V(A₁)^{p/n} + V(A₂)^{p/n}`` for 0 < p <= 1."""
    n = A1.n
    right = A1.covolume ** (p / n) + A2.covolume ** (p / n)
    return _combined_check(
        f"lp-brunn-minkowski[p={p}]",
        lambda lev: p_co_sum(1.0, A1, 1.0, A2, p, level=lev),
        lambda v: v ** (p / n),
        right,
        fingerprint(A1, A2, p=p),
        A1,
        A2,
    )


def check_log_bm(A1: CCoconvexSet, A2: CCoconvexSet, tau: float) -> CheckReport:
    """``V((1-τ)⋄A₁ ⊕₀ τ⋄A₂) <= V(A₁)^{1-τ} V(A₂)^τ``."""
    right = A1.covolume ** (1.0 - tau) * A2.covolume**tau
    return _combined_check(
        f"log-brunn-minkowski[tau={tau}]",
        lambda lev: log_co_sum(tau, A1, A2, level=lev),
        lambda v: v,
        right,
        fingerprint(A1, A2, tau=tau),
        A1,
        A2,
    )


def check_lp_minkowski_ineq(A: CCoconvexSet, B: CCoconvexSet, p: float) -> CheckReport:
    """``V̄ₚ(A, B)^n <= V(A)^{n-p} V(B)^p``."""
    n = A.n
    left = lp_mixed_volume(A, B, p) ** n
    right = A.covolume ** (n - p) * B.covolume**p
    rep = CheckReport.from_sides(f"lp-minkowski[p={p}]", left, right, fingerprint(A, B, p=p))
    return _finish(rep, A, B)


def check_minkowski(A0: CCoconvexSet, A1: CCoconvexSet) -> CheckReport:
    """``V̄₁(A₀, A₁)^n <= V(A₀)^{n-1} V(A₁)``."""
    n = A0.n
    left = mixed_volume_1(A0, A1) ** n
    right = A0.covolume ** (n - 1) * A1.covolume
    rep = CheckReport.from_sides("minkowski", left, right, fingerprint(A0, A1))
    return _finish(rep, A0, A1)


def check_log_minkowski(A1: CCoconvexSet, A2: CCoconvexSet) -> CheckReport:
    """``V̄₀(A₁, A₂)/V(A₁) <= (1/n) log(V(A₂)/V(A₁))``."""
    left = log_mixed_volume(A1, A2) / A1.covolume
    right = np.log(A2.covolume / A1.covolume) / A1.n
    rep = CheckReport.from_sides("log-minkowski", left, right, fingerprint(A1, A2))
    return _finish(rep, A1, A2)


def wulff_combination(A1: CCoconvexSet, A2: CCoconvexSet, p: float) -> CCoconvexSet:
    """Ā: the Wulff shape of ``(h̄₁^p + h̄₂^p)^{1/p}`` on ω₁ ∪ ω₂."""
    U = A1.omega.union(A2.omega)
    vals = (A1.h(U.vectors) ** p + A2.h(U.vectors) ** p) ** (1.0 / p)
    return wulff_shape(A1.cone, U, vals)


def _probe_directions(cone, rng, count):
    dirs = omega_grid(cone, count)
    w = -cone.generators.sum(axis=0)
    w /= np.linalg.norm(w)
    dirs = dirs + 1e-6 * w
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    lam = rng.dirichlet(np.ones(len(cone.facet_normals)), size=count)
    extra = lam @ cone.facet_normals
    extra /= np.linalg.norm(extra, axis=1)[:, None]
    return np.vstack([dirs, extra])


def inclusion_gap(A1, A2, p, probes=None, seed=0):
    """Largest ``h̄(A₁⊕ₚA₂, u) - h̄(Ā, u)`` over probe directions.

    Returns ``(gap, u, h_bar, h_sum, min_gap)``; ``min_gap < 0`` beyond
    rounding would contradict ``Ā ⊆ A₁ ⊕ₚ A₂``.
    """
    Abar = wulff_combination(A1, A2, p)
    comb = PSum(1.0, 1.0, p)
    if probes is None:
        probes = _probe_directions(A1.cone, np.random.default_rng(seed), 400)
    hb = Abar.h(probes)
    hs = comb.value(A1.h(probes), A2.h(probes))
    gap = hs - hb
    i = int(np.argmax(gap))
    return float(gap[i]), probes[i], float(hb[i]), float(hs[i]), float(np.min(gap))


def check_wulff_equivalence(A1: CCoconvexSet, A2: CCoconvexSet, p: float) -> CheckReport:
    """``V(Ā)^{p/n} <= V(A₁)^{p/n} + V(A₂)^{p/n}``, plus inclusion and decomposition."""
    n = A1.n
    Abar = wulff_combination(A1, A2, p)
    left = Abar.covolume ** (p / n)
    right = A1.covolume ** (p / n) + A2.covolume ** (p / n)
    whole = lp_mixed_volume(Abar, Abar, p)
    parts = lp_mixed_volume(Abar, A1, p) + lp_mixed_volume(Abar, A2, p)
    decomp = abs(whole - parts) / abs(whole)
    gap, u, hb, hs, min_gap = inclusion_gap(A1, A2, p)
    scale = max(1.0, abs(hs))
    details = {
        "decomposition_residual": decomp,
        "inclusion_holds": min_gap >= -1e-9 * scale,
        "strict_inclusion": gap > 1e-4,
        "probe": {"u": u.tolist(), "h_wulff": hb, "h_sum": hs, "gap": gap},
    }
    rep = CheckReport.from_sides(f"wulff-lp-brunn-minkowski[p={p}]", left, right, fingerprint(A1, A2, p=p), details)
    if decomp > 1e-9 or not details["inclusion_holds"]:
        rep.passed = False
    return _finish(rep, A1, A2)


def _measure(A, p):
    return cone_volume_measure(A) if p == "log" else lp_surface_measure(A, p)


def check_uniqueness(A1: CCoconvexSet, A2: CCoconvexSet, p, probes=20, seed=0) -> CheckReport:
    """Equal L_p (or cone-volume) measures force equal sets.

    Also evaluates the three conditional determinations: with
    ``V(A₁) >= V(A₂)``, each of ``V(A₁) <= V̄ₚ(A₁,A₂)``,
    ``V(A₁) <= V̄ₚ(A₂,A₁)`` and ``V̄ₚ(A,A₁) = V̄ₚ(A,A₂)`` for a probe family
    of sets A implies ``A₁ = A₂``.  Premises that fail make the implication
    vacuous and are recorded as indeterminate.
    """
    U = A1.omega.union(A2.omega).vectors
    m1, m2 = _measure(A1, p), _measure(A2, p)
    w1 = np.array([m1.weight_at(u) for u in U])
    w2 = np.array([m2.weight_at(u) for u in U])
    h1, h2 = A1.h(U), A2.h(U)
    same_set = bool(np.max(np.abs(h1 - h2) / h2) <= 1e-6)
    same_measure = bool(np.max(np.abs(w1 - w2)) <= 1e-9 * max(1.0, np.max(np.abs(w2))))
    details = {"same_measure": same_measure, "same_set": same_set}
    ok = (not same_measure) or same_set
    if p != "log" and 0 < p < 1:
        B1, B2 = (A1, A2) if A1.covolume >= A2.covolume else (A2, A1)
        V1 = B1.covolume
        tol = 1e-9 * V1
        prem = [V1 <= lp_mixed_volume(B1, B2, p) + tol, V1 <= lp_mixed_volume(B2, B1, p) + tol]
        rng = np.random.default_rng(seed)
        probe_vals = []
        for _ in range(probes):
            A = wulff_shape(A1.cone, U, rng.uniform(0.5, 2.0, len(U)))
            a, b = lp_mixed_volume(A, A1, p), lp_mixed_volume(A, A2, p)
            probe_vals.append(abs(a - b) <= 1e-9 * max(abs(a), abs(b)))
        prem.append(all(probe_vals))
        for i, pr in enumerate(prem, 1):
            key = f"determination_{i}"
            if pr:
                details[key] = "holds" if same_set else "violated"
                ok = ok and same_set
            else:
                details[key] = "indeterminate"
    left = float(np.max(np.abs(h1 - h2) / h2)) if same_measure else 0.0
    rep = CheckReport.from_sides(f"uniqueness[p={p}]", left, 1e-6, fingerprint(A1, A2, p=p), details, violation_tol=0.0)
    rep.passed = bool(ok)
    return rep


# batch drivers

FAMILIES = ("lp_bm", "lp_minkowski", "wulff", "log_bm", "log_minkowski", "minkowski")
P_VALUES = (0.25, 0.5, 0.75)
TAU_VALUES = (0.25, 0.5, 0.75)


def check_pair(A1, A2, families=FAMILIES, ps=P_VALUES, taus=TAU_VALUES):
    """Run every inequality family on one pair."""
    out = []
    for fam in families:
        if fam == "lp_bm":
            out += [check_lp_bm(A1, A2, p) for p in ps]
        elif fam == "lp_minkowski":
            out += [check_lp_minkowski_ineq(A1, A2, p) for p in ps]
        elif fam == "wulff":
            out += [check_wulff_equivalence(A1, A2, p) for p in ps]
        elif fam == "log_bm":
            out += [check_log_bm(A1, A2, t) for t in taus]
        elif fam == "log_minkowski":
            out.append(check_log_minkowski(A1, A2))
        elif fam == "minkowski":
            out.append(check_minkowski(A1, A2))
        else:
            raise ValueError(f"unknown family {fam!r}")
    return out


def sweep(seeds, n=2, omega_size=3, families=FAMILIES, dilation=None, **kw):
    """Inequality reports over seeded pairs; ``dilation=α`` replaces A₂ by αA₁."""
    reports = []
    for seed in seeds:
        _, _, A1, A2 = random_instance(InstanceGenerator(n=n, omega_size=omega_size, seed=seed))
        if dilation is not None:
            A2 = A1.dilate(dilation)
        for r in check_pair(A1, A2, families, **kw):
            r.fingerprint["seed"] = seed
            reports.append(r)
    return reports


def find_strict_inclusion(seeds, p=0.5, threshold=1e-4, omega_size=2):
    """Search planar instances for ``Ā ⊊ A₁ ⊕ₚ A₂`` with a probe gap above ``threshold``."""
    for seed in seeds:
        _, _, A1, A2 = random_instance(InstanceGenerator(n=2, omega_size=omega_size, seed=seed))
        gap, u, hb, hs, _ = inclusion_gap(A1, A2, p, seed=seed)
        if gap > threshold:
            return {
                "seed": seed,
                "p": p,
                "cone": A1.cone.generators.tolist(),
                "omega": A1.omega.vectors.tolist(),
                "s1": A1.support.tolist(),
                "s2": A2.support.tolist(),
                "probe": u.tolist(),
                "h_wulff": hb,
                "h_sum": hs,
                "gap": gap,
            }
    return None
