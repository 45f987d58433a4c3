"""Discrete L_p and log Minkowski problems for C-coconvex sets.

Both problems are solved as smooth unconstrained maximizations in the
log-support variables ``x = log s``:

* L_p (p != 0): ``F(x) = (1/p) log Σ μᵢ sᵢ^p - (1/n) log V(s)``; this is
  ``(1/p) log 𝓛`` so maximizing F maximizes 𝓛 for p > 0 and minimizes it
  for p < 0;
* log: ``F(x) = Σ wᵢ xᵢ - (1/n) log V(s)`` with ``w = μ / |μ|``.

``∂V/∂sᵢ`` is the facet measure σᵢ, so gradients are exact.  Iterates are
snapped to the attained support values of their Wulff shape and normalized
to unit co-volume.  The search direction is BFGS with Armijo backtracking.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cone import Cone
from .coconvex import (
    CCoconvexSet,
    DirectionSet,
    DiscreteMeasure,
    cone_volume_measure,
    lp_surface_measure,
    wulff_shape,
)
from .errors import EmptyMeasure, NotConverged, PEqualsN, ZeroP, ZeroVolume
from .report import CheckReport

LOG = "log"


@dataclass
class SolverOptions:
    max_iterations: int = 10000
    gradient_tolerance: float = 1e-8
    objective_tolerance: float = 1e-12
    initial: np.ndarray | None = None
    shrink: float = 0.5
    sufficient_decrease: float = 1e-4
    max_backtracks: int = 60

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        for name in ("gradient_tolerance", "objective_tolerance", "shrink", "sufficient_decrease"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class SolveResult:
    """Solver output.

    For the L_p problem with ``normalized=True`` (always at p = n) the
    solution has unit co-volume and ``μ = c·S̄ₚ(solution)``; otherwise it
    solves ``S̄ₚ(solution) = μ`` and ``c`` is the normalization constant of
    the unit-volume optimizer it was scaled from.
    """

    solution: CCoconvexSet
    c: float
    p: object
    normalized: bool
    residual: float
    iterations: int
    converged: bool
    trace: list = field(default_factory=list)

    def to_record(self) -> dict:
        rec = self.solution.to_record()
        rec.update(
            {
                "c": float(self.c),
                "residual": float(self.residual),
                "iterations": int(self.iterations),
                "converged": bool(self.converged),
            }
        )
        return rec


def _measure_support(cone: Cone, mu: DiscreteMeasure):
    if mu.directions.size == 0 or mu.total <= 0:
        raise EmptyMeasure("measure has no mass")
    keep = mu.weights > 0
    omega = DirectionSet.of(cone, mu.directions[keep])
    return omega, np.asarray(mu.weights[keep], dtype=float)


def objective(cone: Cone, omega, s, mu, p: float) -> float:
    """``𝓛(s) = V(s)^{-p/n} Σ μ f^p`` at the attained support vector."""
    if p == 0:
        raise ZeroP("p must be nonzero")
    A = wulff_shape(cone, omega, s)
    if not A.covolume > 0:
        raise ZeroVolume("Wulff shape has zero co-volume")
    w = mu.weights if isinstance(mu, DiscreteMeasure) else np.asarray(mu, dtype=float)
    return float(A.covolume ** (-p / A.n) * np.sum(w * A.support**p))


class _Problem:
    """Objective, gradient and relative residual in log-support variables."""

    def __init__(self, cone, omega, w, p):
        self.cone, self.omega, self.w, self.p = cone, omega, w, p
        self.n = cone.n
        self.wn = w / w.sum()

    def evaluate(self, x):
        A = wulff_shape(self.cone, self.omega, np.exp(x))
        s, sig, V = A.support, A.facet_measures, A.covolume
        x = np.log(s)
        dV = s * sig / (self.n * V)
        if self.p == LOG:
            F = float(self.wn @ x) - np.log(V) / self.n
            target = self.wn
        else:
            terms = self.w * s**self.p
            Phi = terms.sum()
            F = np.log(Phi) / self.p - np.log(V) / self.n
            target = terms / Phi
        g = target - dV
        return A, x, F, g, float(np.max(np.abs(g) / target))


def _maximize(prob: _Problem, x0, opts: SolverOptions):
    A, x, F, g, res = prob.evaluate(x0)
    shift = np.log(A.covolume) / prob.n
    A, x, F, g, res = prob.evaluate(x - shift)
    m = len(x)
    H = np.eye(m)
    trace = [F]
    best = (res, A, x)
    it = 0
    for it in range(1, opts.max_iterations + 1):
        if res <= opts.gradient_tolerance:
            it -= 1
            break
        d = H @ g
        slope = float(g @ d)
        if slope <= 0:
            H = np.eye(m)
            d, slope = g.copy(), float(g @ g)
        step = 1.0
        # keep the first trial step moderate in log space
        dmax = float(np.max(np.abs(d)))
        if dmax > 1.0:
            step = 1.0 / dmax
        accepted = None
        for _ in range(opts.max_backtracks):
            trial = prob.evaluate(x + step * d)
            if trial[2] >= F + opts.sufficient_decrease * step * slope:
                accepted = trial
                break
            # near the optimum F differences drown in rounding noise
            if trial[2] >= F - 1e-14 * max(1.0, abs(F)) and trial[4] < res:
                accepted = trial
                break
            step *= opts.shrink
        if accepted is None:
            break
        A1, x1, F1, g1, res1 = accepted
        shift = np.log(A1.covolume) / prob.n
        if abs(shift) > 1e-12:
            A1, x1, F1, g1, res1 = prob.evaluate(x1 - shift)
        sx, sg = x1 - x, g1 - g
        # BFGS update of the inverse Hessian of -F
        ys = -float(sg @ sx)
        if ys > 1e-14 * np.linalg.norm(sx) * np.linalg.norm(sg):
            rho = 1.0 / ys
            Vm = np.eye(m) + rho * np.outer(sx, sg)
            H = Vm @ H @ Vm.T + rho * np.outer(sx, sx)
        small_change = abs(F1 - F) <= opts.objective_tolerance * max(1.0, abs(F))
        A, x, F, g, res = A1, x1, F1, g1, res1
        trace.append(F)
        if res < best[0]:
            best = (res, A, x)
        if small_change and res > opts.gradient_tolerance and np.linalg.norm(sx) < 1e-15:
            break
    res, A, x = best
    return A, res, it, res <= opts.gradient_tolerance, trace


def solve_lp_minkowski(
    cone: Cone,
    mu: DiscreteMeasure,
    p: float,
    opts: SolverOptions | None = None,
    normalized: bool = False,
    strict: bool = False,
) -> SolveResult:
    """Find A with ``S̄ₚ(A, ·) = μ`` (or the normalized pair at p = n)."""
    if p == 0:
        raise ZeroP("use solve_log_minkowski for p = 0")
    opts = opts or SolverOptions()
    omega, w = _measure_support(cone, mu)
    n = cone.n
    if p == n and not normalized:
        raise PEqualsN("at p = n only the normalized pair (A0, c) exists")
    x0 = np.zeros(len(w)) if opts.initial is None else np.log(np.asarray(opts.initial, dtype=float))
    prob = _Problem(cone, omega, w, float(p))
    A0, res, it, ok, trace = _maximize(prob, x0, opts)
    Phi = float(np.sum(w * A0.support**p))
    c = Phi / (n * A0.covolume)
    sol = A0 if normalized else A0.dilate(c ** (1.0 / (n - p)))
    # objective trace reported as 𝓛 = exp(p F)
    out = SolveResult(sol, c, float(p), normalized, res, it, ok, [float(np.exp(p * F)) for F in trace])
    out.residual = _lp_residual(out, w, p)
    out.converged = ok
    if strict and not ok:
        err = NotConverged(f"no convergence after {it} iterations (residual {res:.3e})")
        err.result = out
        raise err
    return out


def solve_log_minkowski(
    cone: Cone, mu: DiscreteMeasure, opts: SolverOptions | None = None, strict: bool = False
) -> SolveResult:
    """Find A whose cone-volume measure is μ."""
    opts = opts or SolverOptions()
    omega, w = _measure_support(cone, mu)
    n = cone.n
    x0 = np.zeros(len(w)) if opts.initial is None else np.log(np.asarray(opts.initial, dtype=float))
    prob = _Problem(cone, omega, w, LOG)
    A0, res, it, ok, trace = _maximize(prob, x0, opts)
    sol = A0.dilate((w.sum() / A0.covolume) ** (1.0 / n))
    out = SolveResult(sol, 1.0, LOG, False, res, it, ok, trace)
    out.residual = _log_residual(sol, w)
    if strict and not ok:
        err = NotConverged(f"no convergence after {it} iterations (residual {res:.3e})")
        err.result = out
        raise err
    return out


def _lp_residual(r: SolveResult, w, p) -> float:
    got = lp_surface_measure(r.solution, p).weights
    if r.normalized:
        got = r.c * got
    return float(np.max(np.abs(got - w) / w))


def _log_residual(A: CCoconvexSet, w) -> float:
    got = cone_volume_measure(A).weights
    return float(np.max(np.abs(got - w) / w))


def verify_solution(r: SolveResult, mu: DiscreteMeasure, p=None, tol: float = 1e-6) -> CheckReport:
    """Audit a solution by rebuilding its geometry from the support vector.

    Reports the largest relative atom mismatch (``left``) against ``tol``;
    the total-mass mismatch and the C-determination status are in
    ``details``.
    """
    p = r.p if p is None else p
    sol = r.solution
    A = wulff_shape(sol.cone, sol.omega, sol.support)
    keep = mu.weights > 0
    dirs, w = mu.directions[keep], mu.weights[keep]
    if p == LOG:
        got = cone_volume_measure(A)
    else:
        got = lp_surface_measure(A, p)
        if r.normalized:
            got = got.scaled(r.c)
    vals = np.array([got.weight_at(u) for u in dirs])
    rel = float(np.max(np.abs(vals - w) / w))
    total = abs(got.total - w.sum()) / w.sum()
    determined = bool(np.all(A.attained))
    rep = CheckReport.from_sides(
        "solution-audit",
        rel,
        tol,
        fingerprint={"p": p, "support": A.support.tolist()},
        details={"total_mismatch": total, "c_determined": determined, "converged": r.converged},
        violation_tol=0.0,
        equality_tol=0.0,
    )
    if not determined:
        rep.passed = False
    return rep
