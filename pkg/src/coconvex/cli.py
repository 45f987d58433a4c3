"""Command-line front end: ``coconvex gen|sum|measure|solve|verify|plot``."""
from __future__ import annotations

import argparse
import os
import sys

from . import io, lab
from .algebra import log_co_sum, p_co_sum
from .coconvex import cone_volume_measure, lp_surface_measure, surface_measure
from .errors import CoconvexError, ParseError, SchemaError, UnsupportedPlotDimension
from .solver import LOG, SolverOptions, solve_log_minkowski, solve_lp_minkowski, verify_solution
from .svg import render

EXIT_FAIL = 1
EXIT_INPUT = 2

SUITES = ("inequalities", "equality", "witness", "all")


def parse_p(text: str):
    """``"log"`` or a nonzero float."""
    if text.strip().lower() == LOG:
        return LOG
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a float or 'log', got {text!r}") from None


def parse_seeds(text: str) -> list[int]:
    """``"1..100"`` (inclusive), ``"3,5,8"`` or a single integer."""
    out = []
    try:
        for part in text.split(","):
            if ".." in part:
                a, b = part.split("..")
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty seed list")
    return out


def _env_seed(seed):
    env = os.environ.get("COCONVEX_SEED")
    if env is None:
        return seed
    try:
        return int(env)
    except ValueError:
        raise SchemaError(f"COCONVEX_SEED must be an integer, got {env!r}") from None


def _load_set(path):
    return io.set_from_record(io.read_json(path), str(path))


def _dump(args, A):
    if getattr(args, "dump_polytope", None):
        io.write_json(args.dump_polytope, {"n": A.n, "t_star": A.t_star, "polytope": A.body.to_record()})


def cmd_gen(args) -> int:
    seed = _env_seed(args.seed)
    g = lab.InstanceGenerator(n=args.n, omega_size=args.omega, seed=seed)
    cone, omega, A1, A2 = lab.random_instance(g)
    io.write_json(os.path.join(args.out_dir, "cone.json"), cone.to_record())
    io.write_json(os.path.join(args.out_dir, "a1.json"), A1.to_record())
    io.write_json(os.path.join(args.out_dir, "a2.json"), A2.to_record())
    print(f"seed {seed}: wrote cone.json, a1.json, a2.json to {args.out_dir}")
    return 0


def cmd_sum(args) -> int:
    A1, A2 = _load_set(args.a), _load_set(args.b)
    if args.tau is not None:
        S = log_co_sum(args.tau, A1, A2, level=args.level)
        head = {"kind": "log_co_sum", "tau": args.tau}
    else:
        S = p_co_sum(args.alpha1, A1, args.alpha2, A2, args.p, level=args.level)
        head = {"kind": "p_co_sum", "p": args.p, "alpha1": args.alpha1, "alpha2": args.alpha2}
    rec = dict(head)
    rec.update(
        {
            "cone": S.cone.to_record(),
            "omega": S.omega.vectors.tolist(),
            "support": S.support.tolist(),
            "covolume_bounds": list(S.covolume_bounds),
            "exact": S.exact,
            "lower": S.lower.to_record(),
        }
    )
    io.write_json(args.out, rec)
    lo, hi = S.covolume_bounds
    if S.exact:
        print(f"co-volume {hi!r} (exact); Wulff shape on the combined directions {lo!r}")
    else:
        print(f"co-volume in [{lo!r}, {hi!r}]")
    return 0


def cmd_measure(args) -> int:
    A = _load_set(args.set)
    if args.kind == "surface":
        m = surface_measure(A)
    elif args.kind == "cone-volume":
        m = cone_volume_measure(A)
    else:
        if args.p is None:
            raise SchemaError("--kind lp needs --p")
        m = lp_surface_measure(A, args.p)
    io.write_json(args.out, m.to_record())
    _dump(args, A)
    print(f"{args.kind} measure: total {m.total!r} over {len(m.weights)} atoms")
    return 0


def cmd_solve(args) -> int:
    cone = io.cone_from_record(io.read_json(args.cone), str(args.cone))
    mu = io.measure_from_record(io.read_json(args.measure), str(args.measure))
    opts = SolverOptions(max_iterations=args.max_iterations, gradient_tolerance=args.tol)
    if args.p == LOG:
        r = solve_log_minkowski(cone, mu, opts)
    else:
        r = solve_lp_minkowski(cone, mu, args.p, opts, normalized=args.normalized)
    io.write_json(args.out, r.to_record())
    audit = verify_solution(r, mu)
    print(
        f"{'converged' if r.converged else 'NOT converged'} after {r.iterations} iterations, "
        f"residual {r.residual:.3e}, c = {r.c!r}"
    )
    print(audit.line())
    return 0 if r.converged else EXIT_FAIL


def _verify_reports(suite, seeds, n, omega_size):
    reports, witness = [], None
    if suite in ("inequalities", "all"):
        reports += lab.sweep(seeds, n=n, omega_size=omega_size)
    if suite in ("equality", "all"):
        for alpha in (0.5, 3.0):
            for r in lab.sweep(seeds, n=n, omega_size=omega_size, dilation=alpha):
                r.name = f"{r.name}[dilated {alpha}]"
                # on a dilated pair the check must hold with equality
                r.passed = bool(r.passed and r.equality)
                reports.append(r)
    if suite in ("witness", "all"):
        witness = lab.find_strict_inclusion(seeds)
    return reports, witness


def cmd_verify(args) -> int:
    reports, witness = _verify_reports(args.suite, args.seeds, args.n, args.omega)
    ok = all(r.passed for r in reports)
    if args.suite in ("witness", "all") and witness is None:
        ok = False
    rec = {
        "suite": args.suite,
        "seeds": [args.seeds[0], args.seeds[-1]] if args.seeds else [],
        "n": args.n,
        "checks": len(reports),
        "failures": sum(not r.passed for r in reports),
        "all_passed": ok,
        "reports": [r.to_record() for r in reports],
    }
    if args.suite in ("witness", "all"):
        rec["strict_inclusion_witness"] = witness
    if args.out:
        io.write_json(args.out, rec)
    for r in reports:
        if not r.passed or args.verbose:
            print(r.line())
    if witness is not None:
        print(f"strict inclusion witness: seed {witness['seed']}, gap {witness['gap']:.3e}")
    print(f"{'PASS' if ok else 'FAIL'}: {rec['checks'] - rec['failures']}/{rec['checks']} checks passed")
    return 0 if ok else EXIT_FAIL


def cmd_plot(args) -> int:
    A = _load_set(args.set)
    _dump(args, A)
    io.write_text(args.out, render(A, title=os.path.basename(args.set)))
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coconvex", description="C-coconvex sets over polyhedral cones.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a seeded instance pair")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--omega", type=int, default=3, help="number of directions")
    g.add_argument("--out-dir", default=".")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("sum", help="p-co-sum or log-co-sum of two sets")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    which = s.add_mutually_exclusive_group(required=True)
    which.add_argument("--p", type=float)
    which.add_argument("--tau", type=float)
    s.add_argument("--alpha1", type=float, default=1.0)
    s.add_argument("--alpha2", type=float, default=1.0)
    s.add_argument("--level", type=int, default=2, help="grid level of the co-volume bracket (n >= 3)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sum)

    m = sub.add_parser("measure", help="surface, L_p surface or cone-volume measure")
    m.add_argument("--set", required=True)
    m.add_argument("--kind", choices=("surface", "lp", "cone-volume"), default="surface")
    m.add_argument("--p", type=float)
    m.add_argument("--out", required=True)
    m.add_argument("--dump-polytope", metavar="PATH", help="also write the truncated body as JSON")
    m.set_defaults(func=cmd_measure)

    v = sub.add_parser("solve", help="discrete L_p or log Minkowski problem")
    v.add_argument("--cone", required=True)
    v.add_argument("--measure", required=True)
    v.add_argument("--p", type=parse_p, required=True, help="float or 'log'")
    v.add_argument("--normalized", action="store_true")
    v.add_argument("--tol", type=float, default=1e-8)
    v.add_argument("--max-iterations", type=int, default=10000)
    v.add_argument("--out", required=True)
    v.set_defaults(func=cmd_solve)

    c = sub.add_parser("verify", help="batch inequality verification")
    c.add_argument("--suite", choices=SUITES, default="all")
    c.add_argument("--seeds", type=parse_seeds, default=parse_seeds("1..100"))
    c.add_argument("--n", type=int, default=2)
    c.add_argument("--omega", type=int, default=3)
    c.add_argument("--out")
    c.add_argument("--verbose", action="store_true")
    c.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="SVG of a planar set")
    p.add_argument("--set", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dump-polytope", metavar="PATH", help="also write the truncated body as JSON")
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "p", None) is not None and args.p == 0:
        print("error: p must be nonzero", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (ParseError, SchemaError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except UnsupportedPlotDimension as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except CoconvexError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
