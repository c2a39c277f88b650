"""Command line front end: ``minares-bench {solve,compare,spectral}``.

Exit codes: 0 on convergence (or a clean Lanczos breakdown), 2 when the
iteration limit was hit, 1 on any other failure, 64 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from .baselines import lsmr_solve, minres_solve
from .cdfamily import car_solve, cg_solve, cr_solve
from .errors import NoNullvectorError
from .io import read_matrix_market, read_rectangular, read_vector, records_from_report, write_history
from .minares import minares_solve
from .operator import from_sparse, max_entry_scale
from .report import Status, StoppingCriteria
from .spectral import inverse_iteration, nullvector, singular_triplet

SOLVERS = {
    "minares": minares_solve,
    "car": car_solve,
    "cg": cg_solve,
    "cr": cr_solve,
    "minres": minres_solve,
    "lsmr": lsmr_solve,
}

EX_OK, EX_FAIL, EX_MAXITER, EX_USAGE = 0, 1, 2, 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _solver_list(text):
    names = [t.strip() for t in text.split(",") if t.strip()]
    bad = [t for t in names if t not in SOLVERS]
    if bad or not names:
        raise argparse.ArgumentTypeError(
            f"unknown solver(s) {', '.join(bad) or '(none)'}; choose from {', '.join(SOLVERS)}")
    return names


def _add_problem_flags(p):
    p.add_argument("--matrix", required=True, help="symmetric Matrix Market file")
    p.add_argument("--rhs", default="ones",
                   help="'ones' (b = e), 'Ae' (b = A e), 'random', or a vector file")
    p.add_argument("--eps-r", type=float, default=1e-10, help="absolute tolerance on ||r||")
    p.add_argument("--eps-ar", type=float, default=1e-10, help="absolute tolerance on ||Ar||")
    p.add_argument("--maxiter", type=int, default=None, help="iteration cap (default 10n)")
    p.add_argument("--scale", action=argparse.BooleanOptionalAction, default=True,
                   help="divide A by its largest entry in magnitude (default on)")
    p.add_argument("--explicit-norms", action="store_true",
                   help="recompute ||r|| and ||Ar|| by operator products each iteration")
    p.add_argument("--beta-tol", type=float, default=None, help="Lanczos breakdown threshold")
    p.add_argument("--seed", type=int, default=0, help="seed for --rhs random")
    p.add_argument("--history", default=None, help="write a CSV history to this path")
    p.add_argument("--timing", action="store_true",
                   help="fill the 'seconds' column of histories (output is then not reproducible)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="minares-bench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve one system and report convergence")
    _add_problem_flags(p)
    p.add_argument("--solver", choices=list(SOLVERS), default="minares")

    p = sub.add_parser("compare", help="race several solvers on one system")
    _add_problem_flags(p)
    p.add_argument("--solvers", type=_solver_list, default=["minares", "lsmr"],
                   help="comma separated list, e.g. minares,lsmr")

    p = sub.add_parser("spectral", help="null vector, eigenpair or singular triplet")
    p.add_argument("--matrix", required=True,
                   help="Matrix Market file (rectangular allowed for --mode svd)")
    p.add_argument("--mode", choices=["null", "eig", "svd"], required=True)
    p.add_argument("--shift", type=float, default=0.0, help="target eigenvalue or singular value")
    p.add_argument("--outer", type=int, default=5, help="outer iterations")
    p.add_argument("--rayleigh", action="store_true", help="refresh the shift by the Rayleigh quotient")
    p.add_argument("--tol", type=float, default=1e-10, help="required explicit residual")
    p.add_argument("--scale", action=argparse.BooleanOptionalAction, default=False,
                   help="divide A by its largest entry (default off: shifts refer to A as given)")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _load_problem(args):
    M = read_matrix_market(args.matrix)
    if args.scale:
        M, _ = max_entry_scale(M)
    op = from_sparse(M)
    if args.rhs == "ones":
        b = np.ones(op.n)
    elif args.rhs == "Ae":
        b = op.apply(np.ones(op.n))
    elif args.rhs == "random":
        b = np.random.default_rng(args.seed).standard_normal(op.n)
    else:
        b = read_vector(args.rhs, op.n)
    crit = StoppingCriteria(eps_r=args.eps_r, eps_Ar=args.eps_ar, k_max=args.maxiter,
                            beta_tol=args.beta_tol, explicit_norms=args.explicit_norms)
    return op, b, crit


def _exit_code(statuses):
    if any(s in (Status.INDEFINITE, Status.NUMERICAL_FAILURE) for s in statuses):
        return EX_FAIL
    if any(s is Status.MAX_ITERATIONS for s in statuses):
        return EX_MAXITER
    return EX_OK


def _print_report(rep, out):
    print(f"solver: {rep.solver}", file=out)
    print(f"status: {rep.status}", file=out)
    print(f"iterations: {rep.iterations}", file=out)
    print(f"matvecs: {rep.matvecs}", file=out)
    print(f"rnorm: {rep.rnorm!r}", file=out)
    print(f"arnorm: {rep.arnorm!r}", file=out)
    if rep.rnorm_explicit_history:
        print(f"rnorm_explicit: {rep.rnorm_explicit_history[-1]!r}", file=out)
        print(f"arnorm_explicit: {rep.arnorm_explicit_history[-1]!r}", file=out)


def run_solve(args, out=None) -> int:
    out = out or sys.stdout
    op, b, crit = _load_problem(args)
    x, rep = SOLVERS[args.solver](op, b, crit)
    _print_report(rep, out)
    if args.history:
        write_history(records_from_report(rep, timing=args.timing), args.history)
    return _exit_code([rep.status])


def run_compare(args, out=None) -> int:
    """Run each solver and align their histories on the matvec count.

    The CSV has a ``matvecs`` column followed by one column group per
    solver.  When both MINARES and CAR run, ``xdiff_minares_car`` holds
    ``||x_k^MINARES - x_k^CAR|| / ||x_k^MINARES||`` on the row of MINARES's
    k-th iterate.
    """
    out = out or sys.stdout
    op, b, crit = _load_problem(args)
    names = args.solvers
    want_x = "minares" in names and "car" in names
    crit.record_iterates = want_x
    reports = {}
    for name in names:
        _, rep = SOLVERS[name](op, b, crit)
        reports[name] = rep
        _print_report(rep, out)
        print(file=out)

    xdiff = {}
    if want_x:
        xm, xc = reports["minares"].iterates, reports["car"].iterates
        for k in range(min(len(xm), len(xc))):
            nx = float(np.linalg.norm(xm[k]))
            d = float(np.linalg.norm(xm[k] - xc[k]))
            xdiff[reports["minares"].matvec_history[k]] = d / nx if nx > 0 else d
        if xdiff:
            print(f"max xdiff_minares_car: {max(xdiff.values())!r}", file=out)

    if args.history:
        _write_compare_csv(args.history, names, reports, xdiff, args.timing)
    return _exit_code([r.status for r in reports.values()])


def _write_compare_csv(path, names, reports, xdiff, timing):
    cols = ("k", "rnorm_est", "arnorm_est", "rnorm", "arnorm", "seconds")
    by_mv = {}
    for name in names:
        for rec, mv in zip(records_from_report(reports[name], timing), reports[name].matvec_history):
            by_mv.setdefault(mv, {})[name] = rec
    header = ["matvecs"] + [f"{name}_{c}" for name in names for c in cols]
    if xdiff:
        header.append("xdiff_minares_car")

    def fmt(v):
        return "" if v is None else repr(v) if isinstance(v, float) else str(v)

    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for mv in sorted(by_mv):
            row = [str(mv)]
            for name in names:
                rec = by_mv[mv].get(name)
                row += [""] * len(cols) if rec is None else [fmt(getattr(rec, c)) for c in cols]
            if xdiff:
                row.append(fmt(xdiff.get(mv)))
            w.writerow(row)


def run_spectral(args, out=None) -> int:
    out = out or sys.stdout
    if args.mode == "svd":
        B = read_rectangular(args.matrix)
        if args.scale:
            B = B / abs(B).max()
        res = singular_triplet(B, args.shift, args.outer, rayleigh=args.rayleigh,
                               tol=args.tol, seed=args.seed)
        print(f"sigma: {res.sigma!r}", file=out)
        print(f"u: {' '.join(repr(float(t)) for t in res.u)}", file=out)
        print(f"v: {' '.join(repr(float(t)) for t in res.v)}", file=out)
        print(f"residual: {res.residual!r}", file=out)
        print(f"iterations: {res.iterations}", file=out)
        print(f"matvecs: {res.matvecs}", file=out)
        print(f"status: {res.status}", file=out)
        return EX_OK if res.residual <= args.tol else EX_FAIL

    M = read_matrix_market(args.matrix)
    if args.scale:
        M, _ = max_entry_scale(M)
    op = from_sparse(M)
    if args.mode == "null":
        try:
            r, rep = nullvector(op, seed=args.seed, full_output=True)
        except NoNullvectorError as exc:
            print(f"status: no_nullvector ({exc})", file=out)
            return EX_FAIL
        v = r / np.linalg.norm(r)
        residual = float(np.linalg.norm(op.apply(v)))
        print(f"nullvector: {' '.join(repr(float(t)) for t in v)}", file=out)
        print(f"residual: {residual!r}", file=out)
        print(f"matvecs: {rep.matvecs + 2}", file=out)
        print(f"status: {'converged' if residual <= args.tol else 'not_converged'}", file=out)
        return EX_OK if residual <= args.tol else EX_FAIL

    res = inverse_iteration(op, args.shift, args.outer, rayleigh=args.rayleigh,
                            tol=args.tol, seed=args.seed)
    print(f"lambda: {res.lam!r}", file=out)
    print(f"v: {' '.join(repr(float(t)) for t in res.v)}", file=out)
    print(f"residual: {res.residual!r}", file=out)
    print(f"iterations: {res.iterations}", file=out)
    print(f"matvecs: {res.matvecs}", file=out)
    print(f"status: {res.status}", file=out)
    return EX_OK if res.converged else EX_FAIL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    run = {"solve": run_solve, "compare": run_compare, "spectral": run_spectral}[args.command]
    try:
        return run(args)
    except (OSError, ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
