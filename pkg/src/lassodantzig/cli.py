"""Command-line entry point: solve, analyze, oracle and montecarlo."""

from __future__ import annotations

import argparse
import json
import math
import sys

from .bounds import best_sparse_approx, c_eps, oracle_inequality_rhs
from .core import (DesignMatrix, InvalidInputError, RegressionInstance, SolverError,
                   penalty_level)
from .dantzig import DantzigConfig, fit_dantzig
from .harness import (ExperimentConfig, dump_json, emit_report, read_matrix, read_vector,
                      run_montecarlo)
from .lasso import LassoConfig, fit_lasso, lasso_kkt_check
from .re_analysis import DEFAULT_CAP, analyze, certified_kappa

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}")


def _load_design(path: str) -> DesignMatrix:
    return DesignMatrix(read_matrix(path))


def cmd_solve(args) -> dict:
    design = _load_design(args.design)
    y = read_vector(args.response)
    if y.size != design.n:
        raise InvalidInputError(f"response has {y.size} entries, design has {design.n} rows")
    pen = penalty_level(args.A, args.sigma, design.n, design.M)
    r = pen.r if args.r is None else args.r
    inst = RegressionInstance(design, y, sigma=args.sigma)
    out = {"method": args.method, "r": r, "A": args.A, "sigma": args.sigma,
           "n": design.n, "M": design.M}
    if args.method == "lasso":
        res = fit_lasso(inst, LassoConfig(r))
        kkt = lasso_kkt_check(inst, res.beta_hat, r)
        out.update(beta=res.beta_hat.to_json(), objective=res.objective,
                   sweeps=res.sweeps_used, converged=res.converged,
                   kkt_passes=kkt.passes, kkt_violation=kkt.max_violation,
                   dantzig_sup=kkt.dantzig_sup, sparsity=res.beta_hat.sparsity())
    else:
        res = fit_dantzig(inst, DantzigConfig(r, max_pivots=args.max_pivots))
        out.update(beta=res.beta_hat.to_json(), l1_norm=res.l1_norm, feasible=res.feasible,
                   max_constraint=res.max_constraint, pivots=res.pivots_used,
                   min_reduced_cost=res.min_reduced_cost,
                   sparsity=res.beta_hat.sparsity(1e-10))
    return out


def cmd_analyze(args) -> dict:
    design = _load_design(args.design)
    rep = analyze(design, args.s, args.c0, m=args.m, enumeration_cap=args.cap,
                  search_budget=args.budget, iterations=args.iterations, seed=args.seed)
    return rep.to_json()


def cmd_oracle(args) -> dict:
    design = _load_design(args.design)
    f = read_vector(args.target)
    oracle = best_sparse_approx(design, f, args.s, enumeration_cap=args.cap)
    out = oracle.to_json()
    out.update(s=args.s, eps=args.eps, C_eps=c_eps(args.eps),
               bias_exact_s=oracle.bias_exact_s)
    if args.A is not None and args.sigma is not None:
        pen = penalty_level(args.A, args.sigma, design.n, design.M)
        c0 = (3.0 + 4.0 / args.eps) * design.f_max / design.f_min
        kappa, source = certified_kappa(design, max(1, args.s), c0)
        out["kappa"] = {"value": kappa, "source": source, "c0": c0}
        out["oracle_rhs"] = (oracle_inequality_rhs(oracle, args.eps, kappa, design.f_max, pen)
                               if kappa is not None else math.inf)
    return out


def cmd_montecarlo(args):
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{args.config}: invalid JSON ({exc})")
    except OSError as exc:
        raise OSError(f"cannot read {args.config}: {exc.strerror or exc}") from exc
    if args.workers is not None:
        data["workers"] = args.workers
    config = ExperimentConfig.from_json(data)
    summary, records = run_montecarlo(config)
    emit_report(config, records, summary, args.out, args.summary)
    return None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lassodantzig",
                                description="Lasso and Dantzig selector estimation and bound checks")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="fit the Lasso or the Dantzig selector")
    s.add_argument("--design", required=True)
    s.add_argument("--response", required=True)
    s.add_argument("--method", choices=("lasso", "dantzig"), required=True)
    s.add_argument("--A", type=float, required=True)
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--r", type=float, default=None, help="override the tuning radius")
    s.add_argument("--max-pivots", type=int, default=100_000, help="simplex pivot budget")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_solve)

    a = sub.add_parser("analyze", help="restricted eigenvalue report")
    a.add_argument("--design", required=True)
    a.add_argument("--s", type=int, required=True)
    a.add_argument("--m", type=int, default=None)
    a.add_argument("--c0", type=_float_list, default=[1.0, 3.0])
    a.add_argument("--cap", type=int, default=DEFAULT_CAP)
    a.add_argument("--budget", type=int, default=64)
    a.add_argument("--iterations", type=int, default=500)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out", required=True)
    a.set_defaults(func=cmd_analyze)

    o = sub.add_parser("oracle", help="best sparse approximation of a target")
    o.add_argument("--design", required=True)
    o.add_argument("--target", required=True)
    o.add_argument("--s", type=int, required=True)
    o.add_argument("--eps", type=float, default=2.0)
    o.add_argument("--A", type=float, default=None)
    o.add_argument("--sigma", type=float, default=None)
    o.add_argument("--cap", type=int, default=DEFAULT_CAP)
    o.add_argument("--out", required=True)
    o.set_defaults(func=cmd_oracle)

    m = sub.add_parser("montecarlo", help="seeded Monte Carlo coverage experiment")
    m.add_argument("--config", required=True)
    m.add_argument("--out", required=True)
    m.add_argument("--summary", required=True)
    m.add_argument("--workers", type=int, default=None)
    m.set_defaults(func=cmd_montecarlo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
        if result is not None:
            dump_json(result, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvalidInputError, TypeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
