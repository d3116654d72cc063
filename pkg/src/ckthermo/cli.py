"""Command-line entry point: ``ckthermo --config run.toml <command> [options]``.

Exit codes: 0 ok, 2 config/validation error, 3 non-convergence,
4 invariant violation, 5 I/O error.
"""
import argparse
import sys
import time

import numpy as np

from . import ck_algebra as ck
from . import suites
from .config import load_config
from .errors import CKThermoError, InvariantViolation, exit_code
from .potential import holder_diagnostic, phi_beta, range_and_positivity
from .report import FORMATS, ReportDocument, emit_report
from .shift_space import primitivity_exponent, q_function, wielandt_bound
from .thermo import LambdaEvaluator, beta_star, lambda_curve
from .transfer_op import (build_transfer_matrix, iterate_norm_root, lambda_by_iterate_norm,
                          perron, rpf_convergence_report)


def _solve(cfg):
    ev = LambdaEvaluator(cfg.A, cfg.H, cfg.k, cfg.tol, cfg.max_iter, cfg.seed)
    return ev, beta_star(cfg.A, cfg.H, cfg.k, cfg.tol, seed=cfg.seed, evaluator=ev)


def cmd_validate(cfg, args):
    m, M, exceeds = range_and_positivity(cfg.H)
    payload = {
        "n": cfg.A.n,
        "matrix": list(cfg.matrix),
        "valid": True,
        "primitivity_exponent": primitivity_exponent(cfg.A),
        "wielandt_bound": wielandt_bound(cfg.A.n),
        "Q": q_function(cfg.A).tolist(),
        "potential_depth": cfg.H.depth,
        "H_min": m,
        "H_max": M,
        "H_exceeds_one": exceeds,
    }
    if cfg.expression is not None:
        diag = holder_diagnostic(cfg.expression, cfg.A, cfg.metric_theta, seed=cfg.seed)
        payload["holder"] = {"theta": diag.theta, "exponent": diag.exponent,
                             "constant": diag.constant, "samples": diag.samples}
    return payload, []


def cmd_spectrum(cfg, args):
    M = build_transfer_matrix(cfg.A, phi_beta(cfg.H, args.beta), cfg.k)
    P = perron(M, cfg.tol, cfg.max_iter, cfg.seed)
    devs = rpf_convergence_report(M, P, np.ones(M.size), args.steps)
    payload = {
        "beta": args.beta,
        "depth": cfg.k,
        "cylinders": M.size,
        "nonzeros": M.nnz,
        "perron": P.summary(),
        "lambda_norm_growth": lambda_by_iterate_norm(M, args.steps),
        "lambda_norm_root": iterate_norm_root(M, args.steps),
        "rpf_deviation_tail": devs[-5:].tolist(),
    }
    return payload, []


def cmd_curve(cfg, args):
    grid = np.linspace(args.beta_from, args.beta_to, args.steps + 1)
    curve = lambda_curve(cfg.A, cfg.H, grid, cfg.k,
                         evaluator=LambdaEvaluator(cfg.A, cfg.H, cfg.k, cfg.tol, cfg.max_iter,
                                                   cfg.seed))
    rows = curve.rows()
    payload = {"m": curve.m, "M": curve.M, "L_norm": curve.L_norm,
               "samples": [dict(zip(("beta", "lambda", "lower_bound", "upper_bound"), r))
                           for r in rows]}
    return payload, [], [("beta", "lambda", "lower_bound", "upper_bound")] + rows


def cmd_beta_star(cfg, args):
    _, res = _solve(cfg)
    return res.summary(), []


def _measure(cfg, res):
    phi = phi_beta(cfg.H, res.beta_star)
    return ck.CylinderMeasure(cfg.A, cfg.k, res.perron.nu, res.perron.lam, phi)


def cmd_kms(cfg, args):
    _, res = _solve(cfg)
    a = ck.CKElement.parse(cfg.A, args.monomial)
    value = ck.kms_state(a, _measure(cfg, res))
    return {"monomial": args.monomial, "beta_star": res.beta_star, "psi": value}, []


def cmd_kms_check(cfg, args):
    _, res = _solve(cfg)
    margins = [r.margin for r in ck.kms_suite(cfg.A, cfg.H, res.beta_star, _measure(cfg, res),
                                              args.pairs, 4, args.tol, cfg.seed)]
    passed = max(margins) <= args.tol
    payload = {"beta_star": res.beta_star, "pairs": args.pairs, "tolerance": args.tol,
               "max_margin": max(margins), "mean_margin": float(np.mean(margins))}
    return payload, [{"suite": "ck_algebra", "name": "KMS condition at beta*", "passed": passed,
                      "value": max(margins), "tolerance": args.tol}]


def cmd_check(cfg, args):
    res, items = suites.run_all(cfg, args.pairs)
    payload = {"beta_star": res.summary(), "checks": len(items),
               "failed": sum(not i["passed"] for i in items)}
    return payload, items


COMMANDS = {
    "validate": cmd_validate,
    "spectrum": cmd_spectrum,
    "curve": cmd_curve,
    "beta-star": cmd_beta_star,
    "kms": cmd_kms,
    "kms-check": cmd_kms_check,
    "check": cmd_check,
}


def build_parser():
    p = argparse.ArgumentParser(prog="ckthermo", description=__doc__.splitlines()[0])
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--format", choices=sorted(FORMATS), default="json")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock timing (makes output non-reproducible)")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate")
    sp = sub.add_parser("spectrum")
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--steps", type=int, default=60)
    sp = sub.add_parser("curve")
    sp.add_argument("--from", dest="beta_from", type=float, default=0.0)
    sp.add_argument("--to", dest="beta_to", type=float, required=True)
    sp.add_argument("--steps", type=int, default=20)
    sub.add_parser("beta-star")
    sp = sub.add_parser("kms")
    sp.add_argument("--monomial", required=True, help='e.g. "1,2|1,2"; empty side is "e"')
    sp = sub.add_parser("kms-check")
    sp.add_argument("--pairs", type=int, default=200)
    sp.add_argument("--tol", type=float, default=suites.KMS_TOL)
    sp = sub.add_parser("check")
    sp.add_argument("--pairs", type=int, default=200)
    return p


def _echo(args):
    skip = {"config", "format", "out", "timing"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run(command, cfg, args):
    """Execute one command and assemble its ReportDocument."""
    t0 = time.perf_counter()
    out = COMMANDS[command](cfg, args)
    payload, invariants = out[0], out[1]
    doc = ReportDocument(_echo(args), cfg.hash(), payload, invariants)
    if len(out) > 2:
        doc.csv_rows = out[2]
    if getattr(args, "timing", False):
        doc.timing = {"seconds": time.perf_counter() - t0}
    return doc


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        doc = run(args.command, cfg, args)
    except (CKThermoError, OSError) as exc:
        print(f"ckthermo: error: {exc}", file=sys.stderr)
        return exit_code(exc)
    try:
        emit_report(doc, args.format, args.out)
    except OSError as exc:
        print(f"ckthermo: error: {exc}", file=sys.stderr)
        return 5
    if not doc.ok:
        failed = [i["name"] for i in doc.invariants if not i["passed"]]
        print(f"ckthermo: invariant violation: {'; '.join(failed)}", file=sys.stderr)
        return InvariantViolation.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
