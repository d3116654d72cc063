"""Invariant suites run by ``ckthermo check``.

Each check returns a plain dict ``{suite, name, passed, value, tolerance}``
so reports stay serializable.  All randomness is seeded from the config.
"""
import itertools
import math

import numpy as np

from . import ck_algebra as ck
from . import expression as ex
from .potential import discretize, phi_beta, range_and_positivity
from .shift_space import (count_words, enumerate_cylinders, extend_to_point, is_admissible,
                          primitivity_exponent, q_function)
from .thermo import LambdaEvaluator, beta_star, bounds_report, lambda_curve
from .transfer_op import (algebra_identity_suite, build_transfer_matrix, index_identity_check,
                          lambda_by_iterate_norm, perron, rpf_convergence_report)

RPF_TOL = 1e-6
RPF_STEPS = 60
RPF_TRANSIENT = 10
# dev_k below this is rounding noise; the monotonicity test ignores it
RPF_NOISE_FLOOR = 1e-13
ORACLE_TOL = 1e-3
RESTART_TOL = 1e-8
KMS_TOL = 1e-7
KMS_CONTROL = 1e-3
ADDITIVITY_TOL = 1e-10
AGGREGATE_TOL = 1e-8
IDENTITY_TOL = 1e-12


def _item(suite, name, passed, value=None, tolerance=None):
    return {"suite": suite, "name": name, "passed": bool(passed), "value": value,
            "tolerance": tolerance}


def brute_force_words(A, k):
    """All admissible length-k words by filtering the full product set."""
    return [w for w in itertools.product(range(1, A.n + 1), repeat=k) if is_admissible(A, w)]


def monotone_after(devs, transient=RPF_TRANSIENT, floor=RPF_NOISE_FLOOR):
    tail = np.asarray(devs[transient:])
    return bool(np.all(np.diff(tail) <= floor))


def shift_space_checks(cfg):
    A = cfg.A
    out = []
    kmax = 1
    while kmax < 6 and A.n ** (kmax + 1) <= 50_000:
        kmax += 1
    ok = True
    for k in range(1, kmax + 1):
        words = enumerate_cylinders(A, k).word_list()
        if words != brute_force_words(A, k):
            ok = False
        if k > 1:
            prev = enumerate_cylinders(A, k - 1).word_list()
            if len(words) != sum(int(A.entries[w[-1] - 1].sum()) for w in prev):
                ok = False
        if len(words) != count_words(A, k):
            ok = False
    out.append(_item("shift_space", f"cylinders match brute force for k <= {kmax}", ok))
    m = primitivity_exponent(A)
    if m is None:
        out.append(_item("shift_space", "A is primitive", False))
    else:
        B = A.entries.astype(np.int64)
        minimal = m == 1 or not (np.linalg.matrix_power(B, m - 1) > 0).all()
        out.append(_item("shift_space", "primitivity exponent is minimal", minimal, m))
    ok = True
    for w in enumerate_cylinders(A, min(2, kmax)).word_list():
        p = extend_to_point(A, w, 8)
        ok &= all(extend_to_point(A, p[:j], 8) == p for j in range(len(w), 9))
    out.append(_item("shift_space", "greedy extension is prefix-stable", ok))
    Q = q_function(A)
    out.append(_item("shift_space", "1 <= Q <= n", bool((Q >= 1).all() and (Q <= A.n).all())))
    return out


def potential_checks(cfg):
    A, H = cfg.A, cfg.H
    out = []
    if cfg.expression is not None:
        d = max(cfg.potential_depth, ex.depth(cfg.expression))
        coarse = discretize(cfg.expression, A, d)
        fine = discretize(cfg.expression, A, d + 1)
        err = float(np.abs(coarse.refine(d + 1).values - fine.values).max())
        out.append(_item("potential", "discretization is depth-stable", err == 0.0, err, 0.0))
    rng = np.random.default_rng(cfg.seed)
    b1, b2 = rng.random(2) * 3
    err = float(np.abs(phi_beta(H, b1 + b2).values - phi_beta(H, b1).values
                       - phi_beta(H, b2).values).max())
    out.append(_item("potential", "phi_beta is linear in beta", err <= 1e-12, err, 1e-12))
    m, M, exceeds = range_and_positivity(H)
    out.append(_item("potential", "range bounds attained",
                     m in H.values.tolist() and M in H.values.tolist()))
    out.append(_item("potential", "H > 1", exceeds, m))
    return out


def transfer_checks(cfg, bstar):
    A, H = cfg.A, cfg.H
    out = []
    M = build_transfer_matrix(A, phi_beta(H, bstar), cfg.k)
    Q = q_function(A)
    counts_ok = np.array_equal(M.row_counts(), Q[M.space.words[:, 0] - 1])
    out.append(_item("transfer_op", "row w has Q(w0) entries", counts_ok))
    k_id = max(2, cfg.k)
    worst = max(r.max_error for r in algebra_identity_suite(A, k_id, 100, IDENTITY_TOL, cfg.seed))
    out.append(_item("transfer_op", f"shift/transfer identities at depth {k_id}",
                     worst <= IDENTITY_TOL, worst, IDENTITY_TOL))
    ok, err = index_identity_check(H, bstar, max(2, cfg.k), 100, IDENTITY_TOL, cfg.seed)
    out.append(_item("transfer_op", "Q o shift realizes the index", ok, err, IDENTITY_TOL))
    for beta in (0.0, bstar):
        Mb = build_transfer_matrix(A, phi_beta(H, beta), cfg.k)
        P = perron(Mb, cfg.tol, cfg.max_iter, cfg.seed)
        gap = abs(P.lam - lambda_by_iterate_norm(Mb, 60))
        out.append(_item("transfer_op", f"norm-growth oracle at beta={beta:.17g}",
                         gap <= ORACLE_TOL, gap, ORACLE_TOL))
    P = perron(M, cfg.tol, cfg.max_iter, cfg.seed)
    nus = [perron(M, cfg.tol, cfg.max_iter, cfg.seed + 1 + i).nu for i in range(20)]
    spread = max(float(np.abs(a - b).sum()) for a, b in itertools.combinations(nus + [P.nu], 2))
    out.append(_item("transfer_op", "eigenmeasure independent of the start", spread <= RESTART_TOL,
                     spread, RESTART_TOL))
    rng = np.random.default_rng(cfg.seed)
    worst, mono = 0.0, True
    for _ in range(10):
        devs = rpf_convergence_report(M, P, rng.random(M.size), RPF_STEPS)
        worst = max(worst, float(devs[-1]))
        mono &= monotone_after(devs)
    out.append(_item("transfer_op", f"lambda^-k L^k g -> nu(g) h by k={RPF_STEPS}",
                     worst <= RPF_TOL, worst, RPF_TOL))
    out.append(_item("transfer_op", "deviation non-increasing after the transient", mono))
    P2 = perron(build_transfer_matrix(A, phi_beta(H, bstar), cfg.k + 1), cfg.tol, cfg.max_iter,
                cfg.seed)
    gap = abs(P.lam - P2.lam)
    out.append(_item("transfer_op", "lambda stable under refinement", gap <= 10 * cfg.tol, gap,
                     10 * cfg.tol))
    return out


def thermo_checks(cfg, result, evaluator):
    A, H = cfg.A, cfg.H
    out = []
    m, M, _ = range_and_positivity(H)
    lam0 = evaluator(0.0)
    out.append(_item("thermo", "lambda(0) > 1", lam0 > 1, lam0))
    bstar = result.beta_star
    grid = np.linspace(0.0, 2.0 * max(bstar, 0.5), 20)
    try:
        lambda_curve(A, H, grid, evaluator=evaluator)
        out.append(_item("thermo", "curve decreasing and within global bounds", True))
    except AssertionError as exc:
        out.append(_item("thermo", f"curve decreasing and within global bounds: {exc}", False))
    delta = grid[1]
    worst = math.inf
    ok = True
    for beta in grid[1:-1]:
        rep = bounds_report(A, H, float(beta), float(delta), evaluator=evaluator,
                            raise_on_fail=False)
        ok &= rep["passed"]
        worst = min(worst, min(c["margin"] for c in rep["checks"]))
    out.append(_item("thermo", "sandwich inequalities on the grid", ok, worst, -1e-8))
    lam_at = evaluator(bstar)
    out.append(_item("thermo", "|lambda(beta*) - 1| <= tol", abs(lam_at - 1) <= cfg.tol,
                     abs(lam_at - 1), cfg.tol))
    finer = beta_star(A, H, cfg.k + 1, cfg.tol, seed=cfg.seed)
    # beta error is about tol / |lambda'(beta*)| and |lambda'| >= lambda * log m
    slack = 10 * cfg.tol * max(1.0, 1.0 / math.log(m))
    gap = abs(finer.beta_star - bstar)
    out.append(_item("thermo", "beta* stable under refinement", gap <= slack, gap, slack))
    if m == M:
        closed = math.log(lam0) / math.log(m)
        gap = abs(closed - bstar)
        out.append(_item("thermo", "constant H: beta* = log lambda(0) / log c", gap <= slack,
                         gap, slack))
    return out


def ck_checks(cfg, result, evaluator, pairs=200):
    A, H = cfg.A, cfg.H
    out = []
    bstar = result.beta_star
    phi = phi_beta(H, bstar)
    nu = ck.CylinderMeasure(A, cfg.k, result.perron.nu, result.perron.lam, phi)
    margins = [r.margin for r in ck.kms_suite(A, H, bstar, nu, pairs, 4, KMS_TOL, cfg.seed)]
    out.append(_item("ck_algebra", f"KMS condition at beta* ({pairs} pairs)",
                     max(margins) <= KMS_TOL, max(margins), KMS_TOL))
    off = bstar + 0.2
    P_off = evaluator.perron(off)
    nu_off = ck.CylinderMeasure(A, cfg.k, P_off.nu, P_off.lam, phi_beta(H, off))
    margins = [r.margin for r in ck.kms_suite(A, H, off, nu_off, pairs, 4, KMS_TOL, cfg.seed)]
    out.append(_item("ck_algebra", "KMS fails at beta* + 0.2", max(margins) > KMS_CONTROL,
                     max(margins), KMS_CONTROL))
    unit = ck.CKElement.unit(A)
    out.append(_item("ck_algebra", "psi(1) = 1", ck.kms_state(unit, nu) == 1.0))
    rng = np.random.default_rng(cfg.seed)
    off_diag = True
    for _ in range(50):
        a = ck.random_monomial(A, rng)
        (m, _c), = a.terms
        if m.left != m.right:
            off_diag &= ck.kms_state(a, nu) == 0
    out.append(_item("ck_algebra", "psi vanishes off the diagonal", off_diag))
    worst = 0.0
    for L in range(1, cfg.k + 4):
        if count_words(A, L) > 20_000:
            break
        for w in enumerate_cylinders(A, L).word_list():
            kids = sum(nu(w + (j,)) for j in range(1, A.n + 1) if A.entries[w[-1] - 1, j - 1])
            worst = max(worst, abs(nu(w) - kids))
    out.append(_item("ck_algebra", "cylinder additivity", worst <= ADDITIVITY_TOL, worst,
                     ADDITIVITY_TOL))
    P_fine = perron(build_transfer_matrix(A, phi, cfg.k + 1), cfg.tol, cfg.max_iter, cfg.seed)
    fine = ck.CylinderMeasure(A, cfg.k + 1, P_fine.nu, P_fine.lam, phi)
    gap = float(np.abs(fine.aggregated(cfg.k) - nu.base).max())
    out.append(_item("ck_algebra", "depth-(k+1) measure aggregates to depth k", gap <= AGGREGATE_TOL,
                     gap, AGGREGATE_TOL))
    assoc = invol = True
    for _ in range(pairs):
        a, b, c = (ck.random_monomial(A, rng) for _ in range(3))
        assoc &= ck.multiply(ck.multiply(a, b), c) == ck.multiply(a, ck.multiply(b, c))
        invol &= ck.adjoint(ck.multiply(a, b)) == ck.multiply(ck.adjoint(b), ck.adjoint(a))
    out.append(_item("ck_algebra", "associativity", assoc))
    out.append(_item("ck_algebra", "involution reverses products", invol))
    worst = 0.0
    for _ in range(50):
        a = ck.random_monomial(A, rng) + ck.random_monomial(A, rng).scale(0.5)
        t = float(rng.normal() * 3)
        worst = max(worst, abs(ck.kms_state(ck.gauge_action(a, H, t), nu) - ck.kms_state(a, nu)))
    out.append(_item("ck_algebra", "psi is gauge invariant", worst <= 1e-12, worst, 1e-12))
    return out


def run_all(cfg, pairs=200):
    """Every suite for ``cfg``; returns ``(beta_star_result, items)``."""
    evaluator = LambdaEvaluator(cfg.A, cfg.H, cfg.k, cfg.tol, cfg.max_iter, cfg.seed)
    result = beta_star(cfg.A, cfg.H, cfg.k, cfg.tol, seed=cfg.seed, evaluator=evaluator)
    items = shift_space_checks(cfg) + potential_checks(cfg)
    items += transfer_checks(cfg, result.beta_star)
    items += thermo_checks(cfg, result, evaluator)
    items += ck_checks(cfg, result, evaluator, pairs)
    return result, items
