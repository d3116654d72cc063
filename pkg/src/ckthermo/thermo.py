"""The curve beta -> lambda(beta), its a-priori bounds, and the root lambda = 1.

For a potential H > 1 every bound below follows from sandwiching
``H**-beta`` between ``M**-beta`` and ``m**-beta`` (m = min H, M = max H).
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InequalityViolation, MonotonicityViolation, NoConvergence, ValidationError
from .potential import phi_beta, range_and_positivity, require_exceeds_one
from .shift_space import q_function
from .transfer_op import DEFAULT_MAX_ITER, DEFAULT_TOL, build_transfer_matrix, perron

BOUND_SLACK = 1e-8


class LambdaEvaluator:
    """lambda(beta) on a fixed cylinder depth, reusing the sparsity pattern.

    Successive calls warm-start the power iteration from the previous Perron
    pair; the seeded start is used for the first call only.
    """

    def __init__(self, A, H, k=None, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, seed=0):
        self.A, self.H = A, H
        self.k = H.depth if k is None else k
        self.tol, self.max_iter, self.seed = tol, max_iter, seed
        self._bare = build_transfer_matrix(A, None, self.k)
        self._last = None
        self._memo = {}

    def matrix(self, beta):
        return self._bare.with_phi(phi_beta(self.H, beta))

    def perron(self, beta):
        beta = float(beta)
        hit = self._memo.get(beta)
        if hit is not None:
            return hit
        start = None if self._last is None else (self._last.h, self._last.nu)
        P = perron(self.matrix(beta), self.tol, self.max_iter, self.seed, start=start)
        self._last = P
        self._memo[beta] = P
        return P

    def __call__(self, beta):
        return self.perron(beta).lam


def lambda_of_beta(A, H, beta, k=None, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, seed=0):
    """Perron eigenvalue of the depth-k transfer matrix for ``-beta log H``."""
    return LambdaEvaluator(A, H, k, tol, max_iter, seed)(beta)


def operator_norm(A):
    """Norm of the unweighted operator on the positive cone: the largest column sum."""
    return float(q_function(A).max())


@dataclass(frozen=True)
class Bound:
    name: str
    lhs: float
    rhs: float

    @property
    def margin(self):
        """Relative room ``(rhs - lhs) / |rhs|``; negative beyond the slack means violated."""
        return (self.rhs - self.lhs) / abs(self.rhs) if self.rhs else self.rhs - self.lhs

    @property
    def holds(self):
        return self.lhs <= self.rhs * (1.0 + BOUND_SLACK) + 0.0


def _bounds_at(beta, lam, m, M, L_norm):
    return [
        Bound("M^-beta <= lambda(beta)", M ** -beta, lam),
        Bound("lambda(beta) <= m^-beta ||L||", lam, m ** -beta * L_norm),
    ]


def bounds_report(A, H, beta, delta, k=None, evaluator=None, raise_on_fail=True):
    """Evaluate lambda at beta - delta, beta, beta + delta and check every bound.

    Checks the global bounds at ``beta``, both two-sided sandwiches relating
    the three values, and ``lambda(0) > 1``.  Raises InequalityViolation
    (a solver bug, never a mathematical failure) unless ``raise_on_fail`` is
    false.
    """
    if delta <= 0:
        raise ValidationError("delta must be positive")
    if beta - delta < 0:
        raise ValidationError("beta - delta must be >= 0")
    m, M = require_exceeds_one(H)
    lam_of = evaluator or LambdaEvaluator(A, H, k)
    L_norm = operator_norm(A)
    lo, mid, hi, zero = lam_of(beta - delta), lam_of(beta), lam_of(beta + delta), lam_of(0.0)
    checks = _bounds_at(beta, mid, m, M, L_norm) + [
        Bound("m^delta lambda(beta) <= lambda(beta-delta)", m ** delta * mid, lo),
        Bound("lambda(beta-delta) <= M^delta lambda(beta)", lo, M ** delta * mid),
        Bound("M^-delta lambda(beta) <= lambda(beta+delta)", M ** -delta * mid, hi),
        Bound("lambda(beta+delta) <= m^-delta lambda(beta)", hi, m ** -delta * mid),
    ]
    report = {
        "beta": beta, "delta": delta, "m": m, "M": M, "L_norm": L_norm,
        "lambda": {"beta-delta": lo, "beta": mid, "beta+delta": hi, "zero": zero},
        "checks": [{"name": b.name, "lhs": b.lhs, "rhs": b.rhs, "margin": b.margin, "holds": b.holds}
                   for b in checks],
        "lambda_zero_exceeds_one": zero > 1.0,
    }
    report["passed"] = all(c["holds"] for c in report["checks"])
    if raise_on_fail and not report["passed"]:
        bad = next(c for c in report["checks"] if not c["holds"])
        raise InequalityViolation(f"{bad['name']}: {bad['lhs']!r} > {bad['rhs']!r}")
    return report


@dataclass(frozen=True)
class BetaStarResult:
    beta_star: float
    lambda_at: float
    bracket: tuple
    iterations: int
    depth_used: int
    perron: object = field(default=None, repr=False, compare=False)

    def summary(self):
        return {
            "beta_star": self.beta_star,
            "lambda_at": self.lambda_at,
            "bracket": list(self.bracket),
            "iterations": self.iterations,
            "depth_used": self.depth_used,
        }


def beta_upper(A, H):
    """Inverse temperature at which ``m^-beta ||L||`` reaches 1, so lambda <= 1 there."""
    m, _ = require_exceeds_one(H)
    return math.log(operator_norm(A)) / math.log(m)


def beta_star(A, H, k=None, tol=DEFAULT_TOL, max_iter=200, seed=0, evaluator=None):
    """Bisection for the unique beta with lambda(beta) = 1.

    The bracket ``[0, log||L|| / log m]`` comes from the bounds, so no search
    is needed.  Stops once ``|lambda - 1| <= tol``; if the bracket collapses
    to rounding width first, the midpoint is returned as is.
    """
    lam_of = evaluator or LambdaEvaluator(A, H, k, tol=min(tol, DEFAULT_TOL), seed=seed)
    lo, hi = 0.0, beta_upper(A, H)
    P = lam_of.perron(lo)
    if abs(P.lam - 1.0) <= tol or hi == 0.0:
        return BetaStarResult(lo, P.lam, (lo, hi), 0, lam_of.k, P)
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        P = lam_of.perron(mid)
        if abs(P.lam - 1.0) <= tol or hi - lo <= 4 * np.finfo(float).eps * max(1.0, hi):
            return BetaStarResult(mid, P.lam, (lo, hi), it, lam_of.k, P)
        if P.lam > 1.0:
            lo = mid
        else:
            hi = mid
    raise NoConvergence(max_iter, (lo, hi), f"bisection did not reach |lambda - 1| <= {tol}")


@dataclass(frozen=True)
class LambdaCurve:
    samples: tuple
    m: float
    M: float
    L_norm: float

    def lower(self, beta):
        return self.M ** -beta

    def upper(self, beta):
        return self.m ** -beta * self.L_norm

    def rows(self):
        return [(b, lam, self.lower(b), self.upper(b)) for b, lam in self.samples]

    def to_csv(self):
        lines = ["beta,lambda,lower_bound,upper_bound"]
        lines += [",".join(f"{v:.17g}" for v in row) for row in self.rows()]
        return "\n".join(lines) + "\n"


def lambda_curve(A, H, beta_grid, k=None, evaluator=None):
    """Sample lambda on a grid and assert monotonicity and the global bounds."""
    grid = [float(b) for b in beta_grid]
    if any(b < 0 for b in grid) or any(b2 <= b1 for b1, b2 in zip(grid, grid[1:])):
        raise ValidationError("beta grid must be strictly increasing and nonnegative")
    m, M, _ = range_and_positivity(H)
    require_exceeds_one(H)
    lam_of = evaluator or LambdaEvaluator(A, H, k)
    samples = tuple((b, lam_of(b)) for b in grid)
    curve = LambdaCurve(samples, m, M, operator_norm(A))
    for (b1, l1), (b2, l2) in zip(samples, samples[1:]):
        if not l2 < l1:
            raise MonotonicityViolation(f"lambda({b2}) = {l2!r} >= lambda({b1}) = {l1!r}")
    for b, lam in samples:
        for bound in _bounds_at(b, lam, m, M, curve.L_norm):
            if not bound.holds:
                raise InequalityViolation(f"{bound.name} at beta={b}: {bound.lhs!r} > {bound.rhs!r}")
    return curve
