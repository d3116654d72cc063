"""Finite restriction of the Ruelle transfer operator and its Perron triple.

A function constant on depth-``k`` cylinders is a vector indexed by the
canonical ``CylinderSpace``.  The transfer operator sends it to

    (L_phi f)(x) = sum over symbols a with A[a, x0] = 1 of exp(phi(a x)) f(a x),

so row ``w`` of the matrix has one entry per admissible predecessor ``a``,
in column ``v = (a, w0, ..., w_{k-2})``.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DepthMismatch, DimensionMismatch, NoConvergence, NotPrimitiveWarning
from .potential import LocallyConstantPotential
from .shift_space import enumerate_cylinders, extend_words, is_primitive, q_function

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True)
class TransferMatrix:
    A: object
    depth: int
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    data: np.ndarray = field(repr=False)
    phi: object = field(default=None, repr=False)
    # depth-d prefix position of every column, for weight-only rebuilds
    col_prefix: np.ndarray = field(default=None, repr=False)

    @property
    def space(self):
        return enumerate_cylinders(self.A, self.depth)

    @property
    def size(self):
        return self.indptr.shape[0] - 1

    @property
    def nnz(self):
        return self.indices.shape[0]

    def row_counts(self):
        return np.diff(self.indptr)

    def with_phi(self, phi):
        """Same sparsity pattern, weights recomputed for ``phi``."""
        return _with_weights(self, phi)

    def dense(self):
        out = np.zeros((self.size, self.size))
        rows = np.repeat(np.arange(self.size), self.row_counts())
        out[rows, self.indices] = self.data
        return out

    def entries(self):
        rows = np.repeat(np.arange(self.size), self.row_counts())
        return list(zip(rows.tolist(), self.indices.tolist(), self.data.tolist()))

    def dump(self, fh):
        """Coordinate list, one ``row col weight`` line per entry."""
        for r, c, w in self.entries():
            fh.write(f"{r} {c} {w:.17g}\n")


def _structure(A, k):
    space = enumerate_cylinders(A, k)
    E = A.entries.astype(bool)
    mask = E[:, space.words[:, 0] - 1].T  # mask[r, a]: A[a, w0(r)] == 1
    rows, preds = np.nonzero(mask)
    if k == 1:
        indices = preds.astype(np.int64)
    else:
        cols = np.column_stack([preds + 1, space.words[rows, : k - 1]])
        indices = space.lookup(cols).astype(np.int64)
    indptr = np.zeros(len(space) + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=len(space)), out=indptr[1:])
    return indptr, indices


def _with_weights(M, phi):
    if phi is None:
        data = np.ones(M.nnz)
        prefix = None
    else:
        if phi.depth > M.depth:
            raise DepthMismatch(f"potential depth {phi.depth} exceeds cylinder depth {M.depth}")
        prefix = M.col_prefix
        if prefix is None or M.phi is None or M.phi.depth != phi.depth:
            prefix = M.space.prefix_index(phi.depth)
        data = np.exp(phi.values)[prefix[M.indices]]
    return TransferMatrix(M.A, M.depth, M.indptr, M.indices, data, phi, prefix)


def build_transfer_matrix(A, phi=None, k=None):
    """Transfer matrix on depth-``k`` cylinders (``phi=None`` means phi = 0)."""
    if k is None:
        k = 1 if phi is None else phi.depth
    if phi is not None and phi.depth > k:
        raise DepthMismatch(f"potential depth {phi.depth} exceeds cylinder depth {k}")
    indptr, indices = _structure(A, k)
    bare = TransferMatrix(A, k, indptr, indices, np.ones(indices.shape[0]))
    return bare if phi is None else _with_weights(bare, phi)


def apply(M, f):
    f = np.asarray(f)
    if f.shape != (M.size,):
        raise DimensionMismatch(f"vector of shape {f.shape} for a {M.size}-cylinder space")
    if np.iscomplexobj(f):
        return kernels.csr_matvec(M.indptr, M.indices, M.data, f.astype(np.complex128))
    return kernels.csr_matvec(M.indptr, M.indices, M.data, f.astype(np.float64))


def apply_adjoint(M, y):
    """``y^T M``: the dual action on measures given by their cylinder weights."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (M.size,):
        raise DimensionMismatch(f"vector of shape {y.shape} for a {M.size}-cylinder space")
    return kernels.csr_rmatvec(M.indptr, M.indices, M.data, y)


@dataclass(frozen=True)
class PerronData:
    lam: float
    h: np.ndarray = field(repr=False)
    nu: np.ndarray = field(repr=False)
    residual_right: float
    residual_left: float
    iterations: int

    @property
    def lambda_(self):
        return self.lam

    def summary(self):
        return {
            "lambda": self.lam,
            "residual_right": self.residual_right,
            "residual_left": self.residual_left,
            "iterations": self.iterations,
            "h_min": float(self.h.min()),
            "h_max": float(self.h.max()),
            "nu_min": float(self.nu.min()),
            "nu_max": float(self.nu.max()),
        }


_PRIMITIVE = {}


def _check_primitive(A):
    ok = _PRIMITIVE.get(A)
    if ok is None:
        ok = _PRIMITIVE[A] = is_primitive(A)
    if not ok:
        warnings.warn(f"{A!r} is not primitive; the Perron triple may not exist",
                      NotPrimitiveWarning, stacklevel=3)


def starting_vectors(size, seed):
    rng = np.random.default_rng(seed)
    x0 = 1.0 + rng.random(size)
    y0 = 1.0 + rng.random(size)
    return x0 / x0.max(), y0 / y0.sum()


def perron(M, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, seed=0, start=None):
    """Power iteration for ``(lambda, h, nu)`` with ``sum(nu) = 1`` and ``nu . h = 1``.

    Converged when both residuals are below ``tol * max(1, lambda)`` and
    lambda moved by less than ``tol * lambda`` in the last sweep.
    ``start`` overrides the seeded ``(x0, y0)`` pair.
    """
    _check_primitive(M.A)
    x0, y0 = starting_vectors(M.size, seed) if start is None else start
    x0 = np.asarray(x0, dtype=np.float64) / np.max(x0)
    y0 = np.asarray(y0, dtype=np.float64) / np.sum(y0)
    lam, x, y, it, res_r, res_l, ok = kernels.power_loop(
        M.indptr, M.indices, M.data, x0, y0, float(tol), int(max_iter))
    if not ok:
        raise NoConvergence(max_iter, (float(res_r), float(res_l)))
    lam = float(lam)
    nu = y / y.sum()
    h = x / float(nu @ x)
    res_r = float(np.abs(apply(M, h) - lam * h).max())
    res_l = float(np.abs(apply_adjoint(M, nu) - lam * nu).sum())
    h.setflags(write=False)
    nu.setflags(write=False)
    return PerronData(lam, h, nu, res_r, res_l, int(it))


def lambda_by_iterate_norm(M, k_iter):
    """Growth rate of ``||M^k 1||_sup``: the ratio of its last two terms.

    Uses only the iterates of the constant function 1 (no eigen-iteration),
    with per-step renormalization so nothing overflows.  See
    ``iterate_norm_root`` for the plain ``||M^k 1||^(1/k)`` form, which
    converges to the same limit only like ``O(1/k)``.
    """
    if k_iter < 1:
        raise ValueError("k_iter must be >= 1")
    logs = kernels.iterate_log_norms(M.indptr, M.indices, M.data, int(k_iter))
    if k_iter == 1:
        return float(np.exp(logs[0]))
    return float(np.exp(logs[-1] - logs[-2]))


def iterate_norm_root(M, k_iter):
    """``||M^k 1||_sup ** (1/k)``."""
    if k_iter < 1:
        raise ValueError("k_iter must be >= 1")
    logs = kernels.iterate_log_norms(M.indptr, M.indices, M.data, int(k_iter))
    return float(np.exp(logs[-1] / k_iter))


def rpf_convergence_report(M, P, g, k_max):
    """``sup |lambda^-k M^k g - nu(g) h|`` for ``k = 1..k_max``."""
    g = np.asarray(g, dtype=np.float64)
    target = float(P.nu @ g) * P.h
    v = g
    devs = np.empty(k_max)
    for k in range(k_max):
        v = apply(M, v) / P.lam
        devs[k] = np.abs(v - target).max()
    return devs


# -- the algebraic identities behind the normalized operator -----------------

def lift(values, A, d, k):
    """Depth-``d`` table viewed on depth-``k`` cylinders (prefix map)."""
    if d == k:
        return np.asarray(values)
    return np.asarray(values)[enumerate_cylinders(A, k).prefix_index(d)]


def alpha(f, A, k):
    """``f o shift``: depth-(k-1) table to depth-k table."""
    space = enumerate_cylinders(A, k)
    return np.asarray(f)[enumerate_cylinders(A, k - 1).lookup(space.words[:, 1:])]


def restrict(g, A, k):
    """Depth-k table that ignores its last symbol, read as a depth-(k-1) table."""
    coarse = enumerate_cylinders(A, k - 1)
    reps = extend_words(A, coarse.words, k, rule="min")
    return np.asarray(g)[enumerate_cylinders(A, k).lookup(reps)]


def q_lifted(A, k):
    return q_function(A)[enumerate_cylinders(A, k).words[:, 0] - 1].astype(np.float64)


@dataclass
class IdentityResult:
    name: str
    passed: bool
    max_error: float
    witness: object = None


def algebra_identity_suite(A, k=2, trials=100, tol=1e-12, seed=0):
    """Check the shift endomorphism / normalized transfer operator identities.

    Works at depth ``k >= 2``: the unweighted operator maps depth-k tables to
    tables that ignore their last symbol, and the shift endomorphism raises
    depth-(k-1) tables to depth k, so every identity closes on depth k.
    Returns one ``IdentityResult`` per identity; ``witness`` holds the first
    violating random input.
    """
    if k < 2:
        raise ValueError("identity suite needs depth k >= 2")
    rng = np.random.default_rng(seed)
    fine = enumerate_cylinders(A, k)
    coarse = enumerate_cylinders(A, k - 1)
    L0 = build_transfer_matrix(A, None, k)
    Q = q_lifted(A, k)
    ones = np.ones(len(fine))

    def L(g):
        return apply(L0, g) / Q

    def E(g):
        return alpha(restrict(L(g), A, k), A, k)

    # independent word-by-word evaluation of f o shift
    coarse_words = coarse.word_list()

    def alpha_direct(f):
        table = dict(zip(coarse_words, f))
        return np.array([table[w[1:]] for w in fine.word_list()])

    out = {}

    def record(name, err, witness):
        prev = out.get(name)
        if prev is None:
            out[name] = IdentityResult(name, err <= tol, err, None if err <= tol else witness)
        else:
            if err > prev.max_error:
                prev.max_error = err
            if err > tol and prev.passed:
                prev.passed = False
                prev.witness = witness

    record("alpha(1) = 1", np.abs(alpha(np.ones(len(coarse)), A, k) - 1).max(), None)
    record("L(1) = Q", np.abs(apply(L0, ones) - Q).max(), None)
    record("normalized L(1) = 1", np.abs(L(ones) - 1).max(), None)
    for _ in range(trials):
        f = rng.random(len(coarse))
        g = rng.random(len(fine))
        record("alpha(f) = f o shift", np.abs(alpha(f, A, k) - alpha_direct(f)).max(), f)
        lhs = L(alpha(f, A, k) * g)
        rhs = lift(f, A, k - 1, k) * L(g)
        record("L(alpha(f) g) = f L(g)", np.abs(lhs - rhs).max(), (f, g))
        Eg = E(g)
        record("E(E(g)) = E(g)", np.abs(E(Eg) - Eg).max(), g)
        af = alpha(f, A, k)
        record("E(alpha(f)) = alpha(f)", np.abs(E(af) - af).max(), f)
    return list(out.values())


def index_identity_check(H, beta, k, trials=100, tol=1e-12, seed=0):
    """``Q^-1 L(H^-beta (Q o shift) f) = L(H^-beta f) = L_phi_beta(f)`` pointwise.

    This is the pointwise identity that lets ``Q o shift`` stand in for the
    index of the conditional expectation.  Returns ``(passed, max_error)``.
    """
    A = H.A
    if k < max(2, H.depth):
        raise DepthMismatch("index identity needs k >= max(2, depth of H)")
    rng = np.random.default_rng(seed)
    fine = enumerate_cylinders(A, k)
    L0 = build_transfer_matrix(A, None, k)
    Mphi = build_transfer_matrix(A, LocallyConstantPotential(A, H.depth, -beta * np.log(H.values)), k)
    Hpow = lift(H.values ** (-beta), A, H.depth, k)
    Q = q_lifted(A, k)
    Q_shift = q_function(A)[fine.words[:, 1] - 1].astype(np.float64)
    worst = 0.0
    for _ in range(trials):
        f = rng.random(len(fine))
        lhs = apply(L0, Hpow * Q_shift * f) / Q
        rhs = apply(L0, Hpow * f)
        worst = max(worst, float(np.abs(lhs - rhs).max()),
                    float(np.abs(rhs - apply(Mphi, f)).max()))
    return worst <= tol, worst
