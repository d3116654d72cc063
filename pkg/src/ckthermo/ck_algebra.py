"""Word calculus on the dense span of ``S_mu S_rho*`` in the Cuntz-Krieger algebra.

Reduction uses the Cuntz-Krieger relations

    S_i* S_j = 0 (i != j),   S_i* S_i = sum_k A[i,k] S_k S_k*,   sum_k S_k S_k* = 1.

The span has linear relations (``S_mu S_rho* = sum_k S_{mu k} S_{rho k}*``
over the symbols k allowed after both words), so elements are kept in a
normal form: within each degree ``|mu| - |rho|`` every term is expanded to a
common length and then families of children with equal coefficients are
folded back into their parent, bottom-up.  Two elements are equal iff their
normal forms coincide.
"""
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import InadmissibleWord, ValidationError
from .shift_space import (check_admissible, enumerate_cylinders, format_word,
                          is_admissible, parse_word)


class Monomial(NamedTuple):
    left: tuple
    right: tuple

    def __str__(self):
        return f"{format_word(self.left)}|{format_word(self.right)}"

    def adjoint(self):
        return Monomial(self.right, self.left)


def _gate(E, word, k):
    return not word or E[word[-1] - 1][k - 1]


def _followers(E, n, left, right):
    return [k for k in range(1, n + 1) if _gate(E, left, k) and _gate(E, right, k)]


def is_nonzero(A, mono):
    """Both words admissible and some symbol may follow both of them."""
    left, right = mono
    if not (is_admissible(A, left) and is_admissible(A, right)):
        return False
    if not left or not right:
        return True
    E = A.entries
    return any(E[left[-1] - 1, k] and E[right[-1] - 1, k] for k in range(A.n))


def _normal_form(A, terms):
    E = A.entries.tolist()
    n = A.n
    groups = defaultdict(dict)
    for mono, c in terms.items():
        if c == 0 or not is_nonzero(A, mono):
            continue
        mono = Monomial(tuple(mono[0]), tuple(mono[1]))
        groups[len(mono.left) - len(mono.right)][mono] = c
    out = {}
    for group in groups.values():
        level = max(min(len(l), len(r)) for l, r in group)
        flat = defaultdict(complex)
        for mono, c in group.items():
            stack = [mono]
            while stack:
                l, r = stack.pop()
                if min(len(l), len(r)) == level:
                    flat[Monomial(l, r)] += c
                else:
                    stack.extend((l + (k,), r + (k,)) for k in _followers(E, n, l, r))
        flat = {m: c for m, c in flat.items() if c != 0}
        for lv in range(level, 0, -1):
            families = defaultdict(dict)
            for (l, r), c in flat.items():
                if min(len(l), len(r)) == lv and l[-1] == r[-1]:
                    families[(l[:-1], r[:-1])][l[-1]] = c
            for (pl, pr), kids in families.items():
                coeffs = set(kids.values())
                if len(coeffs) == 1 and sorted(kids) == _followers(E, n, pl, pr):
                    for k in kids:
                        del flat[Monomial(pl + (k,), pr + (k,))]
                    flat[Monomial(pl, pr)] = coeffs.pop()
        out.update(flat)
    return tuple(sorted(out.items(), key=lambda t: (t[0].left, t[0].right)))


def _mono_product(E, n, m1, m2):
    """Monomials (all with coefficient 1) whose sum is ``m1 * m2``."""
    mu, rho = m1
    sig, tau = m2
    if len(sig) >= len(rho) and sig[: len(rho)] == rho:
        u = sig[len(rho):]
        if not u:
            if not rho:
                return [(mu, tau)]
            r = rho[-1]
            return [(mu + (k,), tau + (k,)) for k in range(1, n + 1)
                    if E[r - 1][k - 1] and _gate(E, mu, k) and _gate(E, tau, k)]
        if not (_gate(E, rho, u[0]) and _gate(E, mu, u[0])):
            return []
        return [(mu + u, tau)]
    if len(rho) > len(sig) and rho[: len(sig)] == sig:
        u = rho[len(sig):]
        if not (_gate(E, sig, u[0]) and _gate(E, tau, u[0])):
            return []
        return [(mu, tau + u)]
    return []


class CKElement:
    """Finite linear combination of monomials, stored in normal form."""

    __slots__ = ("A", "terms", "_hash")

    def __init__(self, A, terms=()):
        self.A = A
        if isinstance(terms, dict):
            terms = terms.items()
        acc = defaultdict(complex)
        for mono, c in terms:
            acc[Monomial(tuple(mono[0]), tuple(mono[1]))] += complex(c)
        self.terms = _normal_form(A, acc)
        self._hash = None

    # constructors ----------------------------------------------------------
    @classmethod
    def unit(cls, A):
        return cls(A, {((), ()): 1})

    @classmethod
    def zero(cls, A):
        return cls(A)

    @classmethod
    def monomial(cls, A, left=(), right=(), coeff=1):
        left, right = tuple(left), tuple(right)
        check_admissible(A, left)
        check_admissible(A, right)
        return cls(A, {(left, right): coeff})

    @classmethod
    def S(cls, A, j):
        return cls.monomial(A, (j,), ())

    @classmethod
    def S_star(cls, A, j):
        return cls.monomial(A, (), (j,))

    @classmethod
    def P(cls, A, j):
        return cls.monomial(A, (j,), (j,))

    @classmethod
    def parse(cls, A, text, coeff=1):
        """Monomial from ``"mu|rho"`` syntax, e.g. ``"1,2|1,2"`` or ``"1|e"``."""
        if text.count("|") != 1:
            raise ValidationError(f"monomial {text!r} must look like 'mu|rho'")
        left, right = text.split("|")
        return cls.monomial(A, parse_word(left), parse_word(right), coeff)

    # algebra ---------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, CKElement):
            if other.A != self.A:
                raise ValidationError("elements over different matrices")
            return other
        return CKElement(self.A, {((), ()): other})

    def __add__(self, other):
        other = self._coerce(other)
        return CKElement(self.A, list(self.terms) + list(other.terms))

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c):
        return CKElement(self.A, [(m, c * v) for m, v in self.terms])

    def __mul__(self, other):
        if isinstance(other, CKElement):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        return isinstance(other, CKElement) and self.A == other.A and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.A, self.terms))
        return self._hash

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "CKElement(0)"
        return "CKElement(" + " + ".join(f"({c:g})*[{m}]" for m, c in self.terms) + ")"

    def adjoint(self):
        return adjoint(self)

    def coefficient(self, left, right):
        for m, c in self.terms:
            if m == (tuple(left), tuple(right)):
                return c
        return 0j

    def serialize(self):
        return [{"left": format_word(m.left), "right": format_word(m.right),
                 "re": c.real, "im": c.imag} for m, c in self.terms]


def multiply(a, b):
    """Bilinear product, re-normalized."""
    if a.A != b.A:
        raise ValidationError("elements over different matrices")
    E = a.A.entries.tolist()
    n = a.A.n
    acc = defaultdict(complex)
    for m1, c1 in a.terms:
        for m2, c2 in b.terms:
            for mono in _mono_product(E, n, m1, m2):
                acc[mono] += c1 * c2
    return CKElement(a.A, acc)


def adjoint(a):
    return CKElement(a.A, [(m.adjoint(), c.conjugate()) for m, c in a.terms])


def embed_function(A, values, k):
    """``sum_w f(w) S_w S_w*`` over the depth-k cylinders."""
    space = enumerate_cylinders(A, k)
    values = np.asarray(values)
    if values.shape != (len(space),):
        raise ValidationError(f"expected {len(space)} values for depth {k}")
    return CKElement(A, [((w, w), v) for w, v in zip(space.word_list(), values.tolist())])


def expectation_G(a):
    """Keep the diagonal terms ``S_mu S_mu*``."""
    return CKElement(a.A, [(m, c) for m, c in a.terms if m.left == m.right])


# one-parameter groups ---------------------------------------------------------

@lru_cache(maxsize=256)
def _generator_images(H_key, z):
    A, depth, values = H_key
    logH = np.log(np.asarray(values))
    f_pos = np.exp(1j * z * logH)   # H^{iz}
    f_neg = np.exp(-1j * z * logH)  # H^{-iz}
    left = embed_function(A, f_pos, depth)
    right = embed_function(A, f_neg, depth)
    imgs = {}
    for j in range(1, A.n + 1):
        imgs[(j, False)] = multiply(left, CKElement.S(A, j))
        imgs[(j, True)] = multiply(CKElement.S_star(A, j), right)
    return imgs


def _h_key(H):
    return (H.A, H.depth, tuple(H.values.tolist()))


def flow(a, H, z):
    """``S_j -> H^{iz} S_j`` extended multiplicatively; ``z`` may be complex.

    Real ``z = t`` is the gauge action; ``z = i beta`` is its analytic
    continuation ``sigma_{i beta}``: ``S_j -> H^-beta S_j`` and
    ``S_j* -> S_j* H^beta``.
    """
    if np.any(H.values <= 0):
        raise ValidationError("H must be strictly positive")
    z = complex(z)
    if z == 0:
        return a
    imgs = _generator_images(_h_key(H), z)
    A = a.A
    total = defaultdict(complex)
    cache = {}
    for mono, c in a.terms:
        key = mono
        img = cache.get(key)
        if img is None:
            img = CKElement.unit(A)
            for j in mono.left:
                img = multiply(img, imgs[(j, False)])
            for j in reversed(mono.right):
                img = multiply(img, imgs[(j, True)])
            cache[key] = img
        for m, v in img.terms:
            total[m] += c * v
    return CKElement(A, total)


def gauge_action(a, H, t):
    return flow(a, H, float(t))


def modular_flow(a, H, beta):
    return flow(a, H, 1j * float(beta))


# the eigenmeasure on cylinders ------------------------------------------------

@dataclass(frozen=True)
class CylinderMeasure:
    """Measure of every cylinder from a depth-k Perron left vector.

    Short words sum the base over their extensions; long words use
    ``nu[w] = lambda^-1 exp(phi(w[:d])) nu[w[1:]]``.
    """

    A: object
    base_depth: int
    base: np.ndarray = field(repr=False)
    lam: float
    phi: object = field(repr=False)

    def __post_init__(self):
        if self.phi.depth > self.base_depth:
            raise ValidationError("potential depth exceeds the measure's base depth")
        base = np.asarray(self.base, dtype=np.float64)
        if not np.isclose(base.sum(), 1.0, rtol=0, atol=1e-12):
            raise ValidationError("base measure must sum to 1")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "_coarse", {})

    @classmethod
    def from_perron(cls, P, phi, k=None):
        A = phi.A
        if k is None:
            # cylinder counts strictly increase with depth once n >= 2
            k = next(d for d in range(phi.depth, 64) if len(enumerate_cylinders(A, d)) == len(P.nu))
        return cls(A, k, P.nu, P.lam, phi)

    def aggregated(self, j):
        """The base summed down to depth ``j <= base_depth``."""
        hit = self._coarse.get(j)
        if hit is None:
            fine = enumerate_cylinders(self.A, self.base_depth)
            idx = fine.prefix_index(j)
            hit = np.bincount(idx, self.base, minlength=len(enumerate_cylinders(self.A, j)))
            self._coarse[j] = hit
        return hit

    def __call__(self, word):
        word = tuple(word)
        check_admissible(self.A, word)
        if not word:
            return 1.0
        k = self.base_depth
        if len(word) <= k:
            vals = self.base if len(word) == k else self.aggregated(len(word))
            return float(vals[enumerate_cylinders(self.A, len(word)).index(word)])
        d = self.phi.depth
        factor = 1.0
        while len(word) > k:
            factor *= np.exp(self.phi(word[:d])) / self.lam
            word = word[1:]
        return float(factor * self.base[enumerate_cylinders(self.A, k).index(word)])


def cylinder_measure(P, phi, word, k=None):
    return CylinderMeasure.from_perron(P, phi, k)(word)


def kms_state(a, measure):
    """``nu o G``: sum of ``c * nu([mu])`` over the diagonal terms."""
    return complex(sum(c * measure(m.left) for m, c in a.terms if m.left == m.right))


@dataclass(frozen=True)
class KMSMargin:
    lhs: complex
    rhs: complex
    margin: float
    passed: bool


def kms_condition_check(a, b, H, beta, measure, tol=1e-7):
    """Compare ``psi(a b)`` with ``psi(b sigma_{i beta}(a))``."""
    lhs = kms_state(multiply(a, b), measure)
    rhs = kms_state(multiply(b, modular_flow(a, H, beta)), measure)
    margin = abs(lhs - rhs)
    return KMSMargin(lhs, rhs, margin, margin <= tol)


def random_word(A, rng, max_len):
    length = int(rng.integers(0, max_len + 1))
    if length == 0:
        return ()
    word = [int(rng.integers(1, A.n + 1))]
    E = A.entries
    while len(word) < length:
        opts = np.flatnonzero(E[word[-1] - 1]) + 1
        word.append(int(opts[rng.integers(len(opts))]))
    return tuple(word)


def random_monomial(A, rng, max_len=4):
    while True:
        mono = Monomial(random_word(A, rng, max_len), random_word(A, rng, max_len))
        if is_nonzero(A, mono):
            return CKElement(A, {mono: 1})


def kms_suite(A, H, beta, measure, pairs=200, max_len=4, tol=1e-7, seed=0):
    """``kms_condition_check`` on seeded random monomial pairs; list of margins."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(pairs):
        a = random_monomial(A, rng, max_len)
        b = random_monomial(A, rng, max_len)
        out.append(kms_condition_check(a, b, H, beta, measure, tol))
    return out


__all__ = [
    "CKElement", "CylinderMeasure", "InadmissibleWord", "KMSMargin", "Monomial",
    "adjoint", "cylinder_measure", "embed_function", "expectation_G", "flow",
    "gauge_action", "is_nonzero", "kms_condition_check", "kms_state", "kms_suite",
    "modular_flow", "multiply", "random_monomial", "random_word",
]
