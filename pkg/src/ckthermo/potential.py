"""Locally constant potentials: discretization, range, ``-beta log H``, Hölder checks."""
import math
from dataclasses import dataclass, field

import numpy as np

from . import expression as ex
from .errors import DepthMismatch, HNotExceedingOne, NonPositivePotential, ValidationError
from .shift_space import (enumerate_cylinders, extend_words, format_word,
                          random_extensions)


@dataclass(frozen=True)
class LocallyConstantPotential:
    """A real function constant on every depth-``depth`` cylinder."""

    A: object
    depth: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        space = enumerate_cylinders(self.A, self.depth)
        if vals.shape != (len(space),):
            raise DepthMismatch(f"expected {len(space)} values for depth {self.depth}, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("potential values must be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def space(self):
        return enumerate_cylinders(self.A, self.depth)

    @classmethod
    def constant(cls, A, c, depth=1):
        return cls(A, depth, np.full(len(enumerate_cylinders(A, depth)), float(c)))

    @classmethod
    def from_table(cls, A, table, depth=None):
        """Build from ``{word: value}``; every admissible word must be present."""
        table = {tuple(w): float(v) for w, v in table.items()}
        depths = {len(w) for w in table}
        if depth is None:
            if len(depths) != 1:
                raise DepthMismatch("table words must share one length")
            depth = depths.pop()
        space = enumerate_cylinders(A, depth)
        missing = [w for w in space.word_list() if w not in table]
        extra = [w for w in table if w not in space]
        if missing or extra:
            bad = (missing or extra)[0]
            what = "missing" if missing else "not an admissible depth-%d word" % depth
            raise ValidationError(f"potential table: cylinder [{format_word(bad)}] {what}")
        return cls(A, depth, np.array([table[w] for w in space.word_list()]))

    def refine(self, k):
        """The same function tabulated on depth-``k`` cylinders (``k >= depth``)."""
        if k < self.depth:
            raise DepthMismatch(f"cannot refine depth {self.depth} potential to depth {k}")
        if k == self.depth:
            return self
        fine = enumerate_cylinders(self.A, k)
        return LocallyConstantPotential(self.A, k, self.values[fine.prefix_index(self.depth)])

    def __call__(self, word):
        return float(self.values[self.space.index(tuple(word)[: self.depth])])

    def as_table(self):
        return {w: float(v) for w, v in zip(self.space.word_list(), self.values)}


def discretize(expr, A, d):
    """Tabulate ``expr`` on depth-``d`` cylinders at their greedy representative points."""
    if isinstance(expr, str):
        expr = ex.parse_potential(expr)
    space = enumerate_cylinders(A, d)
    points = extend_words(A, space.words, max(d, ex.depth(expr)), rule="min")
    return LocallyConstantPotential(A, d, ex.evaluate(expr, points))


def range_and_positivity(H):
    """``(min, max, min > 1)`` over the table."""
    m = float(H.values.min())
    M = float(H.values.max())
    return m, M, m > 1.0


def require_exceeds_one(H):
    m, M, ok = range_and_positivity(H)
    if not ok:
        raise HNotExceedingOne(m)
    return m, M


def phi_beta(H, beta):
    """``-beta * log(H)`` per cylinder."""
    if np.any(H.values <= 0):
        i = int(np.flatnonzero(H.values <= 0)[0])
        raise NonPositivePotential(f"H <= 0 on cylinder [{format_word(H.space.word(i))}]")
    return LocallyConstantPotential(H.A, H.depth, -float(beta) * np.log(H.values))


@dataclass(frozen=True)
class HolderDiagnostic:
    theta: float
    exponent: float
    constant: float
    samples: int
    oscillations: tuple


def holder_diagnostic(expr, A, theta=0.5, d_max=8, n_random=4, seed=0):
    """Fit ``osc_d ~ K theta**(eta d)`` over depths ``1..d_max``.

    ``osc_d`` is the largest spread of ``expr`` inside one depth-d cylinder,
    sampled at the greedy-min, greedy-max and a few seeded random points.
    Advisory only.  A function with no oscillation at any depth is reported
    with ``constant = 0`` and ``exponent = inf``.
    """
    if isinstance(expr, str):
        expr = ex.parse_potential(expr)
    if not 0.0 < theta < 1.0:
        raise ValidationError("theta must lie in (0, 1)")
    if d_max < 2:
        raise ValidationError("d_max must be >= 2")
    rng = np.random.default_rng(seed)
    L = max(ex.depth(expr), d_max) + 1
    oscs = []
    samples = 0
    for d in range(1, d_max + 1):
        words = enumerate_cylinders(A, d).words
        vals = [ex.evaluate(expr, extend_words(A, words, L, rule)) for rule in ("min", "max")]
        for _ in range(n_random):
            vals.append(ex.evaluate(expr, random_extensions(A, words, L, rng)))
        V = np.vstack(vals)
        samples += V.size
        oscs.append(float((V.max(axis=0) - V.min(axis=0)).max()))
    oscs = np.array(oscs)
    depths = np.arange(1, d_max + 1)
    keep = oscs > 0
    if not keep.any():
        return HolderDiagnostic(theta, math.inf, 0.0, samples, tuple(oscs.tolist()))
    if keep.sum() == 1:
        # one point cannot fix a slope; the function is locally constant beyond it
        return HolderDiagnostic(theta, math.inf, float(oscs[keep][0] / theta ** depths[keep][0]),
                                samples, tuple(oscs.tolist()))
    x = depths[keep] * math.log(theta)
    slope, intercept = np.polyfit(x, np.log(oscs[keep]), 1)
    return HolderDiagnostic(theta, float(max(slope, 0.0)), float(math.exp(intercept)),
                            samples, tuple(oscs.tolist()))
