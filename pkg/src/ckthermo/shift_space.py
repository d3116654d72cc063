"""Combinatorics of the one-sided subshift of finite type.

Symbols are 1-based everywhere in the public API: a word is a tuple of ints
in ``1..n``.  Internally cylinders are also encoded as base-``n`` integers of
their 0-based digits, which makes lexicographic order numeric order.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import (CapacityExceeded, InadmissibleWord, NonBinaryEntry,
                     NotSquare, ValidationError, ZeroColumn, ZeroRow)

DEFAULT_CAPACITY = 10**6


class ZeroOneMatrix:
    """The transition matrix ``A``; construction validates it."""

    __slots__ = ("entries", "n")

    def __init__(self, entries):
        arr = np.asarray(entries)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise NotSquare(f"matrix must be square and nonempty, got shape {arr.shape}")
        validate_matrix(arr)
        self.entries = arr.astype(np.int64)
        self.entries.setflags(write=False)
        self.n = arr.shape[0]

    @classmethod
    def from_rows(cls, rows):
        """Build from row strings such as ``["11", "10"]``."""
        if isinstance(rows, str):
            raise NotSquare("matrix rows must be a list of strings")
        n = len(rows)
        out = []
        for i, row in enumerate(rows, start=1):
            row = str(row).strip()
            if len(row) != n:
                raise NotSquare(f"row {i} has length {len(row)}, expected {n}")
            vals = []
            for j, ch in enumerate(row, start=1):
                if ch not in "01":
                    raise NonBinaryEntry(i, j, ch)
                vals.append(int(ch))
            out.append(vals)
        return cls(out)

    def to_rows(self):
        return ["".join(str(int(v)) for v in row) for row in self.entries]

    def allowed(self, a, b):
        return bool(self.entries[a - 1, b - 1])

    def __eq__(self, other):
        return isinstance(other, ZeroOneMatrix) and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())

    def __repr__(self):
        return f"ZeroOneMatrix({self.to_rows()!r})"


def validate_matrix(A):
    """Raise if ``A`` is not a valid transition matrix, else return True.

    Checks run in order: entries, then rows, then columns; the first offender
    (1-based) is reported.
    """
    arr = A.entries if isinstance(A, ZeroOneMatrix) else np.asarray(A)
    bad = np.argwhere((arr != 0) & (arr != 1))
    if bad.size:
        i, j = bad[0]
        raise NonBinaryEntry(int(i) + 1, int(j) + 1, arr[i, j].item())
    rows = np.flatnonzero(arr.sum(axis=1) == 0)
    if rows.size:
        raise ZeroRow(int(rows[0]) + 1)
    cols = np.flatnonzero(arr.sum(axis=0) == 0)
    if cols.size:
        raise ZeroColumn(int(cols[0]) + 1)
    return True


def wielandt_bound(n):
    return n * n - 2 * n + 2


def primitivity_exponent(A, m_max=None):
    """Least ``m <= m_max`` with ``A**m > 0`` entrywise, or None if not primitive.

    ``m_max`` defaults to the Wielandt bound ``n^2 - 2n + 2``, which is
    sufficient for every primitive matrix.
    """
    B = A.entries.astype(bool)
    if m_max is None:
        m_max = wielandt_bound(A.n)
    P = B.copy()
    for m in range(1, m_max + 1):
        if P.all():
            return m
        P = (P.astype(np.int64) @ B.astype(np.int64)) > 0
    return None


def is_primitive(A):
    return primitivity_exponent(A) is not None


def is_admissible(A, word):
    for a, b in zip(word, word[1:]):
        if not (1 <= a <= A.n and 1 <= b <= A.n) or not A.entries[a - 1, b - 1]:
            return False
    return all(1 <= s <= A.n for s in word)


def check_admissible(A, word):
    if not is_admissible(A, word):
        raise InadmissibleWord(word)


def count_words(A, k):
    """Number of admissible words of length ``k`` (exact Python int)."""
    if k == 0:
        return 1
    E = [[int(v) for v in row] for row in A.entries]
    counts = [1] * A.n
    for _ in range(k - 1):
        counts = [sum(counts[b] for b in range(A.n) if E[a][b]) for a in range(A.n)]
    return sum(counts)


def encode(words, n):
    """Base-n code of 1-based words (rows of a 2-D int array)."""
    words = np.asarray(words, dtype=np.int64)
    code = np.zeros(words.shape[0], dtype=np.int64)
    for col in range(words.shape[1]):
        code = code * n + (words[:, col] - 1)
    return code


@dataclass(frozen=True)
class CylinderSpace:
    """All admissible words of one length, in lexicographic order."""

    A: ZeroOneMatrix
    depth: int
    words: np.ndarray = field(repr=False)
    codes: np.ndarray = field(repr=False)

    def __len__(self):
        return self.words.shape[0]

    def word(self, i):
        return tuple(int(s) for s in self.words[i])

    def word_list(self):
        return [self.word(i) for i in range(len(self))]

    def index(self, word):
        word = tuple(word)
        if len(word) != self.depth:
            raise InadmissibleWord(word)
        code = int(encode([word], self.A.n)[0]) if all(1 <= s <= self.A.n for s in word) else -1
        pos = int(np.searchsorted(self.codes, code))
        if code < 0 or pos >= len(self) or self.codes[pos] != code:
            raise InadmissibleWord(word)
        return pos

    def lookup(self, words):
        """Vectorized ``index`` for a 2-D array of admissible words."""
        return np.searchsorted(self.codes, encode(words, self.A.n))

    def prefix_index(self, d):
        """Position of each word's length-``d`` prefix in the depth-``d`` space."""
        return enumerate_cylinders(self.A, d).lookup(self.words[:, :d])

    def __contains__(self, word):
        try:
            self.index(word)
        except InadmissibleWord:
            return False
        return True


_CACHE = {}


def enumerate_cylinders(A, k, capacity=DEFAULT_CAPACITY):
    """Admissible words of length ``k`` in lexicographic order."""
    if k < 1:
        raise ValueError("cylinder depth must be >= 1")
    key = (A, k)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    total = count_words(A, k)
    if total > capacity or A.n ** k >= 2**62:
        # the second test keeps base-n codes inside int64
        raise CapacityExceeded(total, capacity)
    E = A.entries.astype(bool)
    words = np.arange(1, A.n + 1, dtype=np.int64)[:, None]
    for _ in range(k - 1):
        rows, syms = np.nonzero(E[words[:, -1] - 1])
        words = np.column_stack([words[rows], syms + 1])
    words.setflags(write=False)
    codes = encode(words, A.n)
    codes.setflags(write=False)
    space = CylinderSpace(A, k, words, codes)
    if len(_CACHE) > 256:
        _CACHE.clear()
    _CACHE[key] = space
    return space


def q_function(A):
    """Number of shift-preimages of a point, as a function of its first symbol.

    Equals the column sums of ``A``; returned 0-based (entry ``j-1`` is Q on
    the cylinder ``[j]``).
    """
    return A.entries.sum(axis=0).astype(np.int64)


def extend_to_point(A, word, length):
    """Greedy admissible extension: append the smallest allowed symbol."""
    word = tuple(word)
    if not word:
        raise ValueError("cannot extend the empty word")
    check_admissible(A, word)
    if length < len(word):
        raise ValueError("target length shorter than word")
    out = list(word)
    while len(out) < length:
        out.append(int(np.flatnonzero(A.entries[out[-1] - 1])[0]) + 1)
    return tuple(out)


def extend_words(A, words, length, rule="min"):
    """Vectorized greedy extension of a 2-D word array (``rule`` = min or max)."""
    words = np.asarray(words, dtype=np.int64)
    E = A.entries.astype(bool)
    if rule == "min":
        nxt = np.argmax(E, axis=1) + 1
    else:
        nxt = A.n - np.argmax(E[:, ::-1], axis=1)
    cols = [words[:, i] for i in range(words.shape[1])]
    while len(cols) < length:
        cols.append(nxt[cols[-1] - 1])
    return np.column_stack(cols) if cols else words


def random_extensions(A, words, length, rng):
    """Uniformly random admissible continuation of each row of ``words``."""
    words = np.asarray(words, dtype=np.int64)
    E = A.entries.astype(bool)
    choices = [np.flatnonzero(E[a]) + 1 for a in range(A.n)]
    out = [list(map(int, w)) for w in words]
    for w in out:
        while len(w) < length:
            opts = choices[w[-1] - 1]
            w.append(int(opts[rng.integers(len(opts))]))
    return np.asarray(out, dtype=np.int64).reshape(len(out), max(length, words.shape[1]))


def format_word(word):
    return ",".join(str(s) for s in word) if word else "e"


def parse_word(text):
    text = text.strip()
    if text in ("", "e"):
        return ()
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise ValidationError(f"bad word syntax {text!r}") from None
