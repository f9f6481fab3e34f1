"""Subshifts of finite type on a finite alphabet.

A subshift is described by a k x k transition matrix with 0/1 entries;
symbol ``j`` may follow symbol ``i`` exactly when ``matrix[i, j] == 1``.
Finite admissible words are plain tuples of ints.  Periodic points serve
as concrete stand-ins for points of the two-sided shift space.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ResourceLimit

# Exact enumerations refuse to materialize more words than this.
WORD_ENUMERATION_LIMIT = 10**7


class Sft:
    """Subshift of finite type with alphabet {0, ..., k-1}.

    Parameters
    ----------
    matrix : array-like
        Square 0/1 transition matrix.  Every row and every column must
        contain at least one 1, so every symbol occurs in a bi-infinite
        admissible sequence.

    Instances are immutable after construction (word caches are internal
    memoization only) and safe to share between threads.
    """

    def __init__(self, matrix):
        mat = np.asarray(matrix, dtype=np.int64)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("transition matrix must be square")
        if not np.isin(mat, (0, 1)).all():
            raise ValueError("transition matrix entries must be 0 or 1")
        if (mat.sum(axis=1) == 0).any() or (mat.sum(axis=0) == 0).any():
            raise ValueError("every symbol needs an outgoing and an incoming transition")
        self.matrix = mat
        self.matrix.setflags(write=False)
        self.k = mat.shape[0]
        self.successors = tuple(
            tuple(int(j) for j in np.nonzero(mat[i])[0]) for i in range(self.k)
        )
        self.primitive = self._check_primitive()
        self._word_cache = {}

    @classmethod
    def full_shift(cls, k):
        return cls(np.ones((k, k), dtype=int))

    @classmethod
    def golden_mean(cls):
        """Two symbols, the word 11 forbidden."""
        return cls([[1, 1], [1, 0]])

    def _check_primitive(self):
        # Repeated boolean squaring; for a primitive matrix some power at
        # most k^2 - 2k + 2 is entrywise positive, and positivity persists
        # under further multiplication, so checking powers 2^j up to k^2
        # is conclusive.
        power = self.matrix.astype(bool)
        exponent = 1
        while True:
            if power.all():
                return True
            if exponent >= self.k * self.k:
                return False
            power = power @ power
            exponent *= 2

    def __eq__(self, other):
        return isinstance(other, Sft) and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.k, self.matrix.tobytes()))

    def __repr__(self):
        rows = ",".join("".join(str(int(v)) for v in row) for row in self.matrix)
        return f"Sft([{rows}])"

    def is_admissible(self, word):
        """True when every consecutive transition in ``word`` is allowed."""
        if any(not 0 <= s < self.k for s in word):
            return False
        return all(self.matrix[a, b] for a, b in zip(word, word[1:]))

    def word_count(self, n):
        """Number of admissible words of length ``n`` (exact integer)."""
        if n < 1:
            raise ValueError("word length must be >= 1")
        rows = [[int(v) for v in row] for row in self.matrix]
        acc = [[1 if i == j else 0 for j in range(self.k)] for i in range(self.k)]
        for _ in range(n - 1):
            acc = _int_matmul(acc, rows)
        return sum(sum(row) for row in acc)

    def words(self, n):
        """All admissible words of length ``n`` in lexicographic order."""
        if n < 1:
            raise ValueError("word length must be >= 1")
        cached = self._word_cache.get(n)
        if cached is not None:
            return cached
        if self.word_count(n) > WORD_ENUMERATION_LIMIT:
            raise ResourceLimit(f"more than {WORD_ENUMERATION_LIMIT} words of length {n}")
        out = [(s,) for s in range(self.k)]
        for _ in range(n - 1):
            out = [w + (s,) for w in out for s in self.successors[w[-1]]]
        out = tuple(out)
        self._word_cache[n] = out
        return out

    def extend_word(self, word, length):
        """Extend ``word`` to ``length`` symbols with least admissible successors."""
        out = list(word)
        while len(out) < length:
            out.append(self.successors[out[-1]][0])
        return tuple(out)

    def periodic_points(self, n):
        """All periodic points whose cycle has length ``n`` (period divides n).

        The number of results equals trace(matrix^n).
        """
        pts = []
        for w in self.words(n):
            if self.matrix[w[-1], w[0]]:
                pts.append(PeriodicPoint(self, w))
        return tuple(pts)

    def periodic_points_up_to(self, n_max):
        """Periodic points with minimal period <= n_max, one per cycle phase."""
        out = []
        for n in range(1, n_max + 1):
            out.extend(p for p in self.periodic_points(n) if p.minimal_period == n)
        return tuple(out)


def _int_matmul(a, b):
    k = len(a)
    return [
        [sum(a[i][m] * b[m][j] for m in range(k)) for j in range(k)]
        for i in range(k)
    ]


class PeriodicPoint:
    """Bi-infinite sequence repeating an admissible cycle.

    ``symbol(i)`` is defined for every integer index i, positive or not.
    """

    def __init__(self, sft, cycle):
        cycle = tuple(int(s) for s in cycle)
        if not sft.is_admissible(cycle):
            raise ValueError(f"cycle {cycle} is not an admissible word")
        if not sft.matrix[cycle[-1], cycle[0]]:
            raise ValueError(f"cycle {cycle} does not close up")
        self.sft = sft
        self.cycle = cycle
        self.period = len(cycle)
        self.minimal_period = _minimal_period(cycle)

    def symbol(self, i):
        return self.cycle[i % self.period]

    def window(self, start, length):
        return tuple(self.symbol(start + j) for j in range(length))

    def stream(self, offset=0):
        return PeriodicStream(self.cycle, offset)

    def __repr__(self):
        return f"PeriodicPoint({''.join(map(str, self.cycle))})"

    def __eq__(self, other):
        if not isinstance(other, PeriodicPoint) or self.sft != other.sft:
            return NotImplemented
        length = math.lcm(self.period, other.period)
        return self.window(0, length) == other.window(0, length)

    def __hash__(self):
        p = self.minimal_period
        return hash((min(self.cycle[i:] + self.cycle[:i] for i in range(p)), p))


def _minimal_period(cycle):
    n = len(cycle)
    for p in range(1, n + 1):
        if n % p == 0 and cycle == cycle[p:] + cycle[:p]:
            return p
    return n


def cylinder_metric(x, y, beta=2.0):
    """Distance beta**(-n) between periodic points of a common subshift.

    n is the smallest index with ``x.symbol(n) != y.symbol(n)`` or
    ``x.symbol(-n) != y.symbol(-n)``; coinciding sequences are at
    distance 0.  Requires ``beta > 1``.
    """
    if not isinstance(x, PeriodicPoint) or not isinstance(y, PeriodicPoint):
        raise ValueError("cylinder_metric expects periodic points")
    if x.sft != y.sft:
        raise ValueError("points live on different subshifts")
    if beta <= 1.0:
        raise ValueError("beta must exceed 1")
    horizon = math.lcm(x.period, y.period)
    for n in range(horizon + 1):
        if x.symbol(n) != y.symbol(n) or x.symbol(-n) != y.symbol(-n):
            return float(beta) ** (-n)
    return 0.0


class SymbolStream:
    """Read-only cursor into a one-sided symbol sequence."""

    def window(self, length):
        raise NotImplementedError

    def shifted(self, steps=1):
        raise NotImplementedError


class PeriodicStream(SymbolStream):
    def __init__(self, cycle, offset=0):
        self.cycle = tuple(cycle)
        self.offset = offset % len(self.cycle)

    def window(self, length):
        p = len(self.cycle)
        return tuple(self.cycle[(self.offset + j) % p] for j in range(length))

    def shifted(self, steps=1):
        return PeriodicStream(self.cycle, self.offset + steps)

    def __repr__(self):
        return f"PeriodicStream({''.join(map(str, self.cycle))}@{self.offset})"


class WordStream(SymbolStream):
    """Cursor into a finite word; reading past the end raises ValueError."""

    def __init__(self, word, offset=0):
        self.word = tuple(word)
        self.offset = offset

    def window(self, length):
        if self.offset + length > len(self.word):
            raise ValueError("word stream exhausted")
        return self.word[self.offset : self.offset + length]

    def shifted(self, steps=1):
        return WordStream(self.word, self.offset + steps)

    def __repr__(self):
        return f"WordStream({''.join(map(str, self.word))}@{self.offset})"
