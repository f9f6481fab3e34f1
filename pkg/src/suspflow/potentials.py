"""Locally constant functions and sequences of potentials on a subshift.

A locally constant function of depth m is a table of values over admissible
m-words; it reads the first m symbols of any longer word.  Potential
families assign to each n >= 1 a function f_n of finitely many symbols and
come in three flavors, ordered by how much structure they carry:

* additive: f_n is the Birkhoff sum of a fixed generator,
* almost additive: f_{m+n} differs from f_m + f_n . shift^m by a bounded
  amount (matrix cocycles with entrywise positive matrices qualify),
* asymptotically additive: only the normalized approximation behavior
  is assumed.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ResourceLimit
from .sft import WORD_ENUMERATION_LIMIT, SymbolStream


class LocallyConstantFunction:
    """Real function on the shift space determined by the first ``depth`` symbols.

    Parameters
    ----------
    sft : Sft
        Underlying subshift.
    depth : int
        Number of leading symbols the function reads.
    values : dict
        Map from every admissible ``depth``-word (tuple) to a float.  The
        table must be total; missing or extra words are rejected.
    """

    def __init__(self, sft, depth, values):
        if depth < 1:
            raise ValueError("depth must be >= 1")
        words = sft.words(depth)
        table = {w: float(values[w]) for w in words if w in values}
        if len(table) != len(words):
            missing = [w for w in words if w not in values]
            raise ValueError(f"value table is not total; missing {missing[:4]}")
        if len(values) != len(words):
            raise ValueError("value table mentions inadmissible words")
        self.sft = sft
        self.depth = depth
        self.values = table

    @classmethod
    def constant(cls, sft, value, depth=1):
        return cls(sft, depth, {w: value for w in sft.words(depth)})

    @classmethod
    def from_callable(cls, sft, depth, fn):
        return cls(sft, depth, {w: fn(w) for w in sft.words(depth)})

    def __call__(self, word):
        if len(word) < self.depth:
            raise ValueError(f"need at least {self.depth} symbols, got {len(word)}")
        return self.values[tuple(word[: self.depth])]

    def refine(self, depth):
        """Same function represented on ``depth``-cylinders, depth >= self.depth."""
        if depth < self.depth:
            raise ValueError("refinement cannot lower the depth")
        if depth == self.depth:
            return self
        return LocallyConstantFunction(
            self.sft, depth, {w: self(w) for w in self.sft.words(depth)}
        )

    @classmethod
    def combine(cls, terms):
        """Linear combination sum(c * f) of (coefficient, function) pairs."""
        terms = list(terms)
        if not terms:
            raise ValueError("need at least one term")
        sft = terms[0][1].sft
        if any(f.sft != sft for _, f in terms):
            raise ValueError("terms live on different subshifts")
        depth = max(f.depth for _, f in terms)
        table = {
            w: sum(c * f(w) for c, f in terms) for w in sft.words(depth)
        }
        return cls(sft, depth, table)

    def __add__(self, other):
        if isinstance(other, LocallyConstantFunction):
            return self.combine([(1.0, self), (1.0, other)])
        return self.combine([(1.0, self)]) + LocallyConstantFunction.constant(
            self.sft, float(other), 1
        )

    def __sub__(self, other):
        return self + (other * -1.0)

    def __mul__(self, scalar):
        return LocallyConstantFunction(
            self.sft, self.depth, {w: v * float(scalar) for w, v in self.values.items()}
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def sup_norm(self):
        return max(abs(v) for v in self.values.values())

    def min_value(self):
        return min(self.values.values())

    def max_value(self):
        return max(self.values.values())


def birkhoff_sum(f, word, n):
    """Sum of ``f`` over the first ``n`` shifts of ``word``.

    Requires ``len(word) >= n + f.depth - 1`` so every window is defined.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    need = n + f.depth - 1
    if len(word) < need:
        raise ValueError(f"word of length {len(word)} too short, need {need}")
    return sum(f.values[tuple(word[j : j + f.depth])] for j in range(n))


class PotentialFamily:
    """Sequence f_n of functions, each reading ``word_length(n)`` symbols."""

    kind = "asymptotic"
    generator = None

    def __init__(self, sft):
        self.sft = sft

    def word_length(self, n):
        """Symbols required to evaluate f_n."""
        raise NotImplementedError

    def value(self, word, n):
        """f_n evaluated on the cylinder of ``word``."""
        raise NotImplementedError

    def values_along(self, stream, n_max):
        """Array [f_1, ..., f_n_max] along a symbol stream.

        Subclasses override this when an incremental pass is cheaper than
        n_max independent evaluations.
        """
        if isinstance(stream, SymbolStream):
            word = stream.window(self.word_length(n_max))
        else:
            word = tuple(stream)
        return np.array([self.value(word, n) for n in range(1, n_max + 1)])


class AdditiveFamily(PotentialFamily):
    """f_n is the Birkhoff sum of a locally constant generator."""

    kind = "additive"

    def __init__(self, generator):
        super().__init__(generator.sft)
        self.generator = generator

    def word_length(self, n):
        return n + self.generator.depth - 1

    def value(self, word, n):
        return birkhoff_sum(self.generator, word, n)

    def values_along(self, stream, n_max):
        if isinstance(stream, SymbolStream):
            word = stream.window(self.word_length(n_max))
        else:
            word = tuple(stream)
        g = self.generator
        steps = [g.values[word[j : j + g.depth]] for j in range(n_max)]
        return np.cumsum(steps)


class AlmostAdditiveFamily(PotentialFamily):
    """Family given by an evaluator with a claimed almost-additivity bound.

    ``evaluator(word, n)`` must return f_n from the first ``word_length(n)``
    symbols of ``word``.  ``claimed_constant`` may be None when only the
    qualitative class is known; ``almost_additivity_constant`` measures it.
    """

    kind = "almost"

    def __init__(self, sft, evaluator, claimed_constant=None, extra_depth=0):
        super().__init__(sft)
        self.evaluator = evaluator
        self.claimed_constant = claimed_constant
        self.extra_depth = extra_depth

    def word_length(self, n):
        return n + self.extra_depth

    def value(self, word, n):
        return self.evaluator(word, n)


class AsymptoticFamily(PotentialFamily):
    """Family with no structure beyond the evaluator itself."""

    kind = "asymptotic"

    def __init__(self, sft, evaluator, extra_depth=0):
        super().__init__(sft)
        self.evaluator = evaluator
        self.extra_depth = extra_depth

    def word_length(self, n):
        return n + self.extra_depth

    def value(self, word, n):
        return self.evaluator(word, n)


class MatrixCocycle(PotentialFamily):
    """f_n(x) = log of the operator 2-norm of M_{x_{n-1}} ... M_{x_0}.

    One square matrix per symbol; later symbols multiply on the left.
    With entrywise positive matrices the family is almost additive, which
    the ``kind`` attribute reflects.
    """

    def __init__(self, sft, matrices):
        super().__init__(sft)
        mats = [np.array(m, dtype=float) for m in matrices]
        if len(mats) != sft.k:
            raise ValueError(f"need {sft.k} matrices, got {len(mats)}")
        d = mats[0].shape[0]
        for m in mats:
            if m.shape != (d, d):
                raise ValueError("matrices must share one square shape")
        self.matrices = mats
        self.dim = d
        self.positive = all((m > 0).all() for m in mats)
        self.kind = "almost" if self.positive else "asymptotic"

    def word_length(self, n):
        return n

    def value(self, word, n):
        if len(word) < n:
            raise ValueError(f"need {n} symbols, got {len(word)}")
        prod = np.eye(self.dim)
        log_scale = 0.0
        for s in word[:n]:
            prod = self.matrices[s] @ prod
            norm = np.linalg.norm(prod)
            if norm == 0.0:
                return -math.inf
            prod /= norm
            log_scale += math.log(norm)
        return log_scale + math.log(np.linalg.norm(prod, 2))

    def values_along(self, stream, n_max):
        if isinstance(stream, SymbolStream):
            word = stream.window(n_max)
        else:
            word = tuple(stream)
        out = np.empty(n_max)
        prod = np.eye(self.dim)
        log_scale = 0.0
        for j, s in enumerate(word[:n_max]):
            prod = self.matrices[s] @ prod
            norm = np.linalg.norm(prod)
            prod /= norm
            log_scale += math.log(norm)
            out[j] = log_scale + math.log(np.linalg.norm(prod, 2))
        return out


def orbit_average(f, point):
    """Birkhoff average of a locally constant function on a periodic orbit."""
    p = point.period
    return sum(f(point.window(i, f.depth)) for i in range(p)) / p


def almost_additivity_constant(family, n_max):
    """Largest |f_{m+n} - f_m - f_n . shift^m| over words and m + n <= n_max.

    Exhaustive over admissible words, so exact for the represented class;
    refuses (ResourceLimit) when the enumeration would exceed the word
    guard.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    worst = 0.0
    for total in range(2, n_max + 1):
        length = family.word_length(total)
        if family.sft.word_count(length) > WORD_ENUMERATION_LIMIT:
            raise ResourceLimit(f"enumeration at length {length} exceeds guard")
        for word in family.sft.words(length):
            f_total = family.value(word, total)
            for m in range(1, total):
                gap = abs(f_total - family.value(word, m) - family.value(word[m:], total - m))
                if gap > worst:
                    worst = gap
    return worst


def block_average(family, n):
    """The normalized block f_n/n as a locally constant function.

    The table depth equals ``family.word_length(n)``; for families whose
    f_n reads exactly n symbols this is a depth-n function.  Words longer
    than f_n needs are evaluated on their admissible extension, which
    changes nothing for the families constructed in this package.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    depth = family.word_length(n)
    if family.sft.word_count(depth) > WORD_ENUMERATION_LIMIT:
        raise ResourceLimit(f"block table at depth {depth} exceeds guard")
    table = {w: family.value(w, n) / n for w in family.sft.words(depth)}
    return LocallyConstantFunction(family.sft, depth, table)


def equivalence_defect(family, g, n):
    """(1/n) sup |f_n - S_n g| with the sup taken over all cylinders.

    Exhaustive and exact for locally constant data.  Raises ResourceLimit
    when the required word enumeration exceeds the guard; see
    ``sampled_equivalence_defect`` for long horizons.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    length = max(family.word_length(n), n + g.depth - 1)
    if family.sft.word_count(length) > WORD_ENUMERATION_LIMIT:
        raise ResourceLimit(f"defect enumeration at length {length} exceeds guard")
    worst = 0.0
    for word in family.sft.words(length):
        gap = abs(family.value(word, n) - birkhoff_sum(g, word, n))
        if gap > worst:
            worst = gap
    return worst / n


def sampled_equivalence_defect(family, g, n, points):
    """(1/n) max |f_n - S_n g| over the given periodic points.

    Lower bound for the exhaustive defect; exact when the points cover
    every cylinder the two arguments read.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not points:
        raise ValueError("need at least one sample point")
    worst = 0.0
    for p in points:
        stream = p.stream()
        length = max(family.word_length(n), n + g.depth - 1)
        word = stream.window(length)
        gap = abs(family.value(word, n) - birkhoff_sum(g, word, n))
        if gap > worst:
            worst = gap
    return worst / n
