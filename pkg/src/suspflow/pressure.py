"""Topological pressure, Gibbs-Markov measures, and entropy.

Pressure of a locally constant potential is the log of the Perron
eigenvalue of the weighted transfer matrix on the word graph whose states
are admissible words of the potential's depth.  Left and right Perron
eigenvectors turn the same matrix into a stationary Markov measure.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NonPrimitiveError, NumericFailure
from .potentials import AdditiveFamily, LocallyConstantFunction, block_average

RAYLEIGH_TOL = 1e-13
MAX_POWER_ITERATIONS = 500


class TransferStructure:
    """State graph of order-n words with successor bookkeeping.

    States are the admissible n-words in lexicographic order; word w leads
    to w' exactly when w' drops the first symbol of w and appends one
    admissible symbol.  Weighted transfer matrices differ only in their
    entry values, so the structure is cached per (sft, order).
    """

    _cache = {}

    def __init__(self, sft, order):
        if not sft.primitive:
            raise NonPrimitiveError("transfer operators require a primitive subshift")
        self.sft = sft
        self.order = order
        self.states = sft.words(order)
        self.index = {w: i for i, w in enumerate(self.states)}
        src, dst = [], []
        for i, w in enumerate(self.states):
            for s in sft.successors[w[-1]]:
                nxt = w[1:] + (s,) if order > 1 else (s,)
                src.append(i)
                dst.append(self.index[nxt])
        self.src = np.array(src)
        self.dst = np.array(dst)

    @classmethod
    def for_sft(cls, sft, order):
        key = (sft, order)
        hit = cls._cache.get(key)
        if hit is None:
            hit = cls(sft, order)
            cls._cache[key] = hit
        return hit

    def matrix(self, potential_values):
        """Dense transfer matrix with entry exp(phi(source)) on each edge.

        Values are shifted by their maximum before exponentiation to avoid
        overflow; the returned log-offset must be added back to the log of
        the Perron eigenvalue.
        """
        vals = np.asarray(potential_values, dtype=float)
        offset = float(vals.max())
        n = len(self.states)
        mat = np.zeros((n, n))
        mat[self.src, self.dst] = np.exp(vals[self.src] - offset)
        return mat, offset

    def value_vector(self, f):
        """Evaluate a locally constant function (depth <= order) on all states."""
        if f.depth > self.order:
            raise ValueError("function depth exceeds structure order")
        return np.array([f.values[w[: f.depth]] for w in self.states])


def perron_eigendata(matrix):
    """Perron eigenvalue with right and left eigenvectors, by power iteration.

    Convergence is certified through Collatz-Wielandt bounds: iteration
    stops once max and min of (Av)_i / v_i agree to RAYLEIGH_TOL in
    relative terms, which brackets the eigenvalue itself.
    """
    lam, right = _power_iterate(matrix)
    _, left = _power_iterate(matrix.T)
    return lam, right, left


def _power_iterate(matrix, max_iterations=MAX_POWER_ITERATIONS):
    n = matrix.shape[0]
    v = np.ones(n)
    for _ in range(max_iterations):
        w = matrix @ v
        ratios = w / v
        lo, hi = ratios.min(), ratios.max()
        if hi <= 0.0:
            raise NumericFailure("transfer matrix iterate lost positivity")
        v = w / np.linalg.norm(w)
        if hi - lo <= RAYLEIGH_TOL * hi:
            return 0.5 * (lo + hi), v
    # Strong tilts push the matrix close to a periodic permutation pattern
    # and the iteration cycles; take the dense eigenvector instead, but
    # accept it only with the same Collatz-Wielandt certificate.  The
    # matrix is nonnegative, so the ratio bounds involve no cancellation.
    eigvals, eigvecs = np.linalg.eig(matrix)
    v = np.abs(eigvecs[:, int(np.argmax(eigvals.real))])
    v /= v.max()
    keep = v > 0.0
    ratios = (matrix @ v)[keep] / v[keep]
    lo, hi = float(ratios.min()), float(ratios.max())
    if hi > 0.0 and hi - lo <= RAYLEIGH_TOL * hi:
        return 0.5 * (lo + hi), v / np.linalg.norm(v)
    raise NumericFailure("power iteration did not converge")


def pressure(sft, phi):
    """Topological pressure of a locally constant potential.

    Parameters
    ----------
    sft : Sft
        Primitive subshift.
    phi : LocallyConstantFunction
        Potential; depth sets the order of the transfer matrix.

    Returns
    -------
    float
        log of the Perron eigenvalue of the weighted transfer matrix.
    """
    structure = TransferStructure.for_sft(sft, max(phi.depth, 1))
    mat, offset = structure.matrix(structure.value_vector(phi))
    lam, _ = _power_iterate(mat)
    return math.log(lam) + offset


def topological_entropy(sft):
    return pressure(sft, LocallyConstantFunction.constant(sft, 0.0))


class MarkovMeasure:
    """Stationary Markov measure on word states of a fixed depth.

    Parameters
    ----------
    sft : Sft
    depth : int
        Length of the words indexing the chain states.
    stationary : dict
        Word -> probability; may omit words of probability zero.
    kernel : dict
        Word -> {successor word: probability}; rows must be stochastic and
        are required only on the support of ``stationary``.
    """

    def __init__(self, sft, depth, stationary, kernel):
        self.sft = sft
        self.depth = depth
        self.stationary = {w: float(p) for w, p in stationary.items() if p != 0.0}
        self.kernel = {
            w: {v: float(p) for v, p in row.items() if p != 0.0}
            for w, row in kernel.items()
        }
        total = sum(self.stationary.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"stationary mass {total} is not 1")
        for w in self.stationary:
            row = self.kernel.get(w)
            if row is None:
                raise ValueError(f"kernel row missing for {w}")
            if abs(sum(row.values()) - 1.0) > 1e-9:
                raise ValueError(f"kernel row at {w} is not stochastic")
            for v in row:
                if v[:-1] != w[1:]:
                    raise ValueError(f"kernel step {w}->{v} is not a shift successor")

    def entropy(self):
        """Entropy rate -sum pi_w P(w, v) log P(w, v), with 0 log 0 = 0."""
        h = 0.0
        for w, pw in self.stationary.items():
            for p in self.kernel[w].values():
                if p > 0.0:
                    h -= pw * p * math.log(p)
        return h

    def cylinder_weights(self, depth):
        """Measure of every cylinder of the given depth, as a dict."""
        if depth < 1:
            raise ValueError("depth must be >= 1")
        if depth <= self.depth:
            out = {}
            for w, p in self.stationary.items():
                key = w[:depth]
                out[key] = out.get(key, 0.0) + p
            return out
        out = dict(self.stationary)
        for _ in range(depth - self.depth):
            nxt = {}
            for w, p in out.items():
                tail = w[-self.depth :]
                for v, q in self.kernel[tail].items():
                    nxt[w + v[-1:]] = p * q
            out = nxt
        return out

    def integrate(self, f):
        """Integral of a locally constant function against the measure."""
        if f.sft != self.sft:
            raise ValueError("function and measure live on different subshifts")
        weights = self.cylinder_weights(max(f.depth, 1))
        return sum(p * f(w) for w, p in weights.items())


def measure_from_transfer(sft, structure, potential_values):
    """Markov measure built from Perron data of a weighted transfer matrix."""
    mat, _ = structure.matrix(potential_values)
    lam, right, left = perron_eigendata(mat)
    weights = left * right
    pi = weights / weights.sum()
    states = structure.states
    stationary = {w: float(pi[i]) for i, w in enumerate(states)}
    kernel = {}
    for i, w in enumerate(states):
        row = {}
        for j in np.nonzero(mat[i])[0]:
            row[states[j]] = float(mat[i, j] * right[j] / (lam * right[i]))
        kernel[w] = row
    return MarkovMeasure(sft, structure.order, stationary, kernel)


def gibbs_measure(sft, phi):
    """Gibbs-Markov equilibrium measure of a locally constant potential.

    Built from the left and right Perron eigenvectors of the weighted
    transfer matrix; satisfies entropy + integral(phi) = pressure(phi).
    """
    structure = TransferStructure.for_sft(sft, max(phi.depth, 1))
    return measure_from_transfer(sft, structure, structure.value_vector(phi))


def bernoulli_measure(sft, probs):
    """Product measure with independent symbol probabilities (full shift)."""
    probs = [float(p) for p in probs]
    if len(probs) != sft.k or abs(sum(probs) - 1.0) > 1e-12 or min(probs) < 0:
        raise ValueError("need one nonnegative probability per symbol, summing to 1")
    if not (sft.matrix == 1).all():
        raise ValueError("Bernoulli measures require the full shift")
    states = sft.words(1)
    stationary = {(i,): probs[i] for i in range(sft.k)}
    kernel = {(i,): {(j,): probs[j] for j in range(sft.k)} for i in range(sft.k)}
    return MarkovMeasure(sft, 1, stationary, kernel)


def markov_measure(sft, kernel_matrix):
    """Stationary measure of an explicit symbol-level stochastic matrix."""
    kernel_matrix = np.asarray(kernel_matrix, dtype=float)
    if kernel_matrix.shape != (sft.k, sft.k):
        raise ValueError("kernel must be k x k")
    if ((kernel_matrix > 0) & (sft.matrix == 0)).any():
        raise ValueError("kernel charges a forbidden transition")
    if not np.allclose(kernel_matrix.sum(axis=1), 1.0, atol=1e-12):
        raise ValueError("kernel rows must sum to 1")
    vals, vecs = np.linalg.eig(kernel_matrix.T)
    idx = int(np.argmin(np.abs(vals - 1.0)))
    pi = np.real(vecs[:, idx])
    pi = pi / pi.sum()
    if pi.min() < -1e-12:
        raise NumericFailure("stationary vector has negative entries")
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    stationary = {(i,): float(pi[i]) for i in range(sft.k) if pi[i] > 0}
    kernel = {
        (i,): {(j,): float(kernel_matrix[i, j]) for j in range(sft.k) if kernel_matrix[i, j] > 0}
        for i in range(sft.k)
    }
    return MarkovMeasure(sft, 1, stationary, kernel)


def periodic_orbit_measure(sft, cycle):
    """Uniform invariant measure on the orbit of an admissible cycle."""
    cycle = tuple(cycle)
    if not sft.is_admissible(cycle) or not sft.matrix[cycle[-1], cycle[0]]:
        raise ValueError("cycle must be admissible and close up")
    p = len(cycle)
    doubled = cycle + cycle
    windows = [doubled[i : i + p] for i in range(p)]
    distinct = sorted(set(windows))
    stationary = {w: 1.0 / len(distinct) for w in distinct}
    kernel = {}
    for i, w in enumerate(windows):
        kernel[w] = {windows[(i + 1) % p]: 1.0}
    return MarkovMeasure(sft, p, stationary, kernel)


def family_pressure(sft, family, n):
    """Pressure of the normalized block f_n/n, reported with the n used.

    For additive families the result is exact at every n because the block
    average differs from the generator by a telescoping correction that
    pressure does not see.
    """
    candidate = (
        family.generator
        if isinstance(family, AdditiveFamily)
        else block_average(family, n)
    )
    return pressure(sft, candidate), n
