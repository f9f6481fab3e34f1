"""Dimension spectra of Birkhoff-type level sets for suspension flows.

For flow families a and b and a positive weight u, the level set of ratio
alpha collects points where the time average of a over b tends to alpha.
Its u-weighted dimension is computed two independent ways:

* root route: minimize over q the unique t with vanishing base pressure
  of q * (a - alpha * b) - t * u, all through one-block representatives;
* variational route: locate the equilibrium measure whose a/b ratio is
  alpha and report its entropy divided by the u integral.

Both routes work on the base subshift; the suspension enters through
roof-segment integrals.  A purely discrete problem (unit roof) is exposed
separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equivalence import induced_sequence
from .numerics import bisect_root, expand_bracket, minimize_convex
from .potentials import AdditiveFamily, block_average, orbit_average
from .pressure import TransferStructure, _power_iterate, measure_from_transfer
from .suspension import roof_integral_function

RATIO_PROBE_PERIOD = 12
RATIO_PROBE_TILT = 50.0


class _SpectrumCore:
    """Shared state: transfer structure plus value vectors for a, b, u."""

    def _finish_init(self, sft, phi_a, phi_b, weight):
        if weight.min_value() <= 0.0:
            raise ValueError("the dimension weight must be strictly positive")
        order = max(phi_a.depth, phi_b.depth, weight.depth, 1)
        self.sft = sft
        self.phi_a = phi_a
        self.phi_b = phi_b
        self.weight = weight
        self.structure = TransferStructure.for_sft(sft, order)
        self.va = self.structure.value_vector(phi_a)
        self.vb = self.structure.value_vector(phi_b)
        self.vu = self.structure.value_vector(weight)
        self._interval = None
        self._check_denominator()

    def _check_denominator(self):
        probes = set(self.sft.periodic_points_up_to(min(6, RATIO_PROBE_PERIOD)))
        worst = min(orbit_average(self.phi_b, p) for p in probes)
        if worst <= 0.0:
            raise ValueError(
                "ratio denominator has a nonpositive orbit average; "
                "the spectrum problem is degenerate"
            )


class SpectrumProblem(_SpectrumCore):
    """Level-set dimension data for a suspension flow.

    Parameters
    ----------
    flow : SuspensionFlow
    numerator, denominator : FlowFamily
        The families whose time-average ratio defines the level sets.
    weight : FlowFunction
        Strictly positive observable whose orbit integrals gauge dimension.
    block_length : int
        Block size used for one-block representatives of non-additive
        families.
    """

    def __init__(self, flow, numerator, denominator, weight, block_length=8):
        self.flow = flow
        self.block_length = block_length
        phi_a = _representative(flow, numerator, block_length)
        phi_b = _representative(flow, denominator, block_length)
        iu = roof_integral_function(flow, weight)
        self._finish_init(flow.sft, phi_a, phi_b, iu)


class DiscreteSpectrumProblem(_SpectrumCore):
    """Same computation without a flow: the shift map itself, unit time."""

    def __init__(self, sft, phi_a, phi_b, weight):
        self.flow = None
        self._finish_init(sft, phi_a, phi_b, weight)


def _representative(flow, family, block_length):
    induced = induced_sequence(flow, family)
    if isinstance(induced, AdditiveFamily):
        return induced.generator
    return block_average(induced, block_length)


def _log_perron(problem, values):
    mat, offset = problem.structure.matrix(values)
    lam, _ = _power_iterate(mat)
    return math.log(lam) + offset


def pressure_root(problem, q, alpha, t_tol=1e-12):
    """The unique t with zero pressure for q * (a - alpha b) - t * u.

    Monotone bisection; existence and uniqueness follow from the strictly
    positive weight vector.
    """
    tilt = q * (problem.va - alpha * problem.vb)

    def shifted_pressure(t):
        return _log_perron(problem, tilt - t * problem.vu)

    scale = (np.abs(tilt).max() + abs(_log_perron(problem, np.zeros_like(tilt)))) / (
        problem.vu.min()
    ) + 1.0
    lo, hi = expand_bracket(shifted_pressure, -scale, scale)
    return bisect_root(shifted_pressure, lo, hi, xtol=t_tol)


def ratio_interval(problem):
    """Detected range of the a/b average ratio over invariant measures.

    Inner approximation: Birkhoff ratios of all periodic orbits up to
    period RATIO_PROBE_PERIOD together with equilibrium measures at tilts
    of +-RATIO_PROBE_TILT.  Cached on the problem.
    """
    if problem._interval is not None:
        return problem._interval
    ratios = []
    for p in set(problem.sft.periodic_points_up_to(RATIO_PROBE_PERIOD)):
        ratios.append(orbit_average(problem.phi_a, p) / orbit_average(problem.phi_b, p))
    center = _equilibrium_ratio(problem, 0.0, 0.0)
    for tilt in (-RATIO_PROBE_TILT, RATIO_PROBE_TILT):
        ratios.append(_equilibrium_ratio(problem, tilt, center))
    problem._interval = (min(ratios), max(ratios))
    return problem._interval


def _equilibrium_measure(problem, q, alpha):
    t_q = pressure_root(problem, q, alpha)
    values = q * (problem.va - alpha * problem.vb) - t_q * problem.vu
    return measure_from_transfer(problem.sft, problem.structure, values), t_q


def _equilibrium_ratio(problem, q, alpha):
    measure, _ = _equilibrium_measure(problem, q, alpha)
    return measure.integrate(problem.phi_a) / measure.integrate(problem.phi_b)


def level_set_dimension(problem, alpha, q_tol=1e-6, t_tol=1e-12):
    """Dimension of the ratio-alpha level set via the pressure-root route.

    Returns None when alpha falls outside the open interval of attainable
    ratios (empty level set).  Otherwise minimizes the pressure root over
    the tilt parameter by expanding golden-section search.
    """
    detail = _dimension_detail(problem, alpha, q_tol, t_tol)
    return None if detail is None else detail[0]


def _dimension_detail(problem, alpha, q_tol=1e-6, t_tol=1e-12):
    lo, hi = ratio_interval(problem)
    if not lo < alpha < hi:
        return None
    q_star, value = minimize_convex(
        lambda q: pressure_root(problem, q, alpha, t_tol=t_tol),
        -1.0,
        1.0,
        xtol=q_tol,
    )
    return value, q_star


@dataclass
class VariationalWitness:
    """Outcome of the equilibrium-measure route for one alpha."""

    alpha: float
    value: float | None
    tilt: float | None
    ratio: float | None
    satisfied: bool


def variational_dimension(problem, alpha, ratio_tol=1e-6, max_expansions=60):
    """Dimension via an equilibrium measure constrained to ratio alpha.

    Sweeps the tilt parameter of the equilibrium family until the measure's
    a/b ratio matches alpha within ratio_tol, then reports entropy divided
    by the weight integral.  ``satisfied`` is False when no tilt in the
    swept bracket meets the constraint.
    """
    lo, hi = ratio_interval(problem)
    if not lo < alpha < hi:
        return VariationalWitness(alpha, None, None, None, False)

    def ratio_gap(q):
        return _equilibrium_ratio(problem, q, alpha) - alpha

    q_lo, q_hi = -1.0, 1.0
    g_lo, g_hi = ratio_gap(q_lo), ratio_gap(q_hi)
    width = 2.0
    for _ in range(max_expansions):
        if g_lo <= 0.0 <= g_hi:
            break
        if g_lo > 0.0:
            q_lo -= width
            g_lo = ratio_gap(q_lo)
        if g_hi < 0.0:
            q_hi += width
            g_hi = ratio_gap(q_hi)
        width *= 2.0
    else:
        return VariationalWitness(alpha, None, None, None, False)

    best = None
    for _ in range(200):
        q_mid = 0.5 * (q_lo + q_hi)
        gap = ratio_gap(q_mid)
        if best is None or abs(gap) < abs(best[1]):
            best = (q_mid, gap)
        if abs(gap) <= ratio_tol:
            break
        if gap < 0.0:
            q_lo = q_mid
        else:
            q_hi = q_mid
        if q_hi - q_lo < 1e-13:
            break
    q_best, gap = best
    if abs(gap) > ratio_tol:
        return VariationalWitness(alpha, None, q_best, alpha + gap, False)
    measure, _ = _equilibrium_measure(problem, q_best, alpha)
    weight_mass = measure.integrate(problem.weight)
    value = measure.entropy() / weight_mass
    return VariationalWitness(alpha, value, q_best, alpha + gap, True)


@dataclass
class SpectrumRow:
    alpha: float
    dim_root: float | None
    dim_variational: float | None
    q_star: float | None
    witness_tilt: float | None
    witness_ratio: float | None
    empty: bool


@dataclass
class SpectrumResult:
    """Per-alpha spectrum values plus the detected ratio interval."""

    rows: list
    interval: tuple

    def as_table(self):
        return [
            (
                r.alpha,
                r.dim_root,
                r.dim_variational,
                r.q_star,
                r.witness_tilt,
                r.witness_ratio,
                r.empty,
            )
            for r in self.rows
        ]


def spectrum_sweep(problem, alphas, q_tol=1e-6, t_tol=1e-12, ratio_tol=1e-6):
    """Both dimension routes on a grid of ratio levels."""
    rows = []
    for alpha in alphas:
        detail = _dimension_detail(problem, alpha, q_tol, t_tol)
        if detail is None:
            rows.append(SpectrumRow(alpha, None, None, None, None, None, True))
            continue
        value, q_star = detail
        witness = variational_dimension(problem, alpha, ratio_tol=ratio_tol)
        rows.append(
            SpectrumRow(
                alpha,
                value,
                witness.value,
                q_star,
                witness.tilt,
                witness.ratio,
                False,
            )
        )
    return SpectrumResult(rows, ratio_interval(problem))
