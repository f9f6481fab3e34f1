"""Reduction of flow observable families to base-level additive data.

A flow family assigns to each time t >= 0 a function a_t on the suspension
space.  Sampling a_t at roof-crossing times induces a potential family on
the base; its normalized block spreads back over the roof segments as a
lifted observable, and defect curves quantify how well that lifted
function reproduces the original family at long horizons.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .potentials import (
    AdditiveFamily,
    AlmostAdditiveFamily,
    AsymptoticFamily,
    birkhoff_sum,
    block_average,
)
from .sft import WordStream
from .suspension import (
    CylinderFlowFunction,
    FlowPoint,
    lift,
    orbit_integral,
    roof_integral_function,
    smoothstep_profile,
)

# Exhaustive defect evaluation switches to periodic sampling beyond this
# many words; the exact variant stays available through
# potentials.equivalence_defect.
PIPELINE_EXACT_WORD_LIMIT = 4096


class FlowFamily:
    """Family of functions a_t on the suspension space, t >= 0.

    ``kind`` mirrors the potential-family classes: additive families carry
    their generating observable, almost additive ones a bounded
    concatenation defect, asymptotically additive ones neither.
    """

    def __init__(self, flow, evaluator, kind="asymptotic", generator=None, label=""):
        self.flow = flow
        self.evaluator = evaluator
        self.kind = kind
        self.generator = generator
        self.label = label

    def value(self, point, t):
        if t < 0:
            raise ValueError("flow families are indexed by t >= 0")
        return self.evaluator(point, t)

    def crossing_values(self, stream, n_max):
        """[a_{tau_1}, ..., a_{tau_n_max}] from height zero along a stream.

        Default implementation walks the flow once per n; subclasses or
        constructors install a faster incremental pass when available.
        """
        flow = self.flow
        roof = flow.roof
        out = np.empty(n_max)
        t = 0.0
        cursor = stream
        for n in range(1, n_max + 1):
            t += roof(cursor.window(roof.depth))
            cursor = cursor.shifted()
            out[n - 1] = self.value(FlowPoint(flow, stream, 0.0), t)
        return out


def integral_flow_family(flow, g, label=""):
    """Additive family a_t = integral of g along the orbit up to time t."""
    fam = FlowFamily(
        flow,
        lambda point, t: orbit_integral(g, point, t),
        kind="additive",
        generator=g,
        label=label or "integral",
    )

    def crossing_values(stream, n_max):
        segment = roof_integral_function(flow, g)
        word = stream.window(n_max + segment.depth - 1)
        steps = [segment.values[word[j : j + segment.depth]] for j in range(n_max)]
        return np.cumsum(steps)

    fam.crossing_values = crossing_values
    return fam


def linear_flow_family(flow, rate, label=""):
    """a_t = rate * t, the family generated by a constant observable."""
    generator = CylinderFlowFunction.constant(flow, rate)
    fam = FlowFamily(
        flow,
        lambda point, t: rate * t,
        kind="additive",
        generator=generator,
        label=label or "linear",
    )
    return fam


def cocycle_flow_family(flow, cocycle, label=""):
    """Log-norm growth of a matrix product, interpolated between crossings.

    Each roof crossing multiplies the product by the matrix of the symbol
    being left; between crossings the value interpolates linearly in time
    across the current segment.  At crossing times from height zero the
    family reproduces the discrete cocycle exactly.
    """
    if cocycle.sft != flow.sft:
        raise ValueError("cocycle and flow live on different subshifts")
    roof = flow.roof

    def log_norms(stream, count):
        # log |M_{x_{j-1}} ... M_{x_0}| for j = 0 .. count
        word = stream.window(count) if count else ()
        out = [0.0]
        prod = np.eye(cocycle.dim)
        log_scale = 0.0
        for s in word:
            prod = cocycle.matrices[s] @ prod
            norm = np.linalg.norm(prod)
            prod /= norm
            log_scale += math.log(norm)
            out.append(log_scale + math.log(np.linalg.norm(prod, 2)))
        return out

    def evaluator(point, t):
        n0, frac0 = _fractional_position(roof, point.stream, point.height, 0.0)
        n1, frac1 = _fractional_position(roof, point.stream, point.height, t)
        norms = log_norms(point.stream, n1 + (1 if frac1 > 0.0 else 0))
        start = _interpolate(norms, n0, frac0)
        end = _interpolate(norms, n1, frac1)
        return end - start

    fam = FlowFamily(flow, evaluator, kind="almost", label=label or "cocycle")

    def crossing_values(stream, n_max):
        return np.array(log_norms(stream, n_max)[1:])

    fam.crossing_values = crossing_values
    return fam


def _fractional_position(roof, stream, height, t):
    """Crossings completed and fraction of the current segment at time t."""
    cursor = stream
    consumed = height
    crossings = 0
    remaining = t
    while True:
        roof_here = roof(cursor.window(roof.depth))
        gap = roof_here - consumed
        if remaining < gap:
            return crossings, (consumed + remaining) / roof_here
        remaining -= gap
        crossings += 1
        cursor = cursor.shifted()
        consumed = 0.0
        if remaining == 0.0:
            return crossings, 0.0


def _interpolate(norms, n, frac):
    if frac == 0.0:
        return norms[n]
    return norms[n] + frac * (norms[n + 1] - norms[n])


def induced_sequence(flow, family):
    """Potential family c_n = a at the n-th crossing time, from height zero.

    For additive flow families with a known generator the result is the
    additive family of the generator's segment integrals, which is exact;
    otherwise the crossing values are sampled through the evaluator.
    """
    if family.kind == "additive" and family.generator is not None:
        return AdditiveFamily(roof_integral_function(flow, family.generator))
    roof = flow.roof

    def evaluator(word, n):
        values = family.crossing_values(WordStream(tuple(word)), n)
        return float(values[n - 1])

    extra = roof.depth
    if family.kind == "almost":
        induced = AlmostAdditiveFamily(flow.sft, evaluator, extra_depth=extra)
    else:
        induced = AsymptoticFamily(flow.sft, evaluator, extra_depth=extra)
    induced.values_along = lambda stream, n_max: np.asarray(
        family.crossing_values(stream, n_max), dtype=float
    )
    return induced


def default_samples(flow, max_period=4, heights_per_segment=8):
    """Flow points over every short periodic orbit, at several heights.

    Covers all 1-cylinders (every symbol lies on some short cycle) with
    at least ``heights_per_segment`` heights per roof segment.
    """
    samples = []
    for p in flow.sft.periodic_points_up_to(max_period):
        roof_here = flow.roof(p.window(0, flow.roof.depth))
        for j in range(heights_per_segment):
            samples.append(flow.point(p, roof_here * j / heights_per_segment))
    return samples


def flow_defect(flow, family, candidate, times, samples):
    """Defect curve t -> (1/t) max over samples of |a_t - orbit integral|.

    ``candidate`` is a flow observable; the orbit integral is exact on
    full segments (quadrature only on the partial ends).  The maximum over
    a structured sample set is a lower bound for the sup over the space,
    and is exact for cylinder-determined data once the samples cover the
    cylinders involved.
    """
    times = list(times)
    if not times or any(t <= 0 for t in times) or any(
        b <= a for a, b in zip(times, times[1:])
    ):
        raise ValueError("times must be positive and strictly increasing")
    if not samples:
        raise ValueError("need at least one sample point")
    curve = []
    for t in times:
        worst = 0.0
        for p in samples:
            gap = abs(family.value(p, t) - orbit_integral(candidate, p, t))
            if gap > worst:
                worst = gap
        curve.append((t, worst / t))
    return curve


def crossing_diagnostic(flow, family, times, base_points):
    """Curve t -> (1/t) max |a_t - a at the last completed crossing|.

    Evaluated from height zero over the given periodic base points; decay
    of this curve shows crossing-time sampling loses nothing at long
    horizons.
    """
    roof = flow.roof
    curve = []
    for t in times:
        worst = 0.0
        for p in base_points:
            point = flow.point(p, 0.0)
            n, _ = _fractional_position(roof, point.stream, 0.0, t)
            a_t = family.value(point, t)
            a_cross = family.value(point, roof.return_time(p.window(0, n + roof.depth), n)) if n else 0.0
            worst = max(worst, abs(a_t - a_cross))
        curve.append((t, worst / t))
    return curve


class EquivalenceReport:
    """Outcome of the reduction pipeline for one flow family."""

    def __init__(self, family_label, block_length, horizon, profile_name,
                 candidate_table, discrete_curve, flow_curve, threshold):
        self.family_label = family_label
        self.block_length = block_length
        self.horizon = horizon
        self.profile_name = profile_name
        self.candidate_table = candidate_table
        self.discrete_curve = discrete_curve
        self.flow_curve = flow_curve
        self.threshold = threshold

    @property
    def final_flow_defect(self):
        return self.flow_curve[-1][1]

    @property
    def success(self):
        return self.final_flow_defect <= self.threshold

    def to_dict(self):
        return {
            "family": self.family_label,
            "block_length": self.block_length,
            "horizon": self.horizon,
            "profile": self.profile_name,
            "candidate": {
                "depth": self.candidate_table.depth,
                "values": {
                    "".join(map(str, w)): v
                    for w, v in sorted(self.candidate_table.values.items())
                },
            },
            "discrete_defects": [[int(n), v] for n, v in self.discrete_curve],
            "flow_defects": [[t, v] for t, v in self.flow_curve],
            "threshold": self.threshold,
            "success": self.success,
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)


def equivalence_pipeline(flow, family, block_length=8, horizon=None,
                         profile=None, threshold=1e-8, samples=None,
                         discrete_lengths=None, times=None):
    """Full reduction: induce, average one block, lift, measure defects.

    Parameters
    ----------
    flow : SuspensionFlow
    family : FlowFamily
    block_length : int
        Block size for the normalized average when the induced family is
        not additive (additive families use their exact generator).
    horizon : float, optional
        Largest defect time; defaults to 64 * sup roof.
    threshold : float
        Success cutoff on the final flow defect.

    Returns an EquivalenceReport with the candidate table and both defect
    curves.  Discrete defects are exhaustive while the word enumeration
    stays below PIPELINE_EXACT_WORD_LIMIT and fall back to the periodic
    sample points beyond that.
    """
    if profile is None:
        profile = smoothstep_profile()
    sup_roof = flow.roof.sup
    if horizon is None:
        horizon = 64.0 * sup_roof
    induced = induced_sequence(flow, family)
    if isinstance(induced, AdditiveFamily):
        candidate = induced.generator
    else:
        candidate = block_average(induced, block_length)
    lifted = lift(flow, candidate, profile)

    if samples is None:
        samples = default_samples(flow)
    base_points = flow.sft.periodic_points_up_to(4)

    n_top = int(horizon / flow.roof.inf)
    if discrete_lengths is None:
        discrete_lengths = sorted(
            {min(2**j, n_top) for j in range(0, 40) if 2**j <= n_top} | {n_top}
        )
    discrete_curve = [
        (n, _discrete_defect(flow, induced, candidate, n, base_points))
        for n in discrete_lengths
    ]

    if times is None:
        times = sorted({sup_roof * 2.0**j for j in range(0, 40)
                        if sup_roof * 2.0**j < horizon} | {float(horizon)})
    flow_curve = flow_defect(flow, family, lifted, times, samples)

    return EquivalenceReport(
        family.label or family.kind,
        block_length,
        float(horizon),
        profile.name,
        candidate,
        discrete_curve,
        flow_curve,
        threshold,
    ), lifted


def _discrete_defect(flow, induced, candidate, n, base_points):
    length = max(induced.word_length(n), n + candidate.depth - 1)
    count = flow.sft.word_count(length)
    if count <= PIPELINE_EXACT_WORD_LIMIT:
        worst = 0.0
        for word in flow.sft.words(length):
            gap = abs(induced.value(word, n) - birkhoff_sum(candidate, word, n))
            worst = max(worst, gap)
        return worst / n
    worst = 0.0
    for p in base_points:
        stream = p.stream()
        word = stream.window(length)
        values = induced.values_along(stream, n)
        gap = abs(float(values[n - 1]) - birkhoff_sum(candidate, word, n))
        worst = max(worst, gap)
    return worst / n
