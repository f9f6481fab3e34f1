"""Suspension flows over a subshift under a locally constant roof.

A point of the suspension space is a base point together with a height
below the roof value of its cylinder; the flow increases the height at
unit speed and drops to the shifted base point at each roof crossing.
Functions on the suspension space come in three concrete forms, all
evaluated from a (symbol window, height) pair.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NumericFailure
from .numerics import bisect_root, expand_bracket, simpson
from .potentials import LocallyConstantFunction
from .pressure import MarkovMeasure, pressure
from .sft import PeriodicPoint, SymbolStream, WordStream

QUADRATURE_PANELS_PER_UNIT = 64


class RoofFunction:
    """Strictly positive locally constant return time."""

    def __init__(self, height):
        if not isinstance(height, LocallyConstantFunction):
            raise ValueError("roof must be a locally constant function")
        if height.min_value() <= 0.0:
            raise ValueError("roof values must be strictly positive")
        self.height = height
        self.sft = height.sft
        self.depth = height.depth
        self.inf = height.min_value()
        self.sup = height.max_value()

    @classmethod
    def constant(cls, sft, value):
        return cls(LocallyConstantFunction.constant(sft, value))

    @classmethod
    def from_values(cls, sft, depth, values):
        return cls(LocallyConstantFunction(sft, depth, values))

    def __call__(self, word):
        return self.height(word)

    def return_time(self, word, n):
        """Time of the n-th roof crossing started at height zero."""
        total = 0.0
        for j in range(n):
            total += self.height(word[j : j + self.depth])
        return total


class SuspensionFlow:
    """Suspension of a subshift under a roof function."""

    def __init__(self, sft, roof):
        if roof.sft != sft:
            raise ValueError("roof does not live on the given subshift")
        self.sft = sft
        self.roof = roof

    def point(self, base, height=0.0):
        """Flow point over a periodic point, stream, or finite word."""
        if isinstance(base, PeriodicPoint):
            stream = base.stream()
        elif isinstance(base, SymbolStream):
            stream = base
        else:
            stream = WordStream(tuple(base))
        return FlowPoint(self, stream, height)


class FlowPoint:
    """Base cursor plus a height in [0, roof(base))."""

    def __init__(self, flow, stream, height):
        roof_here = flow.roof(stream.window(flow.roof.depth))
        if not 0.0 <= height < roof_here:
            raise ValueError(f"height {height} outside [0, {roof_here})")
        self.flow = flow
        self.stream = stream
        self.height = float(height)

    def window(self, length):
        return self.stream.window(length)

    def __repr__(self):
        return f"FlowPoint({self.stream!r}, h={self.height:.6g})"


def flow_map(point, t):
    """Advance a flow point by time t >= 0, crossing roofs as needed."""
    if t < 0:
        raise ValueError("the suspension semiflow is defined for t >= 0")
    flow = point.flow
    depth = flow.roof.depth
    stream = point.stream
    s = point.height + t
    roof_here = flow.roof(stream.window(depth))
    while s >= roof_here:
        s -= roof_here
        stream = stream.shifted()
        roof_here = flow.roof(stream.window(depth))
    return FlowPoint(flow, stream, s)


class BumpProfile:
    """Reparametrization profile on [0, 1] used to spread cylinder data.

    ``fn`` must be C^1 and nondecreasing with fn(0)=0, fn(1)=1 and
    derivative vanishing at both endpoints; ``derivative`` is its exact
    derivative.  These conditions are spot-checked on a grid at
    construction time.
    """

    def __init__(self, name, fn, derivative):
        self.name = name
        self.fn = fn
        self.derivative = derivative
        if abs(fn(0.0)) > 1e-12 or abs(fn(1.0) - 1.0) > 1e-12:
            raise ValueError("profile must map 0 to 0 and 1 to 1")
        if abs(derivative(0.0)) > 1e-12 or abs(derivative(1.0)) > 1e-12:
            raise ValueError("profile derivative must vanish at the endpoints")
        grid = np.linspace(0.0, 1.0, 129)
        values = np.array([fn(u) for u in grid])
        if (np.diff(values) < -1e-12).any():
            raise ValueError("profile must be nondecreasing")


def smoothstep_profile():
    """Default cubic profile 3u^2 - 2u^3."""
    return BumpProfile(
        "smoothstep",
        lambda u: u * u * (3.0 - 2.0 * u),
        lambda u: 6.0 * u * (1.0 - u),
    )


class FlowFunction:
    """Observable on the suspension space."""

    def value(self, word, height):
        raise NotImplementedError

    def at(self, point):
        return self.value(point.window(self.depth), point.height)


class CylinderFlowFunction(FlowFunction):
    """Height-independent observable read off a base cylinder."""

    def __init__(self, flow, base):
        self.flow = flow
        self.base = base
        self.depth = max(base.depth, flow.roof.depth)

    @classmethod
    def constant(cls, flow, value):
        return cls(flow, LocallyConstantFunction.constant(flow.sft, value))

    def value(self, word, height):
        return self.base(word)


class LiftedFunction(FlowFunction):
    """Bump-shaped spread of cylinder data across each roof segment.

    value(x, s) = table(x) / roof(x) * profile'(s / roof(x)); the factor
    vanishes at heights 0 and roof(x), so the function is continuous
    through roof crossings, and its integral over one segment is exactly
    table(x).
    """

    def __init__(self, flow, table, profile):
        self.flow = flow
        self.table = table
        self.profile = profile
        self.depth = max(table.depth, flow.roof.depth)

    def value(self, word, height):
        roof_here = self.flow.roof(word)
        return self.table(word) / roof_here * self.profile.derivative(height / roof_here)

    def segment_integral(self, word, s_lo, s_hi):
        """Exact integral over heights [s_lo, s_hi] of one segment."""
        roof_here = self.flow.roof(word)
        psi = self.profile.fn
        return self.table(word) * (psi(s_hi / roof_here) - psi(s_lo / roof_here))


class SampledFunction(FlowFunction):
    """Observable tabulated on (cylinder, height grid) boxes.

    Heights between grid nodes are filled in by linear interpolation;
    integrals fall back to quadrature of the interpolant.
    """

    def __init__(self, flow, depth, grids):
        self.flow = flow
        self.depth = max(depth, flow.roof.depth)
        self.table_depth = depth
        self.grids = {}
        for word, (heights, values) in grids.items():
            heights = np.asarray(heights, dtype=float)
            values = np.asarray(values, dtype=float)
            if heights.ndim != 1 or heights.shape != values.shape:
                raise ValueError("each grid needs matching height and value arrays")
            if (np.diff(heights) <= 0).any():
                raise ValueError("height grids must be strictly increasing")
            self.grids[tuple(word)] = (heights, values)
        for word in flow.sft.words(depth):
            if word not in self.grids:
                raise ValueError(f"missing grid for cylinder {word}")

    @classmethod
    def from_callable(cls, flow, depth, fn, points_per_segment=65):
        grids = {}
        for word in flow.sft.words(depth):
            roof_here = flow.roof(flow.sft.extend_word(word, flow.roof.depth))
            heights = np.linspace(0.0, roof_here, points_per_segment)
            grids[word] = (heights, np.array([fn(word, s) for s in heights]))
        return cls(flow, depth, grids)

    def value(self, word, height):
        heights, values = self.grids[tuple(word[: self.table_depth])]
        return float(np.interp(height, heights, values))


def roof_integral(flow, g, word):
    """Integral of g over one full roof segment above the cylinder of word.

    Exact (the cylinder table entry) for lifted functions, value * roof for
    height-independent ones, composite Simpson quadrature with at least
    QUADRATURE_PANELS_PER_UNIT panels per unit of roof otherwise.
    """
    word = tuple(word)
    if isinstance(g, LiftedFunction):
        return g.table(word)
    roof_here = flow.roof(word)
    if isinstance(g, CylinderFlowFunction):
        return g.base(word) * roof_here
    panels = max(4, math.ceil(QUADRATURE_PANELS_PER_UNIT * roof_here))
    return simpson(lambda s: g.value(word, s), 0.0, roof_here, panels)


def roof_integral_function(flow, g):
    """The segment integrals of g as a locally constant function."""
    depth = max(g.depth, flow.roof.depth)
    table = {w: roof_integral(flow, g, w) for w in flow.sft.words(depth)}
    return LocallyConstantFunction(flow.sft, depth, table)


def _partial_segment_integral(flow, g, word, s_lo, s_hi):
    if s_hi <= s_lo:
        return 0.0
    if isinstance(g, LiftedFunction):
        return g.segment_integral(word, s_lo, s_hi)
    if isinstance(g, CylinderFlowFunction):
        return g.base(word) * (s_hi - s_lo)
    panels = max(4, math.ceil(QUADRATURE_PANELS_PER_UNIT * (s_hi - s_lo)))
    return simpson(lambda s: g.value(word, s), s_lo, s_hi, panels)


def orbit_integral(g, point, t):
    """Integral of g along the flow orbit of ``point`` over [0, t].

    Full segments use the exact per-segment rules of ``roof_integral``;
    only the two partial end segments ever need quadrature.
    """
    if t < 0:
        raise ValueError("orbit integrals run forward in time")
    flow = point.flow
    depth = max(g.depth, flow.roof.depth)
    stream = point.stream
    s = point.height
    remaining = t
    total = 0.0
    while True:
        word = stream.window(depth)
        roof_here = flow.roof(word)
        if s + remaining < roof_here:
            total += _partial_segment_integral(flow, g, word, s, s + remaining)
            return total
        total += _partial_segment_integral(flow, g, word, s, roof_here)
        remaining -= roof_here - s
        stream = stream.shifted()
        s = 0.0
        if remaining == 0.0:
            return total


class FlowInvariantMeasure:
    """Flow-invariant probability obtained from a base measure and the roof.

    Integrates an observable by integrating its roof segments against the
    base measure and dividing by the mean roof.
    """

    def __init__(self, flow, base_measure):
        if base_measure.sft != flow.sft:
            raise ValueError("base measure lives on a different subshift")
        self.flow = flow
        self.base_measure = base_measure
        self.mean_roof = base_measure.integrate(flow.roof.height)

    def total_mass(self):
        return 1.0

    def integrate(self, g):
        segment = roof_integral_function(self.flow, g)
        return self.base_measure.integrate(segment) / self.mean_roof


def induce_measure(flow, base_measure):
    return FlowInvariantMeasure(flow, base_measure)


def abramov_entropy(flow, base_measure):
    """Entropy of the suspension flow: base entropy over mean roof."""
    mean_roof = base_measure.integrate(flow.roof.height)
    return base_measure.entropy() / mean_roof


def flow_pressure(flow, g, xtol=1e-11):
    """Topological pressure of the flow for an observable g.

    The unique s with base pressure of (segment integral of g) - s * roof
    equal to zero, located by bisection after geometric bracket expansion.
    """
    segment = roof_integral_function(flow, g)
    roof_fn = flow.roof.height

    def shifted_pressure(s):
        return pressure(flow.sft, LocallyConstantFunction.combine(
            [(1.0, segment), (-s, roof_fn)]
        ))

    scale = segment.sup_norm() / flow.roof.inf + abs(
        pressure(flow.sft, LocallyConstantFunction.constant(flow.sft, 0.0))
    )
    lo, hi = expand_bracket(shifted_pressure, -scale - 1.0, scale + 1.0)
    return bisect_root(shifted_pressure, lo, hi, xtol=xtol)


def lift(flow, table, profile=None):
    """Continuous representative of cylinder data as a flow observable.

    The returned function integrates to exactly ``table(w)`` over the roof
    segment of each cylinder w and vanishes at segment endpoints.
    """
    if profile is None:
        profile = smoothstep_profile()
    return LiftedFunction(flow, table, profile)
