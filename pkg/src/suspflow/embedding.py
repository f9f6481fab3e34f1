"""Embedding a candidate time-one average into a genuine orbit average.

Given a flow and a target function, the question is whether the target
equals the average of some function along orbit segments of unit length.
On torus linear flows the averaging operator acts diagonally on Fourier
modes, so solving is coefficientwise division; resonant modes obstruct.
Supporting tools: an orbit-derivative necessary-condition test, coboundary
lifts with certificates, and a resolvent-equation solver.

Only continuous representable data (trigonometric polynomials, simple
closed forms, callables) is handled; indicator-style targets fall outside
the computable class used here.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericFailure
from .numerics import simpson

RESONANCE_MULTIPLIER_FLOOR = 1e-12
INTEGER_RESONANCE_TOL = 1e-9
TWO_PI = 2.0 * math.pi


class TorusLinearFlow:
    """Translation flow x -> x + t * velocity on the d-torus."""

    def __init__(self, velocity):
        self.velocity = np.atleast_1d(np.asarray(velocity, dtype=float))
        if self.velocity.ndim != 1 or self.velocity.size == 0:
            raise ValueError("velocity must be a nonempty vector")
        self.dim = self.velocity.size

    def advance(self, x, t):
        return (np.asarray(x, dtype=float) + t * self.velocity) % 1.0


class ScalarExpFlow:
    """Multiplicative flow x -> e^t x on the positive half line."""

    dim = 1

    def advance(self, x, t):
        return math.exp(t) * x


class TrigPolynomial:
    """Real trigonometric polynomial sum c_n exp(2 pi i n . x).

    Coefficients are stored per integer frequency vector and must be
    conjugate-symmetric (c_{-n} = conj(c_n)) so values are real.
    """

    def __init__(self, coefficients, dim=None):
        coeffs = {}
        for n, c in coefficients.items():
            n = tuple(int(v) for v in (n if isinstance(n, tuple) else (n,)))
            c = complex(c)
            if c != 0:
                coeffs[n] = c
        if coeffs:
            dims = {len(n) for n in coeffs}
            if len(dims) != 1:
                raise ValueError("frequency vectors must share one dimension")
            self.dim = dims.pop()
        else:
            if dim is None:
                raise ValueError("empty polynomial needs an explicit dimension")
            self.dim = dim
        for n, c in coeffs.items():
            mirror = tuple(-v for v in n)
            if abs(coeffs.get(mirror, 0.0) - c.conjugate()) > 1e-12:
                raise ValueError(f"coefficients at {n} break conjugate symmetry")
        self.coefficients = coeffs

    @classmethod
    def constant(cls, value, dim=1):
        zero = (0,) * dim
        return cls({zero: complex(value)}, dim=dim)

    @classmethod
    def cosine(cls, freq, amplitude=1.0, phase=0.0):
        freq = tuple(int(v) for v in np.atleast_1d(freq))
        c = 0.5 * amplitude * cmath.exp(1j * phase)
        return cls({freq: c, tuple(-v for v in freq): c.conjugate()})

    @classmethod
    def sine(cls, freq, amplitude=1.0):
        freq = tuple(int(v) for v in np.atleast_1d(freq))
        c = amplitude / 2j
        return cls({freq: c, tuple(-v for v in freq): c.conjugate()})

    @classmethod
    def random_real(cls, rng, dim, max_freq=3, modes=4, scale=1.0):
        """Deterministic-for-seed random polynomial with real values."""
        coeffs = {}
        for _ in range(modes):
            n = tuple(int(v) for v in rng.integers(-max_freq, max_freq + 1, size=dim))
            c = complex(rng.normal(scale=scale), rng.normal(scale=scale))
            if all(v == 0 for v in n):
                c = complex(c.real, 0.0)
            coeffs[n] = coeffs.get(n, 0.0) + c
            mirror = tuple(-v for v in n)
            coeffs[mirror] = coeffs.get(mirror, 0.0) + (
                c.conjugate() if mirror != n else 0.0
            )
        return cls(coeffs, dim=dim)

    def __call__(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        total = 0.0 + 0.0j
        for n, c in self.coefficients.items():
            total += c * cmath.exp(2j * math.pi * float(np.dot(n, x)))
        return total.real

    def map_coefficients(self, factor):
        """New polynomial with coefficient c_n replaced by factor(n) * c_n."""
        return TrigPolynomial(
            {n: factor(n) * c for n, c in self.coefficients.items()}, dim=self.dim
        )

    def __add__(self, other):
        coeffs = dict(self.coefficients)
        for n, c in other.coefficients.items():
            coeffs[n] = coeffs.get(n, 0.0) + c
        return TrigPolynomial(coeffs, dim=self.dim)

    def __sub__(self, other):
        return self + other.map_coefficients(lambda n: -1.0)

    def __mul__(self, scalar):
        return self.map_coefficients(lambda n: float(scalar))

    __rmul__ = __mul__

    def mean(self):
        """Integral against normalized Lebesgue measure (the 0-mode)."""
        return self.coefficients.get((0,) * self.dim, 0.0 + 0.0j).real

    def coefficient_distance(self, other):
        freqs = set(self.coefficients) | set(other.coefficients)
        return max(
            (
                abs(self.coefficients.get(n, 0.0) - other.coefficients.get(n, 0.0))
                for n in freqs
            ),
            default=0.0,
        )


class Monomial:
    """c * x^degree on the half line."""

    def __init__(self, coefficient, degree):
        self.coefficient = float(coefficient)
        self.degree = int(degree)

    def __call__(self, x):
        return self.coefficient * x**self.degree


class LogPlusConstant:
    """offset + log x on the half line."""

    def __init__(self, offset=0.0):
        self.offset = float(offset)

    def __call__(self, x):
        return self.offset + math.log(x)


def unit_average_multiplier(flow, freq):
    """Action of the unit-time averaging operator on one Fourier mode.

    Modes with freq . velocity = 0 are flow-invariant (multiplier 1);
    nonzero integer values of freq . velocity kill the mode entirely.
    """
    dot = float(np.dot(freq, flow.velocity))
    if dot == 0.0:
        return 1.0 + 0.0j
    z = 2j * math.pi * dot
    return (cmath.exp(z) - 1.0) / z


def average_operator(flow, target):
    """Average of the target over forward orbit segments of unit length.

    Structured inputs are handled in closed form: Fourier modes on torus
    flows, monomials and shifted logarithms on the exponential flow.
    Generic callables fall back to composite Simpson quadrature with 64
    panels.
    """
    if isinstance(flow, TorusLinearFlow) and isinstance(target, TrigPolynomial):
        return target.map_coefficients(lambda n: unit_average_multiplier(flow, n))
    if isinstance(flow, ScalarExpFlow) and isinstance(target, Monomial):
        d = target.degree
        factor = 1.0 if d == 0 else (math.exp(d) - 1.0) / d
        return Monomial(target.coefficient * factor, d)
    if isinstance(flow, ScalarExpFlow) and isinstance(target, LogPlusConstant):
        return LogPlusConstant(target.offset + 0.5)
    if not callable(target):
        raise ValueError(f"cannot average a {type(target).__name__}")

    def averaged(x):
        return simpson(lambda s: target(flow.advance(x, s)), 0.0, 1.0, 64)

    return averaged


@dataclass
class Obstruction:
    freq: tuple
    coefficient: complex
    dot_velocity: float
    multiplier_magnitude: float


@dataclass
class EmbeddingSolveResult:
    """Solution of average(b) = target, or the list of resonant modes."""

    solution: object = None
    obstructions: list = field(default_factory=list)
    small_divisor_floor: float = RESONANCE_MULTIPLIER_FLOOR

    @property
    def ok(self):
        return not self.obstructions


def solve_embedding(flow, target):
    """Invert the unit-time averaging operator on a trigonometric target.

    Divides each Fourier coefficient by its multiplier.  Modes whose
    multiplier magnitude falls below RESONANCE_MULTIPLIER_FLOOR (the
    resonant case freq . velocity a nonzero integer, and near-resonances
    indistinguishable from it) are reported as obstructions instead of
    being divided.
    """
    if not isinstance(flow, TorusLinearFlow) or not isinstance(target, TrigPolynomial):
        raise ValueError("solve_embedding handles torus flows and trig polynomials")
    obstructions = []
    solved = {}
    for n, c in target.coefficients.items():
        m = unit_average_multiplier(flow, n)
        if abs(m) <= RESONANCE_MULTIPLIER_FLOOR:
            obstructions.append(
                Obstruction(n, c, float(np.dot(n, flow.velocity)), abs(m))
            )
        else:
            solved[n] = c / m
    if obstructions:
        obstructions.sort(key=lambda o: o.freq)
        return EmbeddingSolveResult(None, obstructions)
    return EmbeddingSolveResult(TrigPolynomial(solved, dim=target.dim), [])


def resonant_frequencies(flow, max_freq):
    """Integer vectors with freq . velocity within tolerance of a nonzero integer."""
    out = []
    ranges = [range(-max_freq, max_freq + 1)] * flow.dim
    grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, flow.dim)
    for n in grid:
        dot = float(np.dot(n, flow.velocity))
        nearest = round(dot)
        if nearest != 0 and abs(dot - nearest) <= INTEGER_RESONANCE_TOL:
            out.append(tuple(int(v) for v in n))
    return out


@dataclass
class DerivativeReport:
    """Orbit-derivative estimates of a candidate average at sample points."""

    samples: list
    derivatives: list
    mean: float
    spread: float
    obstruction: bool
    inconclusive: bool
    constant_tol: float
    zero_tol: float


def derivative_obstruction_test(flow, target, samples, step_grid=None,
                                constant_tol=1e-6, zero_tol=1e-8,
                                convergence_tol=1e-5):
    """Estimate d/dt target(flow_t x) at t=0 and flag the constant case.

    A genuine unit-time orbit average has orbit derivative of mean zero
    against every time-one invariant measure; on the torus the uniform
    measure is used, approximated by the sample mean.  A derivative field
    that is constant to within ``constant_tol`` and decisively nonzero
    (beyond ``zero_tol``) certifies that no continuous solution exists.

    Central differences over ``step_grid`` are accelerated by one
    Richardson step; samples whose estimates do not settle within
    ``convergence_tol`` mark the report inconclusive.  Samples must avoid
    discontinuity loci of the target by at least the largest step times
    the velocity norm.
    """
    if step_grid is None:
        step_grid = (1e-3, 5e-4, 2.5e-4)
    if len(step_grid) < 2 or any(b >= a for a, b in zip(step_grid, step_grid[1:])):
        raise ValueError("step grid must strictly decrease")
    if not samples:
        raise ValueError("need at least one sample point")
    derivatives = []
    inconclusive = False
    for x in samples:
        central = [
            (target(flow.advance(x, h)) - target(flow.advance(x, -h))) / (2.0 * h)
            for h in step_grid
        ]
        refined = [
            (4.0 * b - a) / 3.0 for a, b in zip(central, central[1:])
        ]
        if len(refined) > 1:
            settle = max(
                abs(b - a) for a, b in zip(refined, refined[1:])
            )
            if settle > convergence_tol * max(1.0, abs(refined[-1])):
                inconclusive = True
        derivatives.append(refined[-1])
    mean = float(np.mean(derivatives))
    spread = float(np.max(np.abs(np.asarray(derivatives) - mean)))
    obstruction = (not inconclusive) and spread <= constant_tol and abs(mean) > zero_tol
    return DerivativeReport(
        list(samples),
        derivatives,
        mean,
        spread,
        obstruction,
        inconclusive,
        constant_tol,
        zero_tol,
    )


def torus_grid(n, dim, avoid=None, margin=0.0):
    """Uniform n^dim sample grid on the torus, optionally filtered.

    ``avoid`` maps a point to the distance from the nearest discontinuity;
    points closer than ``margin`` are dropped.
    """
    axes = [np.arange(n) / n] * dim
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    points = [tuple(row) for row in mesh]
    if avoid is not None:
        points = [x for x in points if avoid(np.asarray(x)) > margin]
    return points


def flow_derivative(flow, g, fd_step=1e-6):
    """Directional derivative of g along the flow at time zero.

    Exact on trigonometric polynomials over torus flows and on shifted
    logarithms over the exponential flow; central differences otherwise.
    """
    if isinstance(flow, TorusLinearFlow) and isinstance(g, TrigPolynomial):
        return g.map_coefficients(
            lambda n: 2j * math.pi * float(np.dot(n, flow.velocity))
        )
    if isinstance(flow, ScalarExpFlow) and isinstance(g, LogPlusConstant):
        return Monomial(1.0, 0)

    def derivative(x):
        return (g(flow.advance(x, fd_step)) - g(flow.advance(x, -fd_step))) / (
            2.0 * fd_step
        )

    return derivative


def _orbit_integral(flow, b, x, t, panels_per_unit=128):
    if isinstance(flow, TorusLinearFlow) and isinstance(b, TrigPolynomial):
        velocity = flow.velocity

        def factor(n):
            dot = float(np.dot(n, velocity))
            if dot == 0.0:
                return t
            z = 2j * math.pi * dot
            return (cmath.exp(z * t) - 1.0) / z

        total = 0.0 + 0.0j
        for n, c in b.coefficients.items():
            total += c * factor(n) * cmath.exp(2j * math.pi * float(np.dot(n, x)))
        return total.real
    panels = max(8, math.ceil(panels_per_unit * t))
    return simpson(lambda s: b(flow.advance(x, s)), 0.0, t, panels)


@dataclass
class CoboundaryCertificate:
    """Residuals of the fundamental-theorem identity at several horizons."""

    horizons: tuple
    residuals: list
    tolerance: float

    @property
    def worst(self):
        return max(self.residuals)

    @property
    def ok(self):
        return self.worst <= self.tolerance


def coboundary_lift(flow, g, sample_points, horizons=(0.5, 1.0, 2.0, 5.0),
                    fd_step=1e-6, certificate_tol=1e-7):
    """Derivative of g along the flow, certified as a coboundary.

    Returns (b, certificate) where b is the orbit derivative of g and the
    certificate records, for each horizon t, the worst residual of
    integral of b over [0, t] minus (g(flow_t x) - g(x)) across the sample
    points.  Raises NumericFailure when the worst residual exceeds
    ``certificate_tol``.
    """
    if not sample_points:
        raise ValueError("need at least one sample point")
    b = flow_derivative(flow, g, fd_step=fd_step)
    residuals = []
    for t in horizons:
        worst = 0.0
        for x in sample_points:
            lhs = _orbit_integral(flow, b, x, t)
            rhs = g(flow.advance(x, t)) - g(flow.advance(x, 0.0))
            worst = max(worst, abs(lhs - rhs))
        residuals.append(worst)
    certificate = CoboundaryCertificate(tuple(horizons), residuals, certificate_tol)
    if not certificate.ok:
        raise NumericFailure(
            f"coboundary certificate failed; worst residual {certificate.worst:.3e}"
        )
    return b, certificate


def resolvent_solve(flow, target, lam):
    """Solve average(a) - lam * a = target for lam > 1 on a 1-d torus flow.

    The averaging operator never expands sup norms, so the resolvent at
    lam > 1 is a bounded inverse; coefficientwise the solution divides by
    multiplier - lam.  Returns (a, centered) where centered subtracts
    lam times the mean of a, and verifies the identity on a grid to
    1e-10 before returning.
    """
    if lam <= 1.0:
        raise ValueError("resolvent parameter must exceed 1")
    if not isinstance(flow, TorusLinearFlow) or flow.dim != 1:
        raise ValueError("resolvent_solve expects a 1-d torus flow")
    if not isinstance(target, TrigPolynomial):
        raise ValueError("resolvent_solve expects a trigonometric target")
    a = target.map_coefficients(
        lambda n: 1.0 / (unit_average_multiplier(flow, n) - lam)
    )
    averaged = average_operator(flow, a)
    grid = np.arange(101) / 101.0
    residual = max(
        abs(averaged(x) - lam * a(x) - target(x)) for x in grid
    )
    if residual > 1e-10:
        raise NumericFailure(f"resolvent identity residual {residual:.3e}")
    centered = a - TrigPolynomial.constant(lam * a.mean(), dim=1)
    return a, centered
