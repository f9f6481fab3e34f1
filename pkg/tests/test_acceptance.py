"""Acceptance gate.

One test per release criterion.  Every test prints a single verdict line
(visible under ``pytest -s``) and then asserts, so failures stay loud.
All expected values come from closed forms or independent in-test
arithmetic: plain bisection, explicit stationary vectors, brute Simpson
sums, and integer matrix powers, never the code paths under test.
"""

import math
import time
from importlib.resources import files
from pathlib import Path

import numpy as np

from suspflow import (
    CylinderFlowFunction,
    DiscreteSpectrumProblem,
    LocallyConstantFunction,
    LogPlusConstant,
    MatrixCocycle,
    Monomial,
    PeriodicStream,
    ScalarExpFlow,
    Sft,
    SpectrumProblem,
    SuspensionFlow,
    TorusLinearFlow,
    TrigPolynomial,
    abramov_entropy,
    average_operator,
    bernoulli_measure,
    cocycle_flow_family,
    derivative_obstruction_test,
    equivalence_pipeline,
    flow_map,
    flow_pressure,
    gibbs_measure,
    integral_flow_family,
    level_set_dimension,
    lift,
    linear_flow_family,
    markov_measure,
    pressure,
    resolvent_solve,
    solve_embedding,
    spectrum_sweep,
    torus_grid,
)
from suspflow.fileio import load_cocycle_matrices, load_flow_spec

DATA = Path(str(files("suspflow") / "data"))
FULL = Sft.full_shift(2)
GOLDEN = Sft.golden_mean()
PHI = (1.0 + math.sqrt(5.0)) / 2.0
LOG_PHI = math.log(PHI)


def verdict(ok, label, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    assert ok, f"{label}: {detail}"


def zero_on(sft):
    return LocallyConstantFunction.constant(sft, 0.0)


def bundled_flow(name):
    _, flow = load_flow_spec(DATA / name)
    return flow


def binary_entropy(a):
    return -(a * math.log(a) + (1.0 - a) * math.log(1.0 - a))


def bisect(fn, lo, hi, iters=200):
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if fn(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def simpson_panels(fn, a, b, panels):
    xs = np.linspace(a, b, 2 * panels + 1)
    ys = np.array([fn(x) for x in xs])
    h = (b - a) / (2 * panels)
    return h / 3.0 * (ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-2:2].sum())


def int_matpow(m, n):
    out = [[1 if i == j else 0 for j in range(len(m))] for i in range(len(m))]
    for _ in range(n):
        out = [
            [sum(out[i][l] * m[l][j] for l in range(len(m))) for j in range(len(m))]
            for i in range(len(m))
        ]
    return out


def test_criterion_1_pressure_oracles():
    t0 = time.perf_counter()
    p_full = pressure(FULL, zero_on(FULL))
    p_golden = pressure(GOLDEN, zero_on(GOLDEN))
    log_bern = LocallyConstantFunction(
        FULL, 1, {(0,): math.log(0.3), (1,): math.log(0.7)}
    )
    p_bern = pressure(FULL, log_bern)
    elapsed = time.perf_counter() - t0
    worst = max(
        abs(p_full - math.log(2.0)), abs(p_golden - LOG_PHI), abs(p_bern)
    )
    verdict(
        worst <= 1e-10 and elapsed < 1.0,
        "criterion 1, pressure oracles",
        f"max error {worst:.2e} (tol 1e-10), elapsed {elapsed:.2f}s (limit 1s)",
    )


def test_criterion_2_flow_entropy_identity_on_six_pairs():
    # bundled roof tables, restated here so the oracle side stays frozen
    unit = bundled_flow("unit_flow.json")
    fib = bundled_flow("fib_flow.json")
    varying = bundled_flow("varying_flow.json")
    golden = bundled_flow("golden_flow.json")
    vary_roof = {(0, 0): 1.0, (0, 1): 1.3, (1, 0): 0.8, (1, 1): 1.1}

    def bern_h(p):
        return -(p * math.log(p) + (1 - p) * math.log(1 - p))

    golden_pi = (PHI**2 / (1 + PHI**2), 1.0 / (1 + PHI**2))
    kernel_pi = (1.0 / 1.4, 0.4 / 1.4)
    kernel_h = kernel_pi[0] * -(0.6 * math.log(0.6) + 0.4 * math.log(0.4))

    pairs = [
        (unit, bernoulli_measure(FULL, [0.5, 0.5]), math.log(2.0), 1.0),
        (unit, bernoulli_measure(FULL, [0.3, 0.7]), bern_h(0.3), 1.0),
        (fib, bernoulli_measure(FULL, [0.3, 0.7]), bern_h(0.3), 0.3 + 2 * 0.7),
        (
            varying,
            bernoulli_measure(FULL, [0.25, 0.75]),
            bern_h(0.25),
            sum(
                (0.25 if a == 0 else 0.75) * (0.25 if b == 0 else 0.75) * v
                for (a, b), v in vary_roof.items()
            ),
        ),
        (
            golden,
            gibbs_measure(GOLDEN, zero_on(GOLDEN)),
            LOG_PHI,
            golden_pi[0] + 2 * golden_pi[1],
        ),
        (
            golden,
            markov_measure(GOLDEN, np.array([[0.6, 0.4], [1.0, 0.0]])),
            kernel_h,
            kernel_pi[0] + 2 * kernel_pi[1],
        ),
    ]
    worst = max(
        abs(abramov_entropy(flow, nu) * mean_roof - h)
        for flow, nu, h, mean_roof in pairs
    )
    verdict(
        worst <= 1e-9,
        "criterion 2, flow entropy times mean roof equals base entropy",
        f"6 measure-roof pairs, max gap {worst:.2e} (tol 1e-9)",
    )


def test_criterion_3_flow_pressure_root_matches_scalar_oracle():
    flow = bundled_flow("fib_flow.json")
    root = flow_pressure(flow, lift(flow, zero_on(FULL)))
    oracle = bisect(lambda s: math.exp(-s) + math.exp(-2.0 * s) - 1.0, 0.1, 1.0)
    gap = abs(root - oracle)
    verdict(
        gap <= 1e-9 and abs(oracle - LOG_PHI) <= 1e-12,
        "criterion 3, flow pressure root",
        f"|root - bisection oracle| = {gap:.2e} (tol 1e-9), oracle is log phi",
    )


def test_criterion_4_lifted_tables_integrate_back_exactly():
    flow = bundled_flow("golden_flow.json")
    rng = np.random.default_rng(424)
    worst = 0.0
    endpoint_worst = 0.0
    for trial in range(20):
        depth = 1 if trial % 2 == 0 else 2
        table = LocallyConstantFunction(
            GOLDEN,
            depth,
            {w: float(rng.normal()) for w in GOLDEN.words(depth)},
        )
        g = lift(flow, table)
        for w in GOLDEN.words(depth):
            roof_here = flow.roof(w[:1])
            quad = simpson_panels(lambda s: g.value(w, s), 0.0, roof_here, 4096)
            worst = max(worst, abs(quad - table(w)))
            endpoint_worst = max(
                endpoint_worst, abs(g.value(w, 0.0)), abs(g.value(w, roof_here))
            )
    verdict(
        worst <= 1e-9 and endpoint_worst == 0.0,
        "criterion 4, lifted cylinder data",
        f"20 random tables: max quadrature gap {worst:.2e} (tol 1e-9), "
        f"endpoint values {endpoint_worst:.1e}",
    )


def test_criterion_5_pipeline_closure_and_cocycle_decay():
    flow = bundled_flow("golden_flow.json")
    rng = np.random.default_rng(77)
    table = LocallyConstantFunction(
        GOLDEN, 1, {w: float(rng.normal()) for w in GOLDEN.words(1)}
    )
    fam = integral_flow_family(flow, lift(flow, table))
    report, _ = equivalence_pipeline(flow, fam)
    worst_defect = max(v for _, v in report.flow_curve)

    k, mats = load_cocycle_matrices(DATA / "canonical.cocycle")
    assert k == GOLDEN.k
    cocycle_fam = cocycle_flow_family(flow, MatrixCocycle(GOLDEN, mats))
    cocycle_report, _ = equivalence_pipeline(flow, cocycle_fam)
    defects = dict(cocycle_report.flow_curve)
    d_hi = defects[64.0 * flow.roof.sup]
    d_lo = defects[4.0 * flow.roof.sup]
    verdict(
        worst_defect < 1e-8 and report.success and d_hi < 0.25 * d_lo,
        "criterion 5, reduction pipeline",
        f"lifted family: worst defect {worst_defect:.1e} (tol 1e-8); "
        f"cocycle family: defect ratio {d_hi / d_lo:.3f} (limit 0.25)",
    )


def test_criterion_6_digit_frequency_spectrum():
    t0 = time.perf_counter()
    ones = LocallyConstantFunction(FULL, 1, {(0,): 0.0, (1,): 1.0})
    problem = DiscreteSpectrumProblem(
        FULL, ones, LocallyConstantFunction.constant(FULL, 1.0),
        LocallyConstantFunction.constant(FULL, 1.0),
    )
    alphas = [round(0.1 * j, 1) for j in range(1, 10)]
    result = spectrum_sweep(problem, alphas)
    closed_gap = max(
        abs(r.dim_root - binary_entropy(r.alpha)) for r in result.rows
    )
    route_gap = max(
        abs(r.dim_root - r.dim_variational) for r in result.rows
    )
    empty_flagged = (
        level_set_dimension(problem, 1.5) is None
        and spectrum_sweep(problem, [1.5]).rows[0].empty
    )
    elapsed = time.perf_counter() - t0
    verdict(
        closed_gap <= 1e-4 and route_gap <= 1e-3 and empty_flagged and elapsed < 30.0,
        "criterion 6, digit frequency spectrum",
        f"closed-form gap {closed_gap:.2e} (tol 1e-4), route gap {route_gap:.2e} "
        f"(tol 1e-3), alpha=1.5 empty, elapsed {elapsed:.1f}s (limit 30s)",
    )


def test_criterion_7_unit_roof_spectrum_equals_discrete():
    flow = bundled_flow("unit_flow.json")
    ones = LocallyConstantFunction(FULL, 1, {(0,): 0.0, (1,): 1.0})
    flow_problem = SpectrumProblem(
        flow,
        integral_flow_family(flow, lift(flow, ones)),
        linear_flow_family(flow, 1.0),
        CylinderFlowFunction.constant(flow, 1.0),
    )
    discrete = DiscreteSpectrumProblem(
        FULL, ones, LocallyConstantFunction.constant(FULL, 1.0),
        LocallyConstantFunction.constant(FULL, 1.0),
    )
    alphas = [0.2, 0.35, 0.5, 0.65, 0.8]
    flow_rows = spectrum_sweep(flow_problem, alphas).rows
    disc_rows = spectrum_sweep(discrete, alphas).rows
    worst = max(
        max(abs(f.dim_root - d.dim_root), abs(f.dim_variational - d.dim_variational))
        for f, d in zip(flow_rows, disc_rows)
    )
    verdict(
        worst <= 1e-9,
        "criterion 7, unit roof reduces to the discrete spectrum",
        f"pointwise gap {worst:.2e} on {len(alphas)} levels (tol 1e-9)",
    )


def test_criterion_8_embedding_lab():
    # exponential flow closed forms
    exp_flow = ScalarExpFlow()
    avg_log = average_operator(exp_flow, LogPlusConstant(0.0))
    log_gap = max(
        abs(avg_log(x) - (0.5 + math.log(x))) for x in (0.5, 1.0, math.e, 4.0)
    )
    rng = np.random.default_rng(8128)
    mono_gap = 0.0
    for d in (1, 2, 3, 4):
        c = float(rng.normal())
        avg = average_operator(exp_flow, Monomial(c, d))
        factor = (math.exp(d) - 1.0) / d
        mono_gap = max(
            mono_gap,
            max(abs(avg(x) - c * factor * x**d) for x in (0.3, 1.0, 1.7)),
        )

    # sawtooth obstruction on a 2-torus translation
    velocity = (math.sqrt(2.0) - 1.0, math.sqrt(5.0) - 2.0)
    torus = TorusLinearFlow(velocity)
    weights = np.array([1.0, 1.0])

    def saw(x):
        return float(np.dot(weights, np.asarray(x, dtype=float) % 1.0))

    def gap_distance(x):
        frac = np.asarray(x) % 1.0
        return float(np.min(np.minimum(frac, 1.0 - frac)))

    samples = torus_grid(7, 2, avoid=gap_distance, margin=0.05)
    saw_report = derivative_obstruction_test(torus, saw, samples)
    saw_gap = abs(saw_report.mean - sum(velocity))

    # round trips through the averaging operator
    trip_gap = 0.0
    for _ in range(50):
        target = TrigPolynomial.random_real(rng, 2)
        result = solve_embedding(torus, target)
        assert result.ok
        back = average_operator(torus, result.solution)
        trip_gap = max(trip_gap, back.coefficient_distance(target))

    # resolvent identity on random targets and parameters
    line = TorusLinearFlow([(math.sqrt(5.0) - 1.0) / 2.0])
    grid = np.arange(173) / 173.0
    res_gap = 0.0
    for _ in range(20):
        target = TrigPolynomial.random_real(rng, 1)
        lam = float(rng.uniform(1.1, 5.0))
        a, _ = resolvent_solve(line, target, lam)
        averaged = average_operator(line, a)
        res_gap = max(
            res_gap,
            max(abs(averaged(x) - lam * a(x) - target(x)) for x in grid),
        )

    ok = (
        log_gap <= 1e-12
        and mono_gap <= 1e-12
        and saw_report.obstruction
        and saw_gap <= 1e-6
        and trip_gap <= 1e-12
        and res_gap < 1e-10
    )
    verdict(
        ok,
        "criterion 8, embedding laboratory",
        f"log average gap {log_gap:.1e}, monomial gap {mono_gap:.1e} (tol 1e-12); "
        f"sawtooth derivative gap {saw_gap:.1e} (tol 1e-6), obstruction "
        f"{saw_report.obstruction}; 50 round trips {trip_gap:.1e} (tol 1e-12); "
        f"20 resolvent residuals {res_gap:.1e} (tol 1e-10)",
    )


def test_criterion_9_property_battery():
    rng = np.random.default_rng(31337)
    violations = []

    # flow semigroup property
    roof_flow = bundled_flow("golden_flow.json")
    p = roof_flow.point(PeriodicStream((0, 0, 1)), 0.2)
    for _ in range(50):
        t, s = rng.uniform(0.0, 10.0, size=2)
        a = flow_map(flow_map(p, t), s)
        b = flow_map(p, t + s)
        if a.window(3) != b.window(3) or abs(a.height - b.height) > 1e-9:
            violations.append(f"semigroup at t={t}, s={s}")

    # pressure translation and monotonicity
    for sft in (FULL, GOLDEN):
        for _ in range(10):
            vals = {w: float(rng.normal()) for w in sft.words(1)}
            phi = LocallyConstantFunction(sft, 1, vals)
            c = float(rng.normal())
            shifted = LocallyConstantFunction(
                sft, 1, {w: v + c for w, v in vals.items()}
            )
            if abs(pressure(sft, shifted) - pressure(sft, phi) - c) > 1e-10:
                violations.append("pressure translation")
            bumped = LocallyConstantFunction(
                sft, 1, {w: v + abs(float(rng.normal())) for w, v in vals.items()}
            )
            if pressure(sft, bumped) < pressure(sft, phi) - 1e-12:
                violations.append("pressure monotonicity")

    # variational inequality: entropy plus integral never beats pressure
    for _ in range(10):
        vals = {w: float(rng.normal()) for w in GOLDEN.words(1)}
        phi = LocallyConstantFunction(GOLDEN, 1, vals)
        p_row = float(rng.uniform(0.05, 0.95))
        nu = markov_measure(GOLDEN, np.array([[p_row, 1.0 - p_row], [1.0, 0.0]]))
        if nu.entropy() + nu.integrate(phi) > pressure(GOLDEN, phi) + 1e-10:
            violations.append("variational inequality")

    # trace and word-count identities against integer matrix powers
    for sft in (FULL, GOLDEN):
        m = [[int(v) for v in row] for row in sft.matrix]
        for n in range(1, 9):
            power = int_matpow(m, n)
            trace = sum(power[i][i] for i in range(len(m)))
            if len(sft.periodic_points(n)) != trace:
                violations.append(f"trace identity n={n}")
            prev = int_matpow(m, n - 1)
            count = sum(sum(row) for row in prev)
            if sft.word_count(n) != count:
                violations.append(f"word count n={n}")

    verdict(
        not violations,
        "criterion 9, invariant property battery",
        f"{len(violations)} violations"
        + (f" ({violations[:3]})" if violations else " across all suites"),
    )
