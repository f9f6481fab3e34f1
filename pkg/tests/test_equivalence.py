"""Reduction pipeline from flow families to lifted cylinder data.

Crossing values and interpolated evaluations are checked against explicit
matrix products and hand-walked orbits before the pipeline itself runs.
"""

import json
import math

import numpy as np
import pytest

from suspflow import (
    AdditiveFamily,
    LocallyConstantFunction,
    MatrixCocycle,
    PeriodicStream,
    RoofFunction,
    Sft,
    SuspensionFlow,
    birkhoff_sum,
    cocycle_flow_family,
    crossing_diagnostic,
    default_samples,
    equivalence_pipeline,
    flow_defect,
    flow_map,
    induced_sequence,
    integral_flow_family,
    lift,
    linear_flow_family,
    orbit_integral,
)

GOLDEN = Sft.golden_mean()
FULL = Sft.full_shift(2)

CANONICAL = [
    np.array([[2.0, 1.0], [1.0, 1.0]]),
    np.array([[1.0, 1.0], [1.0, 2.0]]),
]


def golden_flow():
    roof = RoofFunction.from_values(GOLDEN, 1, {(0,): 1.0, (1,): 2.0})
    return SuspensionFlow(GOLDEN, roof)


def unit_flow():
    return SuspensionFlow(FULL, RoofFunction.constant(FULL, 1.0))


def test_integral_family_crossing_values_match_orbit_integrals():
    flow = golden_flow()
    table = LocallyConstantFunction(GOLDEN, 1, {(0,): 0.6, (1,): -0.3})
    g = lift(flow, table)
    fam = integral_flow_family(flow, g)
    stream = PeriodicStream((0, 0, 1))
    values = fam.crossing_values(stream, 6)
    p = flow.point(stream, 0.0)
    t = 0.0
    for n in range(1, 7):
        t = flow.roof.return_time(stream.window(6), n)
        assert values[n - 1] == pytest.approx(orbit_integral(g, p, t), abs=1e-12)


def test_linear_family_is_exactly_linear():
    flow = golden_flow()
    fam = linear_flow_family(flow, 0.7)
    p = flow.point(PeriodicStream((0, 1)), 0.5)
    for t in (0.0, 0.25, 1.0, 3.75, 10.0):
        assert fam.value(p, t) == 0.7 * t
    with pytest.raises(ValueError):
        fam.value(p, -1.0)


def spectral_log_norm(word):
    prod = np.eye(2)
    for s in word:
        prod = CANONICAL[s] @ prod
    return math.log(np.linalg.norm(prod, 2))


def test_cocycle_crossing_values_are_matrix_log_norms():
    flow = golden_flow()
    fam = cocycle_flow_family(flow, MatrixCocycle(GOLDEN, CANONICAL))
    stream = PeriodicStream((0, 1, 0, 0))
    values = fam.crossing_values(stream, 8)
    word = stream.window(8)
    for n in range(1, 9):
        assert values[n - 1] == pytest.approx(spectral_log_norm(word[:n]), abs=1e-12)


def test_cocycle_family_interpolates_between_crossings():
    flow = golden_flow()
    fam = cocycle_flow_family(flow, MatrixCocycle(GOLDEN, CANONICAL))
    stream = PeriodicStream((0, 1))
    p = flow.point(stream, 0.0)
    word = stream.window(4)
    # crossings from height zero happen at t = 1 and t = 3 on this orbit
    assert fam.value(p, 1.0) == pytest.approx(spectral_log_norm(word[:1]), abs=1e-12)
    assert fam.value(p, 3.0) == pytest.approx(spectral_log_norm(word[:2]), abs=1e-12)
    v1 = spectral_log_norm(word[:1])
    v2 = spectral_log_norm(word[:2])
    # halfway through the length-2 segment over symbol 1
    assert fam.value(p, 2.0) == pytest.approx(0.5 * (v1 + v2), abs=1e-12)


def test_cocycle_family_rejects_mismatched_subshift():
    flow = golden_flow()
    with pytest.raises(ValueError):
        cocycle_flow_family(flow, MatrixCocycle(FULL, CANONICAL))


def test_additive_family_semigroup_property():
    flow = golden_flow()
    table = LocallyConstantFunction(GOLDEN, 1, {(0,): 1.1, (1,): -0.4})
    fam = integral_flow_family(flow, lift(flow, table))
    p = flow.point(PeriodicStream((0, 1, 0)), 0.4)
    rng = np.random.default_rng(7)
    for _ in range(25):
        t, s = rng.uniform(0.0, 6.0, size=2)
        lhs = fam.value(p, t + s)
        rhs = fam.value(p, t) + fam.value(flow_map(p, t), s)
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_induced_sequence_of_integral_family_is_exact():
    flow = golden_flow()
    table = LocallyConstantFunction(GOLDEN, 1, {(0,): 0.25, (1,): -0.75})
    fam = integral_flow_family(flow, lift(flow, table))
    induced = induced_sequence(flow, fam)
    assert isinstance(induced, AdditiveFamily)
    for word in GOLDEN.words(7):
        for n in (1, 3, 6):
            assert induced.value(word, n) == pytest.approx(
                birkhoff_sum(table, word, n), abs=1e-12
            )


def test_induced_cocycle_sequence_matches_discrete_cocycle():
    flow = golden_flow()
    cocycle = MatrixCocycle(GOLDEN, CANONICAL)
    induced = induced_sequence(flow, cocycle_flow_family(flow, cocycle))
    for word in GOLDEN.words(5):
        assert induced.value(word, 4) == pytest.approx(
            cocycle.value(word, 4), abs=1e-12
        )


def test_flow_defect_input_validation():
    flow = golden_flow()
    fam = linear_flow_family(flow, 1.0)
    candidate = lift(flow, LocallyConstantFunction.constant(GOLDEN, 1.0))
    samples = default_samples(flow)
    with pytest.raises(ValueError):
        flow_defect(flow, fam, candidate, [2.0, 1.0], samples)
    with pytest.raises(ValueError):
        flow_defect(flow, fam, candidate, [-1.0, 2.0], samples)
    with pytest.raises(ValueError):
        flow_defect(flow, fam, candidate, [1.0, 2.0], [])


def test_default_samples_cover_all_cylinders():
    flow = golden_flow()
    samples = default_samples(flow)
    seen = {p.window(1) for p in samples}
    assert seen == {(0,), (1,)}
    for p in samples:
        assert 0.0 <= p.height < flow.roof(p.window(1))


def test_pipeline_closes_exactly_on_integral_families():
    flow = golden_flow()
    table = LocallyConstantFunction(GOLDEN, 1, {(0,): 1.0, (1,): 0.0})
    fam = integral_flow_family(flow, lift(flow, table), label="visits-0")
    report, lifted = equivalence_pipeline(flow, fam)
    assert report.success
    assert report.final_flow_defect == 0.0
    assert report.candidate_table.values == table.values
    # every discrete defect vanishes as well
    assert max(v for _, v in report.discrete_curve) == 0.0
    assert max(v for _, v in report.flow_curve) == 0.0
    assert lifted.table is report.candidate_table


def test_pipeline_linear_family_defect_decays_like_one_over_t():
    flow = golden_flow()
    fam = linear_flow_family(flow, 0.7)
    report, _ = equivalence_pipeline(flow, fam)
    assert not report.success
    times = [t for t, _ in report.flow_curve]
    defects = dict(report.flow_curve)
    t_hi = times[-1]
    t_lo = t_hi / 16.0
    assert t_lo in defects
    assert defects[t_hi] / defects[t_lo] == pytest.approx(1.0 / 16.0, rel=1e-6)


def test_pipeline_cocycle_defect_decays_but_does_not_close():
    flow = golden_flow()
    fam = cocycle_flow_family(flow, MatrixCocycle(GOLDEN, CANONICAL))
    report, _ = equivalence_pipeline(flow, fam)
    assert not report.success
    defects = dict(report.flow_curve)
    t_hi = max(defects)
    t_lo = 4.0 * flow.roof.sup
    assert defects[t_hi] < 0.25 * defects[t_lo]
    assert report.final_flow_defect > 0.0


def test_report_serialization_round_trip():
    flow = golden_flow()
    table = LocallyConstantFunction(GOLDEN, 1, {(0,): 0.5, (1,): 0.5})
    report, _ = equivalence_pipeline(
        flow, integral_flow_family(flow, lift(flow, table), label="halves")
    )
    blob = json.loads(report.to_json())
    assert blob == report.to_dict()
    assert blob["family"] == "halves"
    assert blob["success"] is True
    assert blob["candidate"]["values"] == {"0": 0.5, "1": 0.5}
    assert blob["horizon"] == pytest.approx(64.0 * flow.roof.sup)


def test_pipeline_sampled_discrete_path_on_full_shift():
    # unit roof, horizon 32: words of length 32 cannot be enumerated, so
    # discrete defects switch to the periodic sample points
    flow = unit_flow()
    table = LocallyConstantFunction(FULL, 1, {(0,): 0.2, (1,): 0.9})
    fam = integral_flow_family(flow, lift(flow, table))
    report, _ = equivalence_pipeline(flow, fam, horizon=32.0)
    assert report.success
    lengths = [n for n, _ in report.discrete_curve]
    assert lengths[-1] == 32
    assert max(v for _, v in report.discrete_curve) == 0.0


def test_crossing_diagnostic_decays():
    flow = golden_flow()
    fam = cocycle_flow_family(flow, MatrixCocycle(GOLDEN, CANONICAL))
    base_points = GOLDEN.periodic_points_up_to(3)
    curve = crossing_diagnostic(flow, fam, [4.0, 16.0, 64.0], base_points)
    values = [v for _, v in curve]
    assert all(np.isfinite(values))
    assert values[-1] < values[0]
