"""Locally constant functions and potential families.

Matrix cocycle values are checked against explicit numpy products; the
additive machinery against hand-rolled Birkhoff sums.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from suspflow import (
    AdditiveFamily,
    LocallyConstantFunction,
    MatrixCocycle,
    Sft,
    almost_additivity_constant,
    birkhoff_sum,
    block_average,
    equivalence_defect,
    orbit_average,
    sampled_equivalence_defect,
)

GOLDEN = Sft.golden_mean()
FULL = Sft.full_shift(2)

MILD_PAIR = [np.array([[10.0, 9.0], [9.0, 10.0]]), np.array([[10.0, 8.0], [8.0, 9.0]])]


def manual_birkhoff(f, word, n):
    return sum(f(word[j:]) for j in range(n))


def test_table_validation_is_total():
    with pytest.raises(ValueError):
        LocallyConstantFunction(GOLDEN, 2, {(0, 0): 1.0})  # missing words
    with pytest.raises(ValueError):
        LocallyConstantFunction(GOLDEN, 1, {(0,): 1.0, (1,): 2.0, (2,): 3.0})
    with pytest.raises(ValueError):
        LocallyConstantFunction(GOLDEN, 2, {w: 0.0 for w in GOLDEN.words(2)} | {(1, 1): 0.0})


def test_call_reads_prefix():
    f = LocallyConstantFunction(GOLDEN, 2, {(0, 0): 1.0, (0, 1): 2.0, (1, 0): 3.0})
    assert f((0, 1, 0, 0)) == 2.0
    assert f((1, 0)) == 3.0
    with pytest.raises(ValueError):
        f((0,))  # too short


def test_refine_preserves_values():
    f = LocallyConstantFunction(GOLDEN, 1, {(0,): 2.0, (1,): -1.0})
    g = f.refine(3)
    assert g.depth == 3
    for w in GOLDEN.words(4):
        assert g(w) == f(w)


def test_arithmetic_and_norms():
    f = LocallyConstantFunction(FULL, 1, {(0,): 1.0, (1,): -2.0})
    g = LocallyConstantFunction(FULL, 2, {w: float(w[0] + w[1]) for w in FULL.words(2)})
    h = f + g * 2.0 - f
    for w in FULL.words(2):
        assert h(w) == pytest.approx(2.0 * g(w), abs=1e-15)
    assert f.sup_norm() == 2.0
    assert f.min_value() == -2.0
    assert f.max_value() == 1.0
    assert (-f)((1, 1)) == 2.0


def test_combine_mixed_depths():
    f = LocallyConstantFunction(FULL, 1, {(0,): 1.0, (1,): 0.0})
    g = LocallyConstantFunction(FULL, 2, {w: float(w[1]) for w in FULL.words(2)})
    h = LocallyConstantFunction.combine([(2.0, f), (-1.0, g)])
    assert h.depth == 2
    for w in FULL.words(2):
        assert h(w) == 2.0 * f(w) - g(w)


def test_birkhoff_sum_matches_manual():
    f = LocallyConstantFunction(GOLDEN, 2, {(0, 0): 1.0, (0, 1): -0.5, (1, 0): 2.0})
    word = (0, 1, 0, 0, 1, 0)
    for n in range(1, 5):
        assert birkhoff_sum(f, word, n) == pytest.approx(manual_birkhoff(f, word, n))
    with pytest.raises(ValueError):
        birkhoff_sum(f, (0, 1), 2)  # needs n + depth - 1 symbols


def test_orbit_average():
    f = LocallyConstantFunction(GOLDEN, 1, {(0,): 1.0, (1,): 0.0})
    p = GOLDEN.periodic_points(3)
    averages = sorted(round(orbit_average(f, q), 12) for q in p)
    # cycles of length 3: 000 and the three rotations of 001
    assert averages == [round(2.0 / 3.0, 12)] * 3 + [1.0]


def test_additive_family_is_exact():
    f = LocallyConstantFunction(GOLDEN, 2, {(0, 0): 0.3, (0, 1): 1.1, (1, 0): -0.4})
    fam = AdditiveFamily(f)
    assert fam.kind == "additive"
    word = GOLDEN.extend_word((0, 1), 9)
    for n in range(1, 8):
        assert fam.value(word, n) == pytest.approx(manual_birkhoff(f, word, n), abs=1e-12)
    assert equivalence_defect(fam, f, 6) == 0.0


def test_block_average_table():
    f = LocallyConstantFunction(FULL, 1, {(0,): 0.0, (1,): 1.0})
    fam = AdditiveFamily(f)
    g = block_average(fam, 4)
    assert g.depth == 4
    for w in FULL.words(4):
        assert g(w) == pytest.approx(sum(w) / 4.0)


def cocycle_oracle(matrices, word):
    prod = np.eye(matrices[0].shape[0])
    for s in word:
        prod = matrices[s] @ prod
    return math.log(np.linalg.norm(prod, 2))


def test_cocycle_values_match_numpy_products():
    fam = MatrixCocycle(FULL, MILD_PAIR)
    assert fam.kind == "almost"
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(1, 12))
        word = tuple(int(v) for v in rng.integers(0, 2, size=n))
        assert fam.value(word, n) == pytest.approx(
            cocycle_oracle(MILD_PAIR, word), abs=1e-10
        )


def test_cocycle_rescaling_survives_long_words():
    fam = MatrixCocycle(FULL, MILD_PAIR)
    word = (0, 1) * 200
    value = fam.value(word, 400)
    assert math.isfinite(value)
    # log norm grows linearly with a rate below log of the largest row sum
    assert 0.0 < value / 400 < math.log(19.0)


def test_values_along_matches_value():
    fam = MatrixCocycle(FULL, MILD_PAIR)
    word = (0, 1, 1, 0, 1, 0, 0, 1)
    from suspflow import WordStream

    vals = fam.values_along(WordStream(word), 8)
    for n in range(1, 9):
        assert vals[n - 1] == pytest.approx(fam.value(word, n), abs=1e-12)


def test_one_dim_cocycle_is_additive_in_value():
    # 1x1 matrices make log norms literal Birkhoff sums
    fam = MatrixCocycle(FULL, [np.array([[2.0]]), np.array([[0.5]])])
    f = LocallyConstantFunction(FULL, 1, {(0,): math.log(2.0), (1,): math.log(0.5)})
    word = (0, 1, 1, 0, 0, 1)
    for n in range(1, 7):
        assert fam.value(word, n) == pytest.approx(birkhoff_sum(f, word, n), abs=1e-12)


def test_nonpositive_matrices_are_only_asymptotic():
    fam = MatrixCocycle(FULL, [np.array([[1.0, 1.0], [0.0, 1.0]]),
                               np.array([[1.0, 0.0], [1.0, 1.0]])])
    assert fam.kind == "asymptotic"


def test_almost_additivity_constant_stabilizes_for_mild_pair():
    fam = MatrixCocycle(FULL, MILD_PAIR)
    c10 = almost_additivity_constant(fam, 10)
    c12 = almost_additivity_constant(fam, 12)
    assert abs(c12 - c10) < 1e-12


def test_almost_additivity_constant_bounds_concatenation():
    fam = MatrixCocycle(FULL, MILD_PAIR)
    c = almost_additivity_constant(fam, 8)
    rng = np.random.default_rng(3)
    for _ in range(50):
        m = int(rng.integers(1, 5))
        n = int(rng.integers(1, 5))
        word = tuple(int(v) for v in rng.integers(0, 2, size=m + n))
        gap = abs(fam.value(word, m + n) - fam.value(word, m)
                  - fam.value(word[m:], n))
        assert gap <= c + 1e-12


def test_equivalence_defect_additive_block():
    fam = MatrixCocycle(FULL, MILD_PAIR)
    g = block_average(fam, 6)
    exact = equivalence_defect(fam, g, 6)
    sampled = sampled_equivalence_defect(fam, g, 6, FULL.periodic_points_up_to(4))
    assert sampled <= exact + 1e-12


@given(st.integers(min_value=1, max_value=6))
@settings(max_examples=20, deadline=None)
def test_block_average_of_additive_family_recovers_average(n):
    f = LocallyConstantFunction(GOLDEN, 1, {(0,): 0.25, (1,): -1.5})
    g = block_average(AdditiveFamily(f), n)
    for w in GOLDEN.words(max(n, 2)):
        assert g(w) == pytest.approx(manual_birkhoff(f, w, n) / n, abs=1e-12)
