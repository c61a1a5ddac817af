"""Ground truth, instance generation, and the closed-form predictor."""

import itertools
import math

import numpy as np
import pytest

from prenexq import (
    Formula,
    InstanceSpec,
    TruthTableOracle,
    classical_eval,
    closed_form_success,
    count_solutions,
    predict_gamma_prob,
    random_instance,
)
from prenexq.classical import (
    averaged_success,
    iterations_for_width,
    shared_draw_or_prob,
)
from prenexq.errors import (
    ArityMismatch,
    ValueOutOfRange,
    WidthMismatch,
)


def _table(widths, bits):
    return TruthTableOracle(widths, np.array(bits, dtype=np.uint8))


def test_truth_table_indexing_is_big_endian():
    tab = TruthTableOracle((1, 2), np.arange(8) % 2)
    assert tab.index_of((1, 2)) == 0b110
    assert tab.value(1, 2) == 0
    assert tab.value(0, 3) == 1
    assert tab.num_bits == 3 and tab.num_vars == 2


def test_truth_table_from_function():
    tab = TruthTableOracle.from_function((1, 2), lambda a, b: a == 1 and b == 2)
    want = np.zeros(8, dtype=np.uint8)
    want[0b110] = 1
    np.testing.assert_array_equal(tab.table, want)


def test_truth_table_negated_and_frozen():
    tab = _table((2,), [0, 1, 1, 0])
    np.testing.assert_array_equal(tab.negated().table, [1, 0, 0, 1])
    with pytest.raises(ValueError):
        tab.table[0] = 1


def test_truth_table_validation():
    with pytest.raises(WidthMismatch):
        _table((2,), [0, 1])
    with pytest.raises(ValueOutOfRange):
        _table((1,), [0, 2])
    with pytest.raises(WidthMismatch):
        _table((0,), [])
    tab = _table((1, 1), [0, 1, 1, 0])
    with pytest.raises(ArityMismatch):
        tab.index_of((1,))
    with pytest.raises(ValueOutOfRange):
        tab.index_of((2, 0))


def test_formula_validation():
    with pytest.raises(ArityMismatch):
        Formula((("exists", "x", 1), ("forall", "x", 1)))
    with pytest.raises(ArityMismatch):
        Formula((("some", "x", 1),))
    with pytest.raises(WidthMismatch):
        Formula((("exists", "x", 0),))
    with pytest.raises(ArityMismatch):
        Formula((("exists", "x", 1),), predicate=_table((2,), [0, 0, 0, 1]))
    f = Formula(
        (("forall", "x1", 1), ("exists", "x2", 2)),
        free_vars=(("z", 2),),
    )
    assert f.k == 2 and f.n == 3 and f.free_width == 2
    assert f.var_widths == (2, 1, 2)


def test_classical_eval_quantifier_semantics():
    exists2 = Formula((("exists", "x", 2),), predicate=_table((2,), [0, 0, 1, 0]))
    assert classical_eval(exists2) is True

    fe = Formula(
        (("forall", "x1", 1), ("exists", "x2", 1)),
        predicate=_table((1, 1), [0, 1, 1, 0]),
    )
    assert classical_eval(fe) is True

    forall2 = Formula((("forall", "x", 2),), predicate=_table((2,), [1, 1, 1, 0]))
    assert classical_eval(forall2) is False


def test_classical_eval_with_free_variables():
    # p(z, x) = z and x
    f = Formula(
        (("exists", "x", 1),),
        free_vars=(("z", 1),),
        predicate=_table((1, 1), [0, 0, 0, 1]),
    )
    assert classical_eval(f, assignment={"z": 0}) is False
    assert classical_eval(f, assignment={"z": 1}) is True
    assert classical_eval(f, assignment=(1,)) is True
    with pytest.raises(ArityMismatch):
        classical_eval(f, assignment={"w": 1})
    with pytest.raises(ArityMismatch):
        classical_eval(f, assignment=())
    with pytest.raises(ValueOutOfRange):
        classical_eval(f, assignment=(2,))
    with pytest.raises(ArityMismatch):
        classical_eval(Formula((("exists", "x", 1),)))


def test_classical_eval_exhaustive_against_python_quantifiers():
    for bits in range(256):
        tab = _table((1, 2), [(bits >> (7 - i)) & 1 for i in range(8)])
        f = Formula(
            (("forall", "a", 1), ("exists", "b", 2)), predicate=tab
        )
        want = all(
            any(tab.value(a, b) for b in range(4)) for a in range(2)
        )
        assert classical_eval(f) == want


def test_count_solutions():
    tab = _table((1, 2), [0, 1, 1, 0, 1, 1, 1, 1])
    assert count_solutions(tab) == 6
    assert count_solutions(tab, (0,)) == 2
    assert count_solutions(tab, (1,)) == 4
    assert count_solutions(tab, (1, 2)) == 1
    with pytest.raises(ArityMismatch):
        count_solutions(tab, (0, 0, 0))
    with pytest.raises(ValueOutOfRange):
        count_solutions(tab, (2,))


def test_instance_spec_validation():
    with pytest.raises(ValueOutOfRange):
        InstanceSpec((("exists", 1),), density=1.5)
    with pytest.raises(ArityMismatch):
        InstanceSpec((("both", 1),))
    with pytest.raises(WidthMismatch):
        InstanceSpec((("exists", 0),))


def test_random_instance_seeding_and_density():
    spec = InstanceSpec((("forall", 2), ("exists", 2)), seed=11)
    f1, t1 = random_instance(spec)
    f2, t2 = random_instance(spec)
    np.testing.assert_array_equal(t1.table, t2.table)
    assert f1.prefix == (("forall", "x1", 2), ("exists", "x2", 2))
    assert f1.predicate is t1

    _, zeros = random_instance(
        InstanceSpec((("exists", 3),), density=0.0, seed=5)
    )
    assert zeros.table.sum() == 0
    _, ones = random_instance(
        InstanceSpec((("exists", 3),), density=1.0, seed=5)
    )
    assert ones.table.sum() == ones.table.size

    withfree = InstanceSpec((("exists", 1),), free_widths=(2,), seed=3)
    f3, t3 = random_instance(withfree)
    assert f3.free_vars == (("z1", 2),)
    assert t3.num_bits == 3


def test_closed_form_success():
    assert closed_form_success(4, 0, 7) == 0.0
    assert closed_form_success(4, 4, 3) == pytest.approx(1.0)
    # t = 1, N = 4: theta = pi/6, one iterate is certain
    assert closed_form_success(4, 1, 1) == pytest.approx(1.0)
    assert closed_form_success(4, 1, 2) == pytest.approx(0.25)
    with pytest.raises(ValueOutOfRange):
        closed_form_success(4, 5, 1)
    with pytest.raises(ValueOutOfRange):
        closed_form_success(0, 0, 1)


def test_iterations_for_width():
    assert [iterations_for_width(w) for w in (1, 2, 3, 4)] == [2, 2, 3, 4]


@pytest.mark.parametrize("width", [1, 2, 3])
def test_averaged_success_matches_closed_form_on_crisp_tables(width):
    size = 1 << width
    for t in range(size + 1):
        p = np.zeros(size)
        p[:t] = 1.0
        for m in range(1, 5):
            want = sum(
                closed_form_success(size, t, j) for j in range(1, m + 1)
            ) / m
            assert averaged_success(p, m) == pytest.approx(want, abs=1e-12)


def test_shared_draw_single_class_collapses_to_one_coin():
    p = np.array([0.2, 0.8, 0.4, 0.6])
    for M in (1, 2, 5):
        assert shared_draw_or_prob(p, [0, 0, 0, 0], M) == pytest.approx(
            float(p.mean())
        )


def test_shared_draw_one_block_is_the_mean():
    p = np.array([0.1, 0.9, 0.3, 0.5])
    assert shared_draw_or_prob(p, [0, 1, 2, 3], 1) == pytest.approx(
        float(p.mean())
    )


def test_shared_draw_crisp_distinct_classes():
    # deterministic coins: miss iff every block picks an unmarked value
    p = np.array([1.0, 0.0, 0.0, 0.0])
    for M in (1, 2, 3):
        assert shared_draw_or_prob(p, [0, 1, 2, 3], M) == pytest.approx(
            1.0 - 0.75**M
        )


def test_shared_draw_against_direct_enumeration():
    rng = np.random.default_rng(42)
    p = rng.random(4)
    classes = [0, 1, 0, 2]
    M = 3
    lam = {
        c: float(p[[x for x in range(4) if classes[x] == c]].mean())
        for c in set(classes)
    }
    miss = 0.0
    for picks in itertools.product(range(4), repeat=M):
        hit = {classes[x] for x in picks}
        miss += math.prod(1.0 - lam[c] for c in hit) / 4**M
    assert shared_draw_or_prob(p, classes, M) == pytest.approx(1.0 - miss)


def test_shared_draw_checks_label_count():
    with pytest.raises(ArityMismatch):
        shared_draw_or_prob(np.array([0.5, 0.5]), [0], 2)


def test_predictor_is_exact_on_crisp_instances():
    one = Formula((("exists", "x", 2),), predicate=_table((2,), [0, 1, 0, 0]))
    assert predict_gamma_prob(one, M=3) == pytest.approx(
        1.0 - 0.375**3, abs=1e-12
    )
    empty = Formula((("exists", "x", 2),), predicate=_table((2,), [0, 0, 0, 0]))
    assert predict_gamma_prob(empty, M=4) == 0.0
    full = Formula((("forall", "x", 2),), predicate=_table((2,), [1, 1, 1, 1]))
    assert predict_gamma_prob(full, M=2) == pytest.approx(1.0, abs=1e-12)


# measured P(gamma=1) from exact simulation of the full two-level pipeline
# at M = 2, one bit per level; the collision model stays within 0.032
MEASURED_M2 = [
    (("forall", "exists"), [0, 1, 1, 0], 0.625),
    (("forall", "forall"), [0, 1, 0, 1], 0.25),
    (("exists", "exists"), [0, 0, 0, 1], 0.5625),
    (("exists", "forall"), [0, 1, 1, 1], 0.8125),
]


@pytest.mark.parametrize("quants,bits,measured", MEASURED_M2)
def test_predictor_tracks_measured_two_level_values(quants, bits, measured):
    f = Formula(
        ((quants[0], "x1", 1), (quants[1], "x2", 1)),
        predicate=_table((1, 1), bits),
    )
    pred = predict_gamma_prob(f, M=2)
    assert abs(pred - measured) <= 0.032
    truth = classical_eval(f)
    assert (pred > 0.5) == truth


def test_predictor_m3_frozen_spot():
    # exact simulation of forall exists over XOR at M = 3 gives 0.78125
    f = Formula(
        (("forall", "x1", 1), ("exists", "x2", 1)),
        predicate=_table((1, 1), [0, 1, 1, 0]),
    )
    assert abs(predict_gamma_prob(f, M=3) - 0.78125) <= 0.02


def test_predictor_handles_free_variables():
    # p(z, x) = (x == z): exists x is always true, with one witness
    tab = TruthTableOracle.from_function((2, 2), lambda z, x: x == z)
    f = Formula(
        (("exists", "x", 2),), free_vars=(("z", 2),), predicate=tab
    )
    for z in range(4):
        assert predict_gamma_prob(f, assignment=(z,), M=2) == pytest.approx(
            1.0 - 0.375**2, abs=1e-12
        )
    with pytest.raises(ArityMismatch):
        predict_gamma_prob(Formula((("exists", "x", 1),)))
