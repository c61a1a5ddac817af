"""Nested compilation: estimates, built programs, end-to-end verdicts."""

import importlib.resources
import json

import jsonschema
import numpy as np
import pytest

from prenexq import (
    Engine,
    Formula,
    TruthTableOracle,
    compile_formula,
    evaluate,
    parse_formula,
)
from prenexq.compiler import ResourceEstimate, estimate_resources
from prenexq import compiler as compiler_module
from prenexq.errors import UnboundVariable, WidthExceeded


def _table(widths, bits):
    return TruthTableOracle(widths, np.array(bits, dtype=np.uint8))


def _formula(text, widths, bits):
    return parse_formula(text).with_predicate(_table(widths, bits))


def test_estimate_two_level_one_bit():
    f = parse_formula("forall x1[1] exists x2[1] : p")
    est = estimate_resources(f, 2)
    assert est == ResourceEstimate(
        qubits_needed=19,
        oracle_layer_depth=4,
        max_parallel_queries=4,
        total_base_queries=144,
        paper_depth_bound=2.0,
        paper_parallel_bound=16,
    )


def test_estimate_matches_built_program():
    f = _formula("forall x1[1] exists x2[1] : p", (1, 1), [0, 1, 1, 0])
    est = estimate_resources(f, 2)
    prog = compile_formula(f, 2)
    assert prog.qubit_count() == est.qubits_needed
    assert prog.depth_in_oracle_layers() == est.oracle_layer_depth
    assert prog.max_parallel_queries() == est.max_parallel_queries
    assert prog.total_queries() == est.total_base_queries
    assert prog.m_per_level == (2, 2)


def test_estimate_m_growth_and_comparator():
    f = parse_formula("forall x1[1] exists x2[1] : p")
    # per level: M blocks of (counter + variable + sigma) plus work and gamma
    assert estimate_resources(f, 3).qubits_needed == 26
    g = parse_formula("forall x1[2] exists x2[2] : p")
    assert estimate_resources(g, 3).qubits_needed == 32
    # width 3 forces m = 3, whose compact thresholds need a comparator bit
    h = parse_formula("exists x[3] : p")
    est = estimate_resources(h, 3)
    assert est.oracle_layer_depth == 3
    assert est.qubits_needed == 4 + 3 * (2 + 3 + 1) + 2 + 1


def test_compile_single_exists_matches_search_law():
    f = _formula("exists x[2] : p", (2,), [0, 1, 0, 0])
    report = evaluate(f, budget=2)
    assert report.gamma_prob == pytest.approx(0.859375, abs=1e-9)
    assert report.decided and report.classical_truth and report.agree


def test_compile_forall_tautology_is_exact():
    f = _formula("forall x[2] : p", (2,), [1, 1, 1, 1])
    report = evaluate(f, budget=2)
    assert abs(report.gamma_prob - 1.0) < 1e-12
    assert abs(report.zero_fidelity - 1.0) < 1e-12


def test_compile_nested_empty_table_is_exact():
    f = _formula("exists x1[1] exists x2[1] : p", (1, 1), [0, 0, 0, 0])
    report = evaluate(f, budget=2)
    assert report.gamma_prob < 1e-12
    assert not report.decided and not report.classical_truth
    assert report.agree


def test_quantifier_free_passthrough():
    f = Formula((), (("z", 2),), _table((2,), [0, 1, 1, 0]))
    est = estimate_resources(f, 3)
    assert est.qubits_needed == 3 and est.oracle_layer_depth == 1
    for z in range(4):
        report = evaluate(f, assignment=(z,), budget=3)
        assert report.gamma_prob == pytest.approx(float(z in (1, 2)))
        assert report.agree
        assert report.qubits_used == 3
        assert report.total_base_queries == 1


# exact simulation references at M = 2, one bound bit per level
MEASURED_M2 = [
    ("forall x1[1] exists x2[1] : p", [0, 1, 1, 0], 0.625),
    ("forall x1[1] forall x2[1] : p", [0, 1, 0, 1], 0.25),
    ("exists x1[1] exists x2[1] : p", [0, 0, 0, 1], 0.5625),
    ("exists x1[1] forall x2[1] : p", [0, 1, 1, 1], 0.8125),
]


@pytest.mark.parametrize("text,bits,want", MEASURED_M2)
def test_two_level_frozen_gamma_probabilities(text, bits, want):
    f = _formula(text, (1, 1), bits)
    report = evaluate(f, budget=2)
    assert report.gamma_prob == pytest.approx(want, abs=1e-9)
    assert report.agree


def test_free_variables_rewire_not_rebuild():
    # p(z, x) = z and x: truth flips with the free bit
    f = _formula("free z[1] exists x[1] : p", (1, 1), [0, 0, 0, 1])
    low = evaluate(f, assignment={"z": 0}, budget=2)
    high = evaluate(f, assignment={"z": 1}, budget=2)
    assert low.gamma_prob < 1e-12 and not low.decided
    # t = 1 of N = 2: q = 1/2 per block
    assert high.gamma_prob == pytest.approx(0.75, abs=1e-9)
    assert high.decided and low.agree and high.agree
    assert low.assignment == {"z": 0} and high.assignment == {"z": 1}


def test_run_report_dict_matches_schema():
    f = _formula("exists x[2] : p", (2,), [0, 1, 0, 0])
    payload = evaluate(f, budget=2).as_dict()
    schema = json.loads(
        importlib.resources.files("prenexq.schemas")
        .joinpath("run_report.schema.json")
        .read_text()
    )
    jsonschema.validate(payload, schema)
    assert len(payload) == 16
    assert json.loads(json.dumps(payload)) == payload


def test_budget_one_is_allowed():
    f = _formula("exists x[2] : p", (2,), [0, 1, 0, 0])
    report = evaluate(f, budget=1)
    assert report.M == 1
    assert report.gamma_prob == pytest.approx(0.625, abs=1e-9)


def test_width_cap_two_levels_two_bits():
    f = _formula(
        "forall x1[2] exists x2[2] : p", (2, 2), [0] * 16
    )
    with pytest.raises(WidthExceeded):
        compile_formula(f, 3)
    # the same instance fits at M = 2
    est = estimate_resources(f, 2)
    assert est.qubits_needed == 23


def test_compile_requires_predicate():
    f = parse_formula("exists x[2] : p")
    with pytest.raises(UnboundVariable):
        compile_formula(f, 2)


def test_compile_alias():
    assert compiler_module.compile is compile_formula


def test_program_runs_standalone_on_engine():
    f = _formula("exists x[2] : p", (2,), [0, 1, 0, 0])
    prog = compile_formula(f, 2)
    eng = Engine()
    eng.ensure_qubits(prog.qubit_count())
    eng.run(prog)
    assert eng.probability_of(prog.gamma, 1) == pytest.approx(
        0.859375, abs=1e-9
    )
    eng.run_inverse(prog)
    assert eng.zero_fidelity(range(prog.qubit_count())) == pytest.approx(
        1.0, abs=1e-9
    )
