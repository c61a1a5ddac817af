"""Compiles prenex formulas into nested search programs and runs them.

The recursion peels the outermost remaining quantifier: exists builds a
search over that variable with the compiled remainder as its bit oracle;
forall negates the oracle, searches, and negates the verdict. The base case
is the predicate's lookup gate itself. The resource estimate is closed-form
and must agree exactly with the built program's measured counts; the paper's
stated bounds are carried alongside for comparison, never asserted.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from .classical import (
    EXISTS,
    FORALL,
    Formula,
    _resolve_assignment,
    classical_eval,
    iterations_for_width,
)
from .errors import UnboundVariable, WidthExceeded
from .search import (
    QubitLayout,
    SearchProgram,
    _LevelSlot,
    _SearchLevel,
    _TableSlot,
    as_budget,
    compact_counter_width,
    comparator_needed,
)
from .sim import BitFunctionGate, DEFAULT_MAX_QUBITS, Engine, Register


@dataclass(frozen=True)
class ResourceEstimate:
    """Predicted program shape, computed without building anything."""

    qubits_needed: int
    oracle_layer_depth: int
    max_parallel_queries: int
    total_base_queries: int
    paper_depth_bound: float
    paper_parallel_bound: int


def estimate_resources(formula: Formula, budget) -> ResourceEstimate:
    """Closed-form recursion over the prefix.

    Depth multiplies by ceil(2^(w/2)) per level, simultaneous queries by M,
    and total queries by 2M(m+1): each level makes M(m+1) invocations of its
    inner oracle on the forward pass (m iterate slots plus the sigma write
    per block) and as many again in inverses.
    """
    budget = as_budget(budget)
    M = budget.M
    n = formula.n
    paper_depth = 2.0 ** (n / 2)
    paper_parallel = (M * n) ** formula.k
    if formula.k == 0:
        return ResourceEstimate(formula.free_width + 1, 1, 1, 1, 1.0, 1)
    ms = [iterations_for_width(w) for _, _, w in formula.prefix]
    qubits = formula.free_width + (M + 1)
    for (_, _, w), m in zip(formula.prefix, ms):
        qubits += M * (compact_counter_width(m) + w + 1) + 2
        if comparator_needed(m):
            qubits += 1
    invocation = 1
    for m in reversed(ms):
        invocation = 2 * M * (m + 1) * invocation
    return ResourceEstimate(
        qubits_needed=qubits,
        oracle_layer_depth=math.prod(ms),
        max_parallel_queries=M**formula.k,
        total_base_queries=invocation,
        paper_depth_bound=paper_depth,
        paper_parallel_bound=paper_parallel,
    )


def compile_formula(
    formula: Formula, budget, max_qubits: int = DEFAULT_MAX_QUBITS
) -> SearchProgram:
    """Nested program mapping |z, 0...0> to approximately |z, 0...0, gamma>.

    gamma = 1 iff the formula holds under the free assignment z, at every
    level (a forall level applies NOT to its verdict qubit in place).
    """
    budget = as_budget(budget)
    if formula.predicate is None:
        raise UnboundVariable("formula has no predicate table attached")
    est = estimate_resources(formula, budget)
    if est.qubits_needed > max_qubits:
        raise WidthExceeded(
            f"instance needs {est.qubits_needed} qubit(s) at M={budget.M}, "
            f"cap is {max_qubits}"
        )
    layout = QubitLayout()
    free_regs = tuple(
        layout.register(name, w) for name, w in formula.free_vars
    )
    registers = {r.name: r for r in free_regs}
    free_qubits = tuple(q for r in free_regs for q in r.qubits)

    if formula.k == 0:
        gamma = layout.register("gamma", 1)
        gate = BitFunctionGate(
            free_qubits,
            gamma.qubits[0],
            formula.predicate.table,
            is_query=True,
            layer=0,
        )
        return SearchProgram(
            gates=[gate],
            registers={**registers, "gamma": gamma},
            gamma=gamma,
            free_registers=free_regs,
            m_per_level=(),
            M=budget.M,
        )

    pool = tuple(layout.qubit() for _ in range(budget.M + 1))
    quants = [q for q, _, _ in formula.prefix]
    names = [nm for _, nm, _ in formula.prefix]
    widths = [w for _, _, w in formula.prefix]
    k = formula.k
    table = formula.predicate
    if quants[k - 1] == FORALL:
        table = table.negated()
    slot = _TableSlot(table.table, free_qubits, names[: k - 1], widths[k - 1])
    level = None
    for j in range(k - 1, -1, -1):
        level = _SearchLevel(
            names[j],
            widths[j],
            slot,
            budget.M,
            layout,
            pool,
            negate_gamma=(quants[j] == FORALL),
        )
        registers.update(level.registers)
        if j > 0:
            slot = _LevelSlot(
                level,
                negate=(quants[j - 1] == FORALL),
                param=names[j - 1],
                param_width=widths[j - 1],
            )

    assert layout.next_index == est.qubits_needed
    gamma_q = level.gamma.qubits[0]
    gamma = Register("gamma", (gamma_q,))
    scratch = tuple(
        q
        for q in range(formula.free_width, layout.next_index)
        if q != gamma_q
    )
    return SearchProgram(
        gates=level.emit_full({}, 0),
        registers={**registers, "gamma": gamma},
        gamma=gamma,
        free_registers=free_regs,
        scratch_qubits=scratch,
        input_width=formula.n,
        M=budget.M,
        m_per_level=tuple(iterations_for_width(w) for w in widths),
    )


compile = compile_formula


@dataclass(frozen=True)
class RunReport:
    """One evaluation: verdict statistics next to resource accounting."""

    formula: str
    assignment: dict
    M: int
    m_per_level: tuple
    gamma_prob: float
    decided: bool
    classical_truth: bool
    agree: bool
    zero_fidelity: float
    qubits_used: int
    oracle_layer_depth: int
    max_parallel_queries: int
    total_base_queries: int
    paper_depth_bound: float
    paper_parallel_bound: int
    wall_time_ms: float

    def as_dict(self) -> dict:
        return {
            "formula": self.formula,
            "assignment": dict(self.assignment),
            "M": self.M,
            "m_per_level": list(self.m_per_level),
            "gamma_prob": self.gamma_prob,
            "decided": self.decided,
            "classical_truth": self.classical_truth,
            "agree": self.agree,
            "zero_fidelity": self.zero_fidelity,
            "qubits_used": self.qubits_used,
            "oracle_layer_depth": self.oracle_layer_depth,
            "max_parallel_queries": self.max_parallel_queries,
            "total_base_queries": self.total_base_queries,
            "paper_depth_bound": self.paper_depth_bound,
            "paper_parallel_bound": self.paper_parallel_bound,
            "wall_time_ms": self.wall_time_ms,
        }


def evaluate(
    formula: Formula,
    assignment=None,
    budget=3,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> RunReport:
    """Compiles, runs on |z, 0...0>, and reads out exact probabilities."""
    from .dsl import format_formula

    t0 = time.perf_counter()
    budget = as_budget(budget)
    free_vals = _resolve_assignment(formula, assignment)
    prog = compile_formula(formula, budget, max_qubits)
    eng = Engine(max_qubits)
    eng.ensure_qubits(prog.qubit_count())
    for reg, val in zip(prog.free_registers, free_vals):
        eng.write_value(reg, val)
    eng.run(prog)
    gamma_prob = eng.probability_of(prog.gamma, 1)
    zero_fid = eng.zero_fidelity(prog.scratch_qubits)
    decided = bool(gamma_prob > 0.5)
    truth = bool(classical_eval(formula, None, free_vals))
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return RunReport(
        formula=format_formula(formula),
        assignment={
            name: val
            for (name, _), val in zip(formula.free_vars, free_vals)
        },
        M=budget.M,
        m_per_level=prog.m_per_level,
        gamma_prob=gamma_prob,
        decided=decided,
        classical_truth=truth,
        agree=decided == truth,
        zero_fidelity=zero_fid,
        qubits_used=prog.qubit_count(),
        oracle_layer_depth=prog.depth_in_oracle_layers(),
        max_parallel_queries=prog.max_parallel_queries(),
        total_base_queries=prog.total_queries(),
        paper_depth_bound=2.0 ** (formula.n / 2),
        paper_parallel_bound=(budget.M * formula.n) ** formula.k,
        wall_time_ms=wall_ms,
    )
