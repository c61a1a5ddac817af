"""SEARCH(p): the measurement-free existence decider.

M amplification blocks, each a counter register prepared uniformly over its
iteration range plus a counter-controlled Grover power over a private target
register; one oracle write per block into a sigma qubit; an OR of the sigmas
into gamma; then the exact inverse of everything before the OR. The output
contract is |0...0> -> approximately |0...0, gamma> with
P(gamma=1) = 1 - prod(1 - q_i) over the per-block success probabilities.

Levels nest: a whole search program can serve as the bit oracle of an
enclosing search. A nested invocation is forward-pass, gamma copy, inverse
forward-pass; the inner program's own trailing inverse cancels against the
re-run and is never emitted. All invocation sites of one level share a single
set of internal registers and rewire only the searched variable's qubits, so
width grows additively per level while gate count multiplies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .classical import iterations_for_width
from .errors import WidthExceeded
from .gadgets import (
    BitOracle,
    COPY_TABLE,
    ErrorBudget,
    NEGATED_COPY_TABLE,
    _cube_for_threshold,
    _interval_prep_gates,
    controlled_grover_power,
    exists_gadget,
)
from .sim import (
    BitFunctionGate,
    DEFAULT_MAX_QUBITS,
    Engine,
    Gate,
    Register,
    Unitary1Q,
    UnitaryProgram,
    X_MATRIX,
)


def compact_counter_width(m: int) -> int:
    """Qubits for the internal counter encoding chi - 1 in 0..m-1."""
    return max(1, (m - 1).bit_length())


def comparator_needed(m: int) -> bool:
    """Whether any threshold over the compact range 0..m-1 is not a cube."""
    width = compact_counter_width(m)
    qubits = tuple(range(width - 1, -1, -1))
    return any(
        _cube_for_threshold(qubits, 0, m - 1, thr) is None
        for thr in range(1, m)
    )


class QubitLayout:
    """Sequential index assignment for programs built before any engine.

    Mirrors Engine.alloc_register: registers read big-endian with the first
    listed qubit most significant.
    """

    def __init__(self, start: int = 0):
        self.next_index = start

    def register(self, name: str, width: int) -> Register:
        first = self.next_index
        self.next_index += width
        return Register(name, tuple(range(first + width - 1, first - 1, -1)))

    def qubit(self) -> int:
        q = self.next_index
        self.next_index += 1
        return q


@dataclass
class SearchProgram(UnitaryProgram):
    """UnitaryProgram plus the readout plumbing of a built search."""

    gamma: Register | None = None
    free_registers: tuple[Register, ...] = ()
    scratch_qubits: tuple[int, ...] = ()
    input_width: int = 0
    M: int = 0
    m_per_level: tuple[int, ...] = ()


class _Slot:
    """Emitter for one inner-decision write at an invocation site.

    emit() produces gates for |a, b> -> |a, b xor inner(a)> given `env`, the
    wiring of enclosing bound variables (name -> qubit tuple), and `inputs`,
    the qubits of the variable searched at the calling level. `cost` is base
    queries per emitted invocation, `depth` the layer tags one iterate slot
    of the caller consumes.
    """

    input_width: int
    cost: int
    depth: int

    def emit(self, env, inputs, output, layer_base, controls) -> list[Gate]:
        raise NotImplementedError


class _TableSlot(_Slot):
    """Innermost slot: the base predicate as a single lookup gate."""

    def __init__(self, table, fixed_qubits, outer_names, input_width):
        self.table = table
        self.fixed_qubits = tuple(fixed_qubits)
        self.outer_names = tuple(outer_names)
        self.input_width = input_width
        self.cost = 1
        self.depth = 1

    def emit(self, env, inputs, output, layer_base, controls):
        wired = []
        for name in self.outer_names:
            wired.extend(env[name])
        return [
            BitFunctionGate(
                inputs=(*self.fixed_qubits, *wired, *inputs),
                output=output,
                table=self.table,
                controls=tuple(controls),
                is_query=True,
                layer=layer_base,
            )
        ]


class _LevelSlot(_Slot):
    """Nested slot: an inner search level invoked as a bit oracle.

    Emits B, controlled gamma copy, B inverse, where B is the inner level's
    forward pass through its gamma write. Only the copy carries the
    invocation controls: when they fail, B and its inverse cancel exactly.

    `param` names the caller's searched variable: the invocation inputs are
    candidates for it, and the inner pass reads them through the env.
    """

    def __init__(
        self, level: "_SearchLevel", negate: bool, param: str, param_width: int
    ):
        self.level = level
        self.negate = negate
        self.param = param
        self.input_width = param_width
        self.cost = 2 * level.fwd_cost
        self.depth = level.depth

    def emit(self, env, inputs, output, layer_base, controls):
        env2 = dict(env)
        env2[self.param] = tuple(inputs)
        body = self.level.emit_decision(env2, layer_base)
        copy = BitFunctionGate(
            (self.level.gamma.qubits[0],),
            output,
            NEGATED_COPY_TABLE if self.negate else COPY_TABLE,
            tuple(controls),
        )
        return body + [copy] + [g.inverse() for g in reversed(body)]


class _SlotOracle(BitOracle):
    """Adapter presenting a slot (with fixed env) as a plain BitOracle.

    Translates the gadget-level per-iterate layer index into absolute tags:
    iterate slot s at a level whose tags start at `base` owns the tag range
    [base + s*stride, base + (s+1)*stride).
    """

    def __init__(self, slot: _Slot, env, base: int | None, stride: int):
        self.slot = slot
        self.env = env
        self.base = base
        self.stride = stride
        self.input_width = slot.input_width
        self.cost = slot.cost

    def write_gates(self, inputs, output, layer=None, controls=()):
        if layer is None or self.base is None:
            lb = None
        else:
            lb = self.base + layer * self.stride
        return self.slot.emit(self.env, tuple(inputs), output, lb, controls)


class _SearchLevel:
    """Registers and emitters for one search level (M blocks, one variable)."""

    def __init__(
        self,
        var: str,
        width: int,
        slot: _Slot,
        M: int,
        layout: QubitLayout,
        pool: tuple[int, ...],
        negate_gamma: bool,
    ):
        self.var = var
        self.width = width
        self.slot = slot
        self.M = M
        self.m = iterations_for_width(width)
        self.pool = pool
        self.negate_gamma = negate_gamma
        cw = compact_counter_width(self.m)
        self.counters = []
        self.targets = []
        for i in range(M):
            self.counters.append(layout.register(f"{var}.counter{i}", cw))
            self.targets.append(layout.register(f"{var}.target{i}", width))
        self.sigmas = layout.register(f"{var}.sigma", M)
        self.work = layout.qubit()
        self.cmp = layout.qubit() if comparator_needed(self.m) else None
        self.gamma = layout.register(f"{var}.gamma", 1)
        self.depth = self.m * slot.depth
        self.fwd_cost = M * (self.m + 1) * slot.cost
        self.registers = {
            r.name: r
            for r in (*self.counters, *self.targets, self.sigmas, self.gamma)
        }

    def emit_fwd(self, env, layer_base) -> list[Gate]:
        """Preps, controlled powers, and sigma writes for all M blocks."""
        gates: list[Gate] = []
        oracle = _SlotOracle(self.slot, env, layer_base, self.slot.depth)
        for i in range(self.M):
            gates += _interval_prep_gates(
                self.counters[i].qubits, 0, self.m - 1
            )
            gates += controlled_grover_power(
                self.counters[i],
                self.m,
                oracle,
                self.targets[i],
                work=self.work,
                scratch=self.cmp,
                value_offset=0,
            ).gates
        for i in range(self.M):
            gates += self.slot.emit(
                env, self.targets[i].qubits, self.sigmas.qubits[i], None, ()
            )
        return gates

    def emit_decision(self, env, layer_base) -> list[Gate]:
        """B: forward pass through the (possibly negated) gamma write."""
        gates = self.emit_fwd(env, layer_base)
        ex_anc = Register(f"{self.var}.exists", (*self.pool, self.gamma.qubits[0]))
        gates += exists_gadget(self.sigmas, ex_anc).gates
        if self.negate_gamma:
            gates.append(Unitary1Q(X_MATRIX, self.gamma.qubits[0]))
        return gates

    def emit_full(self, env, layer_base) -> list[Gate]:
        """Standalone program: B followed by the inverse of its forward pass."""
        fwd = self.emit_fwd(env, layer_base)
        gates = list(fwd)
        ex_anc = Register(f"{self.var}.exists", (*self.pool, self.gamma.qubits[0]))
        gates += exists_gadget(self.sigmas, ex_anc).gates
        if self.negate_gamma:
            gates.append(Unitary1Q(X_MATRIX, self.gamma.qubits[0]))
        gates += [g.inverse() for g in reversed(fwd)]
        return gates


def as_budget(budget) -> ErrorBudget:
    if isinstance(budget, ErrorBudget):
        return budget
    return ErrorBudget.from_blocks(int(budget))


def build_search(
    oracle: BitOracle,
    input_width: int,
    budget,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> SearchProgram:
    """Single-level SEARCH over `oracle` on a fresh layout.

    Internal registers start after any qubits the oracle closes over. The
    returned program's `gamma` register holds the existence verdict; its
    `scratch_qubits` are everything the inverse pass is supposed to clear.
    """
    budget = as_budget(budget)
    referenced = getattr(oracle, "fixed_inputs", ())
    layout = QubitLayout(max(referenced, default=-1) + 1)
    first = layout.next_index
    pool = tuple(layout.qubit() for _ in range(budget.M + 1))

    class _OracleSlot(_Slot):
        input_width = oracle.input_width
        cost = oracle.cost
        depth = 1

        def emit(self, env, inputs, output, layer_base, controls):
            return oracle.write_gates(
                inputs, output, layer=layer_base, controls=controls
            )

    level = _SearchLevel(
        "x", input_width, _OracleSlot(), budget.M, layout, pool,
        negate_gamma=False,
    )
    if layout.next_index > max_qubits:
        raise WidthExceeded(
            f"search needs {layout.next_index} qubit(s), cap is {max_qubits}"
        )
    gamma_q = level.gamma.qubits[0]
    scratch = tuple(
        q for q in range(first, layout.next_index) if q != gamma_q
    )
    prog = SearchProgram(
        gates=level.emit_full({}, 0),
        registers={**level.registers, "gamma": Register("gamma", (gamma_q,))},
        gamma=Register("gamma", (gamma_q,)),
        scratch_qubits=scratch,
        input_width=input_width,
        M=budget.M,
        m_per_level=(level.m,),
    )
    return prog


@dataclass(frozen=True)
class SearchReport:
    gamma_prob: float
    zero_fidelity: float
    steps: int
    oracle_layers: int
    max_parallel_queries: int
    total_queries: int
    qubits_used: int
    paper_qubit_formula: int

    def as_dict(self) -> dict:
        return {
            "gamma_prob": float(self.gamma_prob),
            "zero_fidelity": float(self.zero_fidelity),
            "steps": int(self.steps),
            "oracle_layers": int(self.oracle_layers),
            "max_parallel_queries": int(self.max_parallel_queries),
            "total_queries": int(self.total_queries),
            "qubits_used": int(self.qubits_used),
            "paper_qubit_formula": int(self.paper_qubit_formula),
        }


def search_report(program: SearchProgram, state: Engine) -> SearchReport:
    """Measured quantities next to the stated qubit cost M(n+2)+2."""
    return SearchReport(
        gamma_prob=state.probability_of(program.gamma, 1),
        zero_fidelity=state.zero_fidelity(program.scratch_qubits),
        steps=program.steps,
        oracle_layers=program.depth_in_oracle_layers(),
        max_parallel_queries=program.max_parallel_queries(),
        total_queries=program.total_queries(),
        qubits_used=program.qubit_count(),
        paper_qubit_formula=program.M * (program.input_width + 2) + 2,
    )
