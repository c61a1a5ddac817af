"""Reusable unitary building blocks for the search construction.

Range preparation (exact uniform superposition over 1..m), the Grover iterate
W F0 W Fp, counter-controlled iterate powers, the three-qubit f step and the
ancilla-clean EXISTS gadget built from it, bit-oracle wrappers, and NOT.

Builders are pure: they take registers and qubit indices and return an
immutable gate list; nothing here touches an engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import TruthTableOracle
from .errors import (
    ArityMismatch,
    BudgetInvalid,
    WidthMismatch,
    WidthTooSmall,
)
from .sim import (
    Controls,
    BitFunctionGate,
    Gate,
    H_MATRIX,
    FLIP_ZERO_MATRIX,
    Register,
    Unitary1Q,
    UnitaryProgram,
    X_MATRIX,
    rotation_matrix,
)

COPY_TABLE = np.array([0, 1], dtype=np.uint8)
NEGATED_COPY_TABLE = np.array([1, 0], dtype=np.uint8)


@dataclass(frozen=True)
class ErrorBudget:
    """Global amplification budget: M parallel blocks per search level.

    p_err is the target bound on total error probability and is allowed to be
    vacuous (> 1) at very small M; epsilon is the per-subroutine deviation the
    M blocks are sized against.
    """

    p_err: float
    epsilon: float
    M: int

    def __post_init__(self):
        if self.epsilon <= 0 or self.p_err <= 0:
            raise BudgetInvalid("epsilon and p_err must be positive")
        if not self.epsilon < self.p_err / 2:
            raise BudgetInvalid(
                f"need epsilon < p_err/2, got {self.epsilon} vs {self.p_err}"
            )
        if self.M < math.ceil(math.log2(1.0 / self.epsilon)):
            raise BudgetInvalid(
                f"M={self.M} below log2(1/epsilon)="
                f"{math.log2(1.0 / self.epsilon):.3f}"
            )

    @classmethod
    def from_blocks(cls, M: int) -> "ErrorBudget":
        """Budget with epsilon = 2^-M and the loosest admissible p_err."""
        if M < 1:
            raise BudgetInvalid(f"M must be >= 1, got {M}")
        eps = 2.0 ** (-M)
        return cls(p_err=4.0 * eps, epsilon=eps, M=M)


class BitOracle:
    """Black-box bit write |a,b> -> |a, b xor p(a)>.

    `input_width` is the width of the variable part a (any fixed registers a
    concrete oracle closes over do not count); `cost` is base-predicate
    queries per invocation.
    """

    input_width: int
    cost: int

    def write_gates(
        self,
        inputs: tuple[int, ...],
        output: int,
        layer: int | None = None,
        controls: Controls = (),
    ) -> list[Gate]:
        raise NotImplementedError


class TableOracle(BitOracle):
    """The base predicate p as one table-lookup gate.

    `fixed_inputs` are qubits for the leading declared variables (free and
    already-bound ones); the per-invocation inputs supply the trailing
    variable being searched.
    """

    def __init__(
        self, table: TruthTableOracle, fixed_inputs: tuple[int, ...] = ()
    ):
        if len(fixed_inputs) > table.num_bits:
            raise ArityMismatch("more fixed inputs than table bits")
        self.table = table
        self.fixed_inputs = tuple(fixed_inputs)
        self.input_width = table.num_bits - len(fixed_inputs)
        self.cost = 1

    def write_gates(self, inputs, output, layer=None, controls=()):
        if len(inputs) != self.input_width:
            raise WidthMismatch(
                f"oracle expects {self.input_width} input qubit(s), got "
                f"{len(inputs)}"
            )
        return [
            BitFunctionGate(
                inputs=(*self.fixed_inputs, *inputs),
                output=output,
                table=self.table.table,
                controls=tuple(controls),
                is_query=True,
                layer=layer,
            )
        ]

    def negated(self) -> "TableOracle":
        return TableOracle(self.table.negated(), self.fixed_inputs)


def not_gate(q: int) -> UnitaryProgram:
    """Bit flip; its own inverse."""
    return UnitaryProgram([Unitary1Q(X_MATRIX, q)])


def f_step(result: int, controller: int, subject: int) -> UnitaryProgram:
    """Three-qubit step of the OR sweep.

    Two XOR writes: controller ^= result & subject, then
    result ^= subject & ~controller. On |r c s> this realizes the permutation
    with the 3-cycle 001 -> 101 -> 111 -> 001 and all other states fixed;
    chaining it over blocks accumulates OR into `result` while parking the
    carry in `controller`.
    """
    and_table = np.array([0, 0, 0, 1], dtype=np.uint8)
    andnot_table = np.array([0, 1, 0, 0], dtype=np.uint8)
    return UnitaryProgram(
        [
            BitFunctionGate((result, subject), controller, and_table),
            BitFunctionGate((controller, subject), result, andnot_table),
        ]
    )


def exists_gadget(sigmas: Register, ancillas: Register) -> UnitaryProgram:
    """OR of the sigma qubits into the last ancilla, everything else restored.

    ancillas = M controller qubits, one sweep-result qubit, one output qubit,
    in that order, all required to be |0>. Forward sweep of f_step, copy of
    the sweep result into the output, reverse sweep. The map is a basis
    permutation, so restoration is exact on any superposition.
    """
    M = sigmas.width
    if ancillas.width != M + 2:
        raise WidthMismatch(
            f"need {M + 2} ancillas for {M} sigma qubit(s), got "
            f"{ancillas.width}"
        )
    result = ancillas.qubits[M]
    out = ancillas.qubits[M + 1]
    sweep = UnitaryProgram()
    for i in range(M):
        sweep.extend(f_step(result, ancillas.qubits[i], sigmas.qubits[i]))
    prog = UnitaryProgram(registers={sigmas.name: sigmas, ancillas.name: ancillas})
    prog.extend(sweep)
    prog.gates.append(BitFunctionGate((result,), out, COPY_TABLE))
    prog.extend(sweep.inverse())
    return prog


def _interval_prep_gates(
    qubits: tuple[int, ...], lo: int, hi: int
) -> list[Gate]:
    """Exact uniform amplitudes over basis values lo..hi (big-endian qubits).

    Binary-split method: walk bits most significant first; at each node split
    the surviving value range between the 0 and 1 subtrees and rotate by
    arccos(sqrt(left/total)), conditioned on the prefix path. Each leaf in
    range ends with amplitude exactly 1/sqrt(hi-lo+1).
    """
    gates: list[Gate] = []
    width = len(qubits)

    def count(a: int, b: int) -> int:
        a, b = max(a, lo), min(b, hi)
        return b - a + 1 if a <= b else 0

    def walk(pos: int, prefix: Controls, node_lo: int, node_hi: int) -> None:
        if pos == width:
            return
        mid = (node_lo + node_hi + 1) // 2
        left = count(node_lo, mid - 1)
        right = count(mid, node_hi)
        q = qubits[pos]
        if left and right:
            angle = math.acos(math.sqrt(left / (left + right)))
            gates.append(Unitary1Q(rotation_matrix(angle), q, prefix))
            walk(pos + 1, prefix + ((q, False),), node_lo, mid - 1)
            walk(pos + 1, prefix + ((q, True),), mid, node_hi)
        elif right:
            gates.append(Unitary1Q(X_MATRIX, q, prefix))
            walk(pos + 1, prefix + ((q, True),), mid, node_hi)
        elif left:
            walk(pos + 1, prefix, node_lo, mid - 1)

    walk(0, (), 0, (1 << width) - 1)
    return gates


def prep_uniform_range(m: int, counter: Register) -> UnitaryProgram:
    """|0..0> -> (1/sqrt(m)) sum of |chi> for chi = 1..m, exactly."""
    if m < 1:
        raise WidthTooSmall(f"m must be >= 1, got {m}")
    if m.bit_length() > counter.width:
        raise WidthTooSmall(
            f"counter width {counter.width} cannot hold {m}"
        )
    return UnitaryProgram(
        _interval_prep_gates(counter.qubits, 1, m),
        {counter.name: counter},
    )


def _phase_kick(
    oracle: BitOracle,
    inputs: tuple[int, ...],
    work: int,
    layer: int | None,
    controls: Controls,
) -> list[Gate]:
    """Sign flip on oracle-true inputs via a work qubit in (|0>-|1>)/sqrt(2).

    The X/H shell is deliberately unconditional: when `controls` suppress the
    write it collapses to identity, and the work qubit returns to |0> either
    way.
    """
    shell_in = [Unitary1Q(X_MATRIX, work), Unitary1Q(H_MATRIX, work)]
    shell_out = [Unitary1Q(H_MATRIX, work), Unitary1Q(X_MATRIX, work)]
    middle = oracle.write_gates(inputs, work, layer=layer, controls=controls)
    return shell_in + middle + shell_out


def grover_iterate(
    oracle: BitOracle,
    target: Register,
    work: int | None = None,
    layer: int | None = None,
    extra_controls: Controls = (),
) -> UnitaryProgram:
    """One iterate G = W F0 W Fp on the target register, Fp applied first.

    W is Hadamard on every target qubit; F0 flips the sign of |0...0> only.
    `work` is the phase-kick qubit (must be |0>, returned to |0>). With
    `extra_controls` the whole iterate is conditioned on those qubits: the
    W and F0 parts take them as gate controls, the oracle write sees them as
    its control set.
    """
    if oracle.input_width != target.width:
        raise WidthMismatch(
            f"oracle width {oracle.input_width} != target width "
            f"{target.width}"
        )
    if work is None:
        raise ArityMismatch("grover_iterate needs a work qubit")
    gates = _phase_kick(oracle, target.qubits, work, layer, extra_controls)
    hadamards = [
        Unitary1Q(H_MATRIX, q, extra_controls) for q in target.qubits
    ]
    flip_zero = Unitary1Q(
        FLIP_ZERO_MATRIX,
        target.qubits[-1],
        tuple((q, False) for q in target.qubits[:-1]) + extra_controls,
    )
    gates += hadamards + [flip_zero] + hadamards
    return UnitaryProgram(gates, {target.name: target})


def _cube_for_threshold(
    qubits: tuple[int, ...], lo: int, hi: int, thr: int
) -> Controls | None:
    """Control cube selecting exactly the values >= thr within [lo, hi].

    Returns () when the threshold is vacuous on the support, a tuple of
    (qubit, wanted) pairs when the selected slice is a subcube that excludes
    all of [lo, thr), and None when a comparator bit is required. Values
    outside [lo, hi] are don't-cares.
    """
    if thr <= lo:
        return ()
    width = len(qubits)
    selected = range(thr, hi + 1)
    and_mask = (1 << width) - 1
    or_mask = 0
    for v in selected:
        and_mask &= v
        or_mask |= v
    cube: list[tuple[int, bool]] = []
    for bit in range(width):
        q = qubits[width - 1 - bit]
        if (and_mask >> bit) & 1:
            cube.append((q, True))
        elif not (or_mask >> bit) & 1:
            cube.append((q, False))
    for v in range(lo, thr):
        if all(((v >> _bit_of(qubits, q)) & 1) == want for q, want in cube):
            return None
    return tuple(cube)


def _bit_of(qubits: tuple[int, ...], q: int) -> int:
    return len(qubits) - 1 - qubits.index(q)


def comparator_table(width: int, thr: int) -> np.ndarray:
    return np.array(
        [1 if v >= thr else 0 for v in range(1 << width)], dtype=np.uint8
    )


def controlled_grover_power(
    counter: Register,
    m: int,
    oracle: BitOracle,
    target: Register,
    work: int | None = None,
    scratch: int | None = None,
    value_offset: int = 1,
) -> UnitaryProgram:
    """W on target, then iterate j = 1..m conditioned on counter value >= j.

    On a counter branch holding chi (encoded as chi - 1 + value_offset) the
    net effect is exactly chi iterates. Thresholds that cut the counter range
    on a subcube boundary become plain gate controls; the rest compute a
    comparator bit into `scratch`, condition on it, and uncompute. Iterate j
    carries forward-layer tag j - 1.
    """
    if oracle.input_width != target.width:
        raise WidthMismatch(
            f"oracle width {oracle.input_width} != target width "
            f"{target.width}"
        )
    lo, hi = value_offset, value_offset + m - 1
    if hi.bit_length() > counter.width:
        raise WidthTooSmall(
            f"counter width {counter.width} cannot hold values up to {hi}"
        )
    prog = UnitaryProgram(
        [Unitary1Q(H_MATRIX, q) for q in target.qubits],
        {counter.name: counter, target.name: target},
    )
    for j in range(1, m + 1):
        thr = j - 1 + value_offset
        cube = _cube_for_threshold(counter.qubits, lo, hi, thr)
        if cube is not None:
            prog.extend(
                grover_iterate(oracle, target, work, layer=j - 1,
                               extra_controls=cube)
            )
            continue
        if scratch is None:
            raise ArityMismatch(
                f"threshold {thr} over {lo}..{hi} needs a comparator scratch "
                f"qubit"
            )
        cmp_gate = BitFunctionGate(
            counter.qubits, scratch, comparator_table(counter.width, thr)
        )
        prog.gates.append(cmp_gate)
        prog.extend(
            grover_iterate(oracle, target, work, layer=j - 1,
                           extra_controls=((scratch, True),))
        )
        prog.gates.append(cmp_gate)
    return prog
