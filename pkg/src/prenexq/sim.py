"""Dense statevector engine with named registers and query accounting.

Conventions, used everywhere and locked by tests:

* qubit q is bit q of the basis-state index (qubit 0 = least significant);
* a register reads its value big-endian over its qubit tuple, i.e. the first
  listed qubit is the most significant bit;
* amplitudes are complex128 and every gate is exactly unitary, so the L2 norm
  is preserved up to float rounding.

The engine owns the amplitude array, grows it when registers are allocated
(tensoring |0...0> on the left of the index), and applies four gate kinds:
single-qubit unitaries with positive/negated controls, classical XOR-function
gates (the black-box bit oracle and friends), basis permutations, and diagonal
phases. Bit-oracle applications marked `is_query` are counted, both in built
programs (static) and during runs (the engine's query counter).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence, Union

import numpy as np

from . import _kernels
from .errors import (
    AncillaNotZero,
    BadIndex,
    ValueOutOfRange,
    WidthExceeded,
    WidthMismatch,
)

DEFAULT_MAX_QUBITS = 28

H_MATRIX = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)
X_MATRIX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
# Phase -1 on |0>, +1 on |1>; with negated controls on the rest of a register
# this realizes the flip-sign-on-all-zero reflection.
FLIP_ZERO_MATRIX = np.array([[-1, 0], [0, 1]], dtype=np.complex128)


def rotation_matrix(angle: float) -> np.ndarray:
    """Real rotation sending |0> to cos(angle)|0> + sin(angle)|1>."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


@dataclass(frozen=True)
class Register:
    """Named, ordered slice of qubits. qubits[0] is the most significant."""

    name: str
    qubits: tuple[int, ...]

    @property
    def width(self) -> int:
        return len(self.qubits)

    def __post_init__(self):
        if len(set(self.qubits)) != len(self.qubits):
            raise BadIndex(f"register {self.name!r} repeats a qubit")


Controls = tuple[tuple[int, bool], ...]


def _control_masks(controls: Controls) -> tuple[int, int]:
    pos = neg = 0
    for qubit, wanted in controls:
        if wanted:
            pos |= 1 << qubit
        else:
            neg |= 1 << qubit
    return pos, neg


def _check_distinct(qubits: Iterable[int], what: str) -> None:
    seen = set()
    for q in qubits:
        if q < 0:
            raise BadIndex(f"{what}: negative qubit {q}")
        if q in seen:
            raise BadIndex(f"{what}: qubit {q} repeated")
        seen.add(q)


@dataclass(frozen=True, eq=False)
class Unitary1Q:
    """2x2 unitary on `target`, gated by positive/negated controls."""

    matrix: np.ndarray
    target: int
    controls: Controls = ()

    def __post_init__(self):
        _check_distinct(
            [self.target, *(q for q, _ in self.controls)], "Unitary1Q"
        )

    def touched(self) -> tuple[int, ...]:
        return (self.target, *(q for q, _ in self.controls))

    def inverse(self) -> "Unitary1Q":
        return replace(self, matrix=self.matrix.conj().T)


@dataclass(frozen=True, eq=False)
class BitFunctionGate:
    """|a, b> -> |a, b ^ f(a)> for a classical f given as a 0/1 table.

    `inputs` are read big-endian. With `is_query` set the gate counts as one
    black-box oracle evaluation; `layer` tags the forward amplification layer
    it belongs to (None = untagged, e.g. uncompute passes).
    """

    inputs: tuple[int, ...]
    output: int
    table: np.ndarray
    controls: Controls = ()
    is_query: bool = False
    layer: int | None = None

    def __post_init__(self):
        _check_distinct(
            [*self.inputs, self.output, *(q for q, _ in self.controls)],
            "BitFunctionGate",
        )
        if len(self.table) != 1 << len(self.inputs):
            raise WidthMismatch(
                f"table length {len(self.table)} != 2^{len(self.inputs)}"
            )

    def touched(self) -> tuple[int, ...]:
        return (*self.inputs, self.output, *(q for q, _ in self.controls))

    def inverse(self) -> "BitFunctionGate":
        # XOR writes are involutions; inverses lose the forward-layer tag.
        return replace(self, layer=None)


@dataclass(frozen=True, eq=False)
class PermutationGate:
    """Relabels basis values of a qubit slice: new index perm[v] gets old v."""

    qubits: tuple[int, ...]
    perm: np.ndarray

    def __post_init__(self):
        _check_distinct(self.qubits, "PermutationGate")
        n = 1 << len(self.qubits)
        if len(self.perm) != n:
            raise WidthMismatch(f"perm length {len(self.perm)} != {n}")
        if len(np.unique(self.perm)) != n:
            raise ValueOutOfRange("perm is not a bijection")

    def touched(self) -> tuple[int, ...]:
        return self.qubits

    def inverse(self) -> "PermutationGate":
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(len(self.perm))
        return replace(self, perm=inv)


@dataclass(frozen=True, eq=False)
class PhaseGate:
    """Multiplies each basis value of a qubit slice by a unit phase."""

    qubits: tuple[int, ...]
    phases: np.ndarray

    def __post_init__(self):
        _check_distinct(self.qubits, "PhaseGate")
        if len(self.phases) != 1 << len(self.qubits):
            raise WidthMismatch("phase table does not match register width")

    def touched(self) -> tuple[int, ...]:
        return self.qubits

    def inverse(self) -> "PhaseGate":
        return replace(self, phases=self.phases.conj())


Gate = Union[Unitary1Q, BitFunctionGate, PermutationGate, PhaseGate]


@dataclass
class UnitaryProgram:
    """Ordered gate list plus the registers it was built against."""

    gates: list[Gate] = field(default_factory=list)
    registers: dict[str, Register] = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return len(self.gates)

    def qubit_count(self) -> int:
        """Width of the engine this program expects (highest index + 1)."""
        top = -1
        for g in self.gates:
            top = max(top, max(g.touched()))
        for reg in self.registers.values():
            top = max(top, max(reg.qubits))
        return top + 1

    def extend(self, other: "UnitaryProgram") -> None:
        self.gates.extend(other.gates)
        self.registers.update(other.registers)

    def inverse(self) -> "UnitaryProgram":
        inv = [g.inverse() for g in reversed(self.gates)]
        return UnitaryProgram(inv, dict(self.registers))

    # -- query accounting ------------------------------------------------

    def total_queries(self) -> int:
        return sum(
            1
            for g in self.gates
            if isinstance(g, BitFunctionGate) and g.is_query
        )

    def query_layers(self) -> list[int]:
        """Per-layer counts of simultaneous oracle queries.

        Only forward amplification layers are tagged; sigma writes and
        uncompute passes run untagged (they do count in total_queries).
        """
        tags = [
            g.layer
            for g in self.gates
            if isinstance(g, BitFunctionGate)
            and g.is_query
            and g.layer is not None
        ]
        if not tags:
            return []
        profile = [0] * (max(tags) + 1)
        for t in tags:
            profile[t] += 1
        return profile

    def depth_in_oracle_layers(self) -> int:
        return len(self.query_layers())

    def max_parallel_queries(self) -> int:
        profile = self.query_layers()
        return max(profile) if profile else 0


class Engine:
    """Statevector simulator: allocation, gate application, readout."""

    def __init__(self, max_qubits: int = DEFAULT_MAX_QUBITS):
        self.max_qubits = max_qubits
        self.num_qubits = 0
        self.amplitudes = np.ones(1, dtype=np.complex128)
        self.registers: dict[str, Register] = {}
        self.query_count = 0
        self._pool: list[int] = []  # shared exactly-restored scratch qubits
        self._perm_scratch: np.ndarray | None = None

    # -- allocation --------------------------------------------------------

    def alloc_register(self, width: int, name: str) -> Register:
        """Appends `width` zeroed qubits and returns the register view.

        The new qubits take the next free indices, so existing amplitudes
        keep their positions (tensor with |0...0>).
        """
        if width < 1:
            raise WidthMismatch(f"register width must be >= 1, got {width}")
        if name in self.registers:
            raise BadIndex(f"register name {name!r} already in use")
        if self.num_qubits + width > self.max_qubits:
            raise WidthExceeded(
                f"allocating {width} qubit(s) for {name!r} needs "
                f"{self.num_qubits + width} total, cap is {self.max_qubits}"
            )
        first = self.num_qubits
        self.num_qubits += width
        grown = np.zeros(1 << self.num_qubits, dtype=np.complex128)
        grown[: self.amplitudes.shape[0]] = self.amplitudes
        self.amplitudes = grown
        self._perm_scratch = None
        # MSB first: the last-allocated qubit is the register's low bit.
        reg = Register(name, tuple(range(first + width - 1, first - 1, -1)))
        self.registers[name] = reg
        return reg

    def alloc_qubit(self, name: str) -> int:
        return self.alloc_register(1, name).qubits[0]

    def ensure_qubits(self, count: int) -> None:
        """Grows the state to `count` qubits (all new ones |0>), anonymously.

        Used when running a pre-laid-out program whose registers were
        assigned by the builder rather than by this engine.
        """
        if count > self.max_qubits:
            raise WidthExceeded(
                f"program needs {count} qubit(s), cap is {self.max_qubits}"
            )
        if count <= self.num_qubits:
            return
        self.num_qubits = count
        grown = np.zeros(1 << count, dtype=np.complex128)
        grown[: self.amplitudes.shape[0]] = self.amplitudes
        self.amplitudes = grown
        self._perm_scratch = None

    def shared_scratch(self, count: int) -> tuple[int, ...]:
        """Qubits from the shared pool, growing it on demand.

        Pool qubits must be exactly |0> between uses; callers that only park
        permutation-exact intermediate values there (sweep controllers,
        comparator results) can overlap freely.
        """
        while len(self._pool) < count:
            self._pool.append(self.alloc_qubit(f"pool{len(self._pool)}"))
        return tuple(self._pool[:count])

    # -- gate application ---------------------------------------------------

    def _check_gate(self, gate: Gate) -> None:
        for q in gate.touched():
            if q >= self.num_qubits:
                raise BadIndex(
                    f"gate touches qubit {q}, engine has {self.num_qubits}"
                )

    def apply(self, gate: Gate) -> None:
        self._check_gate(gate)
        amp = self.amplitudes
        if isinstance(gate, Unitary1Q):
            pos, neg = _control_masks(gate.controls)
            m = gate.matrix
            _kernels.one_qubit(
                amp, m[0, 0], m[0, 1], m[1, 0], m[1, 1], gate.target, pos, neg
            )
        elif isinstance(gate, BitFunctionGate):
            pos, neg = _control_masks(gate.controls)
            _kernels.bitfunc_xor(
                amp,
                np.asarray(gate.inputs, dtype=np.int64),
                gate.output,
                np.asarray(gate.table, dtype=np.uint8),
                pos,
                neg,
            )
            if gate.is_query:
                self.query_count += 1
        elif isinstance(gate, PermutationGate):
            if self._perm_scratch is None:
                self._perm_scratch = np.empty_like(amp)
            _kernels.permute(
                amp,
                self._perm_scratch,
                np.asarray(gate.qubits, dtype=np.int64),
                np.asarray(gate.perm, dtype=np.int64),
            )
            self.amplitudes, self._perm_scratch = self._perm_scratch, amp
        elif isinstance(gate, PhaseGate):
            _kernels.phase_mult(
                amp,
                np.asarray(gate.qubits, dtype=np.int64),
                np.asarray(gate.phases, dtype=np.complex128),
            )
        else:
            raise TypeError(f"unknown gate type {type(gate).__name__}")

    def run(self, program: UnitaryProgram) -> None:
        for gate in program.gates:
            self.apply(gate)

    def run_inverse(self, program: UnitaryProgram) -> None:
        for gate in reversed(program.gates):
            self.apply(gate.inverse())

    # -- classical writes ----------------------------------------------------

    def write_value(self, register: Register, value: int) -> None:
        """X-writes `value` into a register currently holding |0...0>."""
        if not 0 <= value < (1 << register.width):
            raise ValueOutOfRange(
                f"{value} does not fit in {register.width} bit(s)"
            )
        for k, q in enumerate(register.qubits):
            if (value >> (register.width - 1 - k)) & 1:
                self.apply(Unitary1Q(X_MATRIX, q))

    # -- readout --------------------------------------------------------------

    def probability_of(self, register: Register, value: int) -> float:
        if not 0 <= value < (1 << register.width):
            raise ValueOutOfRange(
                f"{value} does not fit in {register.width} bit(s)"
            )
        return float(
            _kernels.prob_value(
                self.amplitudes,
                np.asarray(register.qubits, dtype=np.int64),
                value,
            )
        )

    def zero_fidelity(self, targets) -> float:
        """Probability that every listed qubit reads 0.

        Accepts a Register, an iterable of Registers, qubit indices, or a
        mix. An empty selection gives 1.0.
        """
        if isinstance(targets, Register):
            targets = (targets,)
        mask = 0
        for item in targets:
            qs = item.qubits if isinstance(item, Register) else (item,)
            for q in qs:
                if not 0 <= q < self.num_qubits:
                    raise BadIndex(f"qubit {q} out of range")
                mask |= 1 << q
        return float(_kernels.prob_zero_mask(self.amplitudes, mask))

    def norm(self) -> float:
        return float(np.sqrt(_kernels.norm_sq(self.amplitudes)))

    def require_zero(self, qubits: Sequence[int], tol: float = 1e-9) -> None:
        fid = self.zero_fidelity(qubits)
        if fid < 1.0 - tol:
            raise AncillaNotZero(
                f"scratch qubits {tuple(qubits)} hold weight {1.0 - fid:.3e}"
            )
