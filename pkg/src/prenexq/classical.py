"""Classical ground truth and closed-form predictions.

Everything here is plain numpy over explicit truth tables: the brute-force
quantifier evaluator the quantum pipeline is compared against, seeded random
instance generation, and the single-branch amplification law plus its
recursive composition used to predict gamma probabilities and margins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ArityMismatch, ValueOutOfRange, WidthMismatch

FORALL = "forall"
EXISTS = "exists"
QUANTIFIERS = (FORALL, EXISTS)


def iterations_for_width(width: int) -> int:
    """Grover iteration count m = ceil(2^(width/2)), integer-exact.

    Even widths hit the square root exactly; odd widths round up so the
    per-branch success floor survives.
    """
    n = 1 << width
    m = math.isqrt(n)
    return m if m * m == n else m + 1


@dataclass(frozen=True, eq=False)
class TruthTableOracle:
    """Predicate over declared variables, stored as a flat 0/1 table.

    Index bits are the variables concatenated in declaration order,
    big-endian: the first declared variable occupies the most significant
    bits. One convention, everywhere.
    """

    widths: tuple[int, ...]
    table: np.ndarray

    def __post_init__(self):
        if any(w < 1 for w in self.widths):
            raise WidthMismatch("variable widths must be >= 1")
        tab = np.asarray(self.table, dtype=np.uint8)
        if tab.shape != (1 << self.num_bits,):
            raise WidthMismatch(
                f"table length {tab.size} != 2^{self.num_bits}"
            )
        if tab.max(initial=0) > 1:
            raise ValueOutOfRange("table entries must be 0 or 1")
        tab.setflags(write=False)
        object.__setattr__(self, "table", tab)

    @property
    def num_bits(self) -> int:
        return sum(self.widths)

    @property
    def num_vars(self) -> int:
        return len(self.widths)

    def index_of(self, values: Sequence[int]) -> int:
        if len(values) != self.num_vars:
            raise ArityMismatch(
                f"expected {self.num_vars} values, got {len(values)}"
            )
        idx = 0
        for value, width in zip(values, self.widths):
            if not 0 <= value < (1 << width):
                raise ValueOutOfRange(
                    f"{value} does not fit in {width} bit(s)"
                )
            idx = (idx << width) | value
        return idx

    def value(self, *values: int) -> int:
        return int(self.table[self.index_of(values)])

    def negated(self) -> "TruthTableOracle":
        return TruthTableOracle(self.widths, 1 - self.table)

    @classmethod
    def from_function(
        cls, widths: Sequence[int], fn: Callable[..., int]
    ) -> "TruthTableOracle":
        """Tabulates fn over all assignments, declaration order, big-endian."""
        widths = tuple(widths)
        values = [0] * len(widths)
        table = np.zeros(1 << sum(widths), dtype=np.uint8)
        for idx in range(table.size):
            rem = idx
            for pos in range(len(widths) - 1, -1, -1):
                values[pos] = rem & ((1 << widths[pos]) - 1)
                rem >>= widths[pos]
            table[idx] = 1 if fn(*values) else 0
        return cls(widths, table)


@dataclass(frozen=True)
class Formula:
    """Prenex formula: free variables, quantifier prefix, opaque predicate.

    prefix is outermost-first; predicate arity is the free variables followed
    by the bound ones, in declaration order.
    """

    prefix: tuple[tuple[str, str, int], ...]
    free_vars: tuple[tuple[str, int], ...] = ()
    predicate: TruthTableOracle | None = None

    def __post_init__(self):
        names = [n for _, n, _ in self.prefix] + [n for n, _ in self.free_vars]
        if len(set(names)) != len(names):
            raise ArityMismatch("variable names must be unique")
        for quant, name, width in self.prefix:
            if quant not in QUANTIFIERS:
                raise ArityMismatch(f"unknown quantifier {quant!r} on {name}")
            if width < 1:
                raise WidthMismatch(f"width of {name} must be >= 1")
        for name, width in self.free_vars:
            if width < 1:
                raise WidthMismatch(f"width of {name} must be >= 1")
        if self.predicate is not None:
            declared = self.var_widths
            if self.predicate.widths != declared:
                raise ArityMismatch(
                    f"predicate widths {self.predicate.widths} != declared "
                    f"{declared}"
                )

    @property
    def k(self) -> int:
        return len(self.prefix)

    @property
    def n(self) -> int:
        """Total bound width, the n of N = 2^n."""
        return sum(w for _, _, w in self.prefix)

    @property
    def free_width(self) -> int:
        return sum(w for _, w in self.free_vars)

    @property
    def var_widths(self) -> tuple[int, ...]:
        return (*(w for _, w in self.free_vars), *(w for _, _, w in self.prefix))

    def with_predicate(self, table: TruthTableOracle) -> "Formula":
        return Formula(self.prefix, self.free_vars, table)


def _resolve_assignment(
    formula: Formula, assignment
) -> tuple[int, ...]:
    """Free-variable values in declaration order, from mapping or sequence."""
    if assignment is None:
        assignment = ()
    if isinstance(assignment, Mapping):
        missing = [n for n, _ in formula.free_vars if n not in assignment]
        extra = set(assignment) - {n for n, _ in formula.free_vars}
        if missing or extra:
            raise ArityMismatch(
                f"assignment mismatch: missing {missing}, unknown "
                f"{sorted(extra)}"
            )
        values = tuple(int(assignment[n]) for n, _ in formula.free_vars)
    else:
        values = tuple(int(v) for v in assignment)
        if len(values) != len(formula.free_vars):
            raise ArityMismatch(
                f"expected {len(formula.free_vars)} free value(s), got "
                f"{len(values)}"
            )
    for value, (name, width) in zip(values, formula.free_vars):
        if not 0 <= value < (1 << width):
            raise ValueOutOfRange(f"{name}={value} exceeds {width} bit(s)")
    return values


def classical_eval(
    formula: Formula,
    table: TruthTableOracle | None = None,
    assignment=None,
) -> bool:
    """Brute-force reference: forall = AND over the variable, exists = OR."""
    oracle = table if table is not None else formula.predicate
    if oracle is None:
        raise ArityMismatch("no predicate table supplied")
    if oracle.widths != formula.var_widths:
        raise ArityMismatch(
            f"table widths {oracle.widths} != declared {formula.var_widths}"
        )
    free_vals = _resolve_assignment(formula, assignment)

    def down(level: int, bound: tuple[int, ...]) -> bool:
        if level == formula.k:
            return oracle.value(*free_vals, *bound) == 1
        quant, _, width = formula.prefix[level]
        branches = (
            down(level + 1, bound + (x,)) for x in range(1 << width)
        )
        return all(branches) if quant == FORALL else any(branches)

    return down(0, ())


def count_solutions(
    table: TruthTableOracle, fixed_prefix: Sequence[int] = ()
) -> int:
    """Number of completions of the leading variables with table value 1."""
    if len(fixed_prefix) > table.num_vars:
        raise ArityMismatch(
            f"{len(fixed_prefix)} fixed values for {table.num_vars} variables"
        )
    offset = 0
    fixed_width = 0
    for value, width in zip(fixed_prefix, table.widths):
        if not 0 <= value < (1 << width):
            raise ValueOutOfRange(f"{value} does not fit in {width} bit(s)")
        offset = (offset << width) | value
        fixed_width += width
    rem = table.num_bits - fixed_width
    # Prefix variables are the most significant bits, so completions are a
    # contiguous slice.
    lo = offset << rem
    return int(table.table[lo : lo + (1 << rem)].sum())


@dataclass(frozen=True)
class InstanceSpec:
    """Formula skeleton plus the randomness knobs for table generation."""

    prefix: tuple[tuple[str, int], ...]
    free_widths: tuple[int, ...] = ()
    density: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.density <= 1.0:
            raise ValueOutOfRange(f"density {self.density} outside [0,1]")
        for quant, width in self.prefix:
            if quant not in QUANTIFIERS:
                raise ArityMismatch(f"unknown quantifier {quant!r}")
            if width < 1:
                raise WidthMismatch("bound widths must be >= 1")


def random_instance(spec: InstanceSpec) -> tuple[Formula, TruthTableOracle]:
    """Seeded instance: each table bit is 1 with probability density."""
    widths = (*spec.free_widths, *(w for _, w in spec.prefix))
    rng = np.random.default_rng(spec.seed)
    # rng.random() < density is exact at both endpoints: samples live in
    # [0, 1), so density 0 gives all zeros and density 1 all ones.
    table = (rng.random(1 << sum(widths)) < spec.density).astype(np.uint8)
    oracle = TruthTableOracle(widths, table)
    formula = Formula(
        prefix=tuple(
            (quant, f"x{i + 1}", width)
            for i, (quant, width) in enumerate(spec.prefix)
        ),
        free_vars=tuple(
            (f"z{i + 1}", width) for i, width in enumerate(spec.free_widths)
        ),
        predicate=oracle,
    )
    return formula, oracle


def closed_form_success(N: int, t: int, j: int) -> float:
    """Grover branch law: sin^2((2j+1) theta) with sin^2(theta) = t/N."""
    if N < 1 or not 0 <= t <= N:
        raise ValueOutOfRange(f"need 0 <= t <= N and N >= 1, got t={t} N={N}")
    if t == 0:
        return 0.0
    theta = math.asin(math.sqrt(t / N))
    return math.sin((2 * j + 1) * theta) ** 2


def averaged_success(p_vec: np.ndarray, m: int) -> float:
    """Mean marked-read probability over counter branches chi = 1..m.

    p_vec[x] is the probability the block's oracle reads 1 on basis input x.
    The amplitude recursion below is the textbook iterate (phase flip, then
    inversion about the mean), so for 0/1 entries this equals the closed
    form sin^2((2 chi + 1) theta) averaged over chi, with sin^2(theta) =
    t/N. Fractional entries are accepted but treated as pure phases; callers
    that care about leakage should go through shared_draw_or_prob instead.
    """
    p = np.asarray(p_vec, dtype=np.float64)
    size = p.size
    alpha = np.full(size, 1.0 / math.sqrt(size))
    total = 0.0
    for _ in range(m):
        alpha = alpha * (1.0 - 2.0 * p)
        alpha = 2.0 * alpha.mean() - alpha
        total += float((alpha * alpha) @ p)
    return total / m


def shared_draw_or_prob(
    p_vec: np.ndarray, classes: Sequence[int], M: int
) -> float:
    """P(at least one of M blocks reads 1) with shared per-class draws.

    The blocks run over shared scratch registers, so their read bits are
    not independent: two blocks landing on values whose inner subtables are
    identical (same class label) see the same residual state and reproduce
    the same outcome. The model: each block picks a value uniformly, every
    class holds a single Bernoulli(p) coin, and all blocks that picked a
    class share its coin. Measured against exact simulation this is within
    0.032 of P(gamma=1) at one bound bit per level; it deliberately ignores
    amplification inside a noisy level, which exact simulation shows is
    suppressed by leakage but not perfectly (see the compiler tests for the
    frozen comparison points).
    """
    p = np.asarray(p_vec, dtype=np.float64)
    size = p.size
    if len(classes) != size:
        raise ArityMismatch(f"{len(classes)} class labels for {size} values")
    labels = sorted(set(classes))
    members = {c: [x for x in range(size) if classes[x] == c] for c in labels}
    miss = 0.0
    # E over block value picks of the product of (1 - p) across the distinct
    # classes hit; grouping by occupancy keeps this polynomial in M.
    for picks in _occupancies(len(labels), M):
        weight = math.factorial(M)
        prob = 1.0
        for c, count in zip(labels, picks):
            weight //= math.factorial(count)
            prob *= (len(members[c]) / size) ** count
            if count:
                # every block that picked this class shares one coin
                prob *= 1.0 - float(p[members[c]].mean())
        miss += weight * prob
    return 1.0 - miss


def _occupancies(bins: int, balls: int):
    """All ways to drop `balls` labelled blocks into `bins` classes."""
    if bins == 1:
        yield (balls,)
        return
    for first in range(balls + 1):
        for rest in _occupancies(bins - 1, balls - first):
            yield (first, *rest)


def predict_gamma_prob(
    formula: Formula,
    assignment=None,
    M: int = 3,
    table: TruthTableOracle | None = None,
) -> float:
    """Recursively composed closed-form prediction of the final P(gamma=1).

    Per level: if every branch value below is crisp (0 or 1), the level is
    a clean search and the amplified branch law applies exactly; otherwise
    the level's blocks read a leaky oracle and the shared-scratch collision
    model of shared_draw_or_prob takes over. Exact for k = 1, for any
    formula whose failing levels have zero witnesses, and whenever all
    inner probabilities have converged to 0/1.
    """
    oracle = table if table is not None else formula.predicate
    if oracle is None:
        raise ArityMismatch("no predicate table supplied")
    free_vals = _resolve_assignment(formula, assignment)

    def level(i: int, bound: tuple[int, ...]) -> float:
        if i == formula.k:
            return float(oracle.value(*free_vals, *bound))
        quant, _, width = formula.prefix[i]
        size = 1 << width
        p_vec = np.array([level(i + 1, bound + (x,)) for x in range(size)])
        if quant == FORALL:
            p_vec = 1.0 - p_vec
        if np.all((p_vec == 0.0) | (p_vec == 1.0)):
            q = averaged_success(p_vec, iterations_for_width(width))
            big_p = 1.0 - (1.0 - q) ** M
        else:
            classes = _slice_classes(oracle, free_vals + bound, width)
            big_p = shared_draw_or_prob(p_vec, classes, M)
        return 1.0 - big_p if quant == FORALL else big_p

    return level(0, ())


def _slice_classes(
    oracle: TruthTableOracle, prefix: tuple[int, ...], width: int
) -> list[int]:
    """Class labels for a level's values: equal inner subtables share junk.

    Two values whose remaining truth-table slices are bit-identical drive
    identical inner programs, hence identical residual scratch states.
    """
    fixed = 0
    fixed_width = 0
    for value, w in zip(prefix, oracle.widths):
        fixed = (fixed << w) | value
        fixed_width += w
    rem = oracle.num_bits - fixed_width - width
    base = fixed << (width + rem)
    groups: dict[bytes, int] = {}
    labels = []
    for v in range(1 << width):
        lo = base + (v << rem)
        key = oracle.table[lo : lo + (1 << rem)].tobytes()
        labels.append(groups.setdefault(key, len(groups)))
    return labels
