"""Formula surface syntax and the truth-table file format.

Grammar (whitespace-insensitive, # starts a comment to end of line):

    formula   := {free_decl} prefix ":" "p"
    free_decl := "free" ident "[" int "]"
    prefix    := quant ident "[" int "]" {quant ident "[" int "]"}
    quant     := "forall" | "exists"

Truth-table files: a `vars name[w] ...` line in predicate declaration order,
then one line holding either a 0/1 string (index 0 first) or 0x-prefixed hex
(big-endian nibbles, left-padded to the table width).
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .classical import EXISTS, FORALL, Formula, TruthTableOracle
from .errors import (
    BadCharacter,
    DuplicateVariable,
    LengthMismatch,
    ParseError,
    VarsMismatch,
    ZeroWidth,
)

_TOKEN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|\d+|[\[\]:]|\S")
_KEYWORDS = {"free", "forall", "exists", "p"}


class _Tokens:
    """Token stream with 1-based line/column tracking for errors."""

    def __init__(self, text: str):
        self.items: list[tuple[str, int, int]] = []
        for ln, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0]
            for m in _TOKEN.finditer(line):
                self.items.append((m.group(), ln, m.start() + 1))
        self.pos = 0

    def peek(self) -> str | None:
        if self.pos < len(self.items):
            return self.items[self.pos][0]
        return None

    def where(self) -> tuple[int, int]:
        idx = min(self.pos, len(self.items) - 1)
        if idx < 0:
            return 1, 1
        _, ln, col = self.items[idx]
        return ln, col

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", *self.where())
        self.pos += 1
        return tok

    def expect(self, wanted: str) -> None:
        ln, col = self.where()
        tok = self.peek()
        if tok != wanted:
            raise ParseError(
                f"expected {wanted!r}, got {tok!r}"
                if tok is not None
                else f"expected {wanted!r}, got end of input",
                ln,
                col,
            )
        self.pos += 1

    def fail(self, message: str):
        raise ParseError(message, *self.where())


def _ident(toks: _Tokens, seen: set[str]) -> str:
    ln, col = toks.where()
    tok = toks.take()
    if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok):
        raise ParseError(f"expected a variable name, got {tok!r}", ln, col)
    if tok in _KEYWORDS:
        raise ParseError(f"{tok!r} is reserved", ln, col)
    if tok in seen:
        raise DuplicateVariable(f"variable {tok!r} declared twice", ln, col)
    seen.add(tok)
    return tok


def _width(toks: _Tokens) -> int:
    toks.expect("[")
    ln, col = toks.where()
    tok = toks.take()
    if not tok.isdigit():
        raise ParseError(f"expected a width, got {tok!r}", ln, col)
    w = int(tok)
    if w == 0:
        raise ZeroWidth("width must be >= 1", ln, col)
    toks.expect("]")
    return w


def parse_formula(text: str) -> Formula:
    """Parses the prenex DSL; the predicate table is attached separately."""
    toks = _Tokens(text)
    seen: set[str] = set()
    free_vars = []
    while toks.peek() == "free":
        toks.take()
        name = _ident(toks, seen)
        free_vars.append((name, _width(toks)))
    prefix = []
    while toks.peek() in (FORALL, EXISTS):
        quant = toks.take()
        name = _ident(toks, seen)
        prefix.append((quant, name, _width(toks)))
    if not prefix:
        toks.fail("expected at least one quantifier")
    toks.expect(":")
    toks.expect("p")
    if toks.peek() is not None:
        toks.fail(f"unexpected trailing token {toks.peek()!r}")
    return Formula(tuple(prefix), tuple(free_vars), None)


def format_formula(formula: Formula) -> str:
    """Inverse of parse_formula up to whitespace."""
    parts = [f"free {n}[{w}]" for n, w in formula.free_vars]
    parts += [f"{q} {n}[{w}]" for q, n, w in formula.prefix]
    parts.append(": p")
    return " ".join(parts)


def _parse_decls(line: str, ln: int) -> list[tuple[str, int]]:
    decls = []
    for m in re.finditer(r"(\S+)", line):
        d = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)\[(\d+)\]", m.group(1))
        if d is None:
            raise VarsMismatch(
                f"line {ln}: bad declaration {m.group(1)!r}, expected "
                f"name[width]"
            )
        decls.append((d.group(1), int(d.group(2))))
    if not decls:
        raise VarsMismatch(f"line {ln}: vars line declares nothing")
    return decls


def _parse_bits(line: str, ln: int, num_bits: int) -> np.ndarray:
    size = 1 << num_bits
    if line.startswith(("0x", "0X")):
        digits = line[2:]
        if not digits or any(c not in "0123456789abcdefABCDEF" for c in digits):
            raise BadCharacter(f"line {ln}: bad hex table {line!r}")
        needed = (size + 3) // 4
        if len(digits) != needed:
            raise LengthMismatch(
                f"line {ln}: expected {needed} hex digit(s) for a "
                f"{size}-entry table, got {len(digits)}"
            )
        value = int(digits, 16)
        if value >> size:
            raise LengthMismatch(
                f"line {ln}: hex table does not fit {size} bits"
            )
        return np.array(
            [(value >> (size - 1 - i)) & 1 for i in range(size)],
            dtype=np.uint8,
        )
    if any(c not in "01" for c in line):
        raise BadCharacter(f"line {ln}: table must be 0/1 or 0x hex")
    if len(line) != size:
        raise LengthMismatch(
            f"line {ln}: expected {size} table bit(s), got {len(line)}"
        )
    return np.array([int(c) for c in line], dtype=np.uint8)


def load_truth_table(
    path, expected: Formula | None = None
) -> TruthTableOracle:
    """Reads the two-line table file; checks declarations against `expected`.

    The vars line must list the predicate's variables in declaration order
    (free first, then bound); with `expected` given, names and widths must
    match the formula exactly.
    """
    content = []
    for ln, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            content.append((ln, line))
    if len(content) != 2:
        raise VarsMismatch(
            f"{path}: expected a vars line and a table line, found "
            f"{len(content)} content line(s)"
        )
    (ln1, vars_line), (ln2, table_line) = content
    if not vars_line.startswith("vars"):
        raise VarsMismatch(f"line {ln1}: file must start with 'vars'")
    decls = _parse_decls(vars_line[len("vars"):], ln1)
    if expected is not None:
        wanted = [*expected.free_vars, *(
            (n, w) for _, n, w in expected.prefix
        )]
        if decls != wanted:
            raise VarsMismatch(
                f"table declares {decls}, formula declares {wanted}"
            )
    widths = tuple(w for _, w in decls)
    table = _parse_bits(table_line, ln2, sum(widths))
    return TruthTableOracle(widths, table)
