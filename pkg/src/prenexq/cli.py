"""Command-line front end: verify a single formula, or sweep one axis.

verify prints a RunReport as JSON on stdout and exits 0 when the quantum
decision agrees with classical ground truth, 2 when it disagrees, 1 on any
error. sweep prints CSV rows, one per axis value, in deterministic order.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .classical import EXISTS, Formula, TruthTableOracle
from .compiler import evaluate
from .dsl import load_truth_table, parse_formula
from .errors import BadAxis, PrenexqError

SWEEP_COLUMNS = (
    "axis",
    "margin_mean",
    "agree_rate",
    "depth",
    "paper_depth",
    "parallel",
    "wall_ms",
)

_AXIS_DEFAULTS = {
    "M": "1,2,3,4",
    "n": "2,3,4",
    "density": "0,0.25,0.5,0.75,1",
}


class _Parser(argparse.ArgumentParser):
    """Exit 1 on bad flags; plain exit 2 is reserved for 'disagree'."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _assign(text: str) -> tuple[str, int]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(
            f"bad --assign {text!r}, expected name=value"
        )
    try:
        return name.strip(), int(value, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"bad --assign value {value!r}, expected an integer"
        ) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="prenexq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check one formula against its table")
    v.add_argument("--formula", required=True, help="path to a DSL file")
    v.add_argument("--oracle", required=True, help="path to a table file")
    v.add_argument("--M", type=int, default=3, help="amplification blocks")
    v.add_argument(
        "--assign",
        action="append",
        type=_assign,
        default=[],
        metavar="NAME=VALUE",
        help="free-variable value, repeatable",
    )
    v.add_argument("--json", help="also write the report to this path")
    v.add_argument(
        "--shots",
        type=int,
        default=0,
        help="sample the verdict this many times (demo, stderr only)",
    )
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--max-qubits", type=int, default=28)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="scan one axis, print CSV")
    s.add_argument("--axis", required=True, help="one of: M, n, density")
    s.add_argument(
        "--values",
        help="comma-separated axis values (default depends on axis)",
    )
    s.add_argument("--M", type=int, default=3)
    s.add_argument("--n", type=int, default=2, help="existential width")
    s.add_argument("--density", type=float, default=0.5)
    s.add_argument(
        "--t",
        type=int,
        default=None,
        help="exact solution count per instance (M and n axes only)",
    )
    s.add_argument("--count", type=int, default=4, help="instances per value")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-qubits", type=int, default=28)
    s.add_argument("--plot", metavar="DIR", help="also render PNGs here")
    s.set_defaults(func=cmd_sweep)
    return parser


def cmd_verify(args) -> int:
    formula = parse_formula(Path(args.formula).read_text())
    oracle = load_truth_table(args.oracle, expected=formula)
    assignment = dict(args.assign)
    report = evaluate(
        formula.with_predicate(oracle),
        assignment=assignment if assignment else None,
        budget=args.M,
        max_qubits=args.max_qubits,
    )
    payload = json.dumps(report.as_dict(), indent=2, sort_keys=True)
    print(payload)
    if args.json:
        Path(args.json).write_text(payload + "\n")
    if args.shots > 0:
        rng = np.random.default_rng(args.seed)
        ones = int(rng.binomial(args.shots, report.gamma_prob))
        print(
            f"shots: {ones} of {args.shots} measured gamma=1 "
            f"(frequency {ones / args.shots:.4f})",
            file=sys.stderr,
        )
    return 0 if report.agree else 2


def _sweep_values(axis: str, text: str | None):
    if text is None:
        text = _AXIS_DEFAULTS[axis]
    kind = float if axis == "density" else int
    try:
        return [kind(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise BadAxis(f"bad --values for axis {axis}: {text!r}") from None


def _instance_table(rng, n: int, density: float, t: int | None) -> np.ndarray:
    size = 1 << n
    if t is None:
        return (rng.random(size) < density).astype(np.uint8)
    if not 0 <= t <= size:
        raise BadAxis(f"--t {t} out of range for n={n}")
    table = np.zeros(size, dtype=np.uint8)
    table[rng.choice(size, size=t, replace=False)] = 1
    return table


def cmd_sweep(args) -> int:
    if args.axis not in ("M", "n", "density"):
        raise BadAxis(f"unknown axis {args.axis!r}, expected M, n or density")
    values = _sweep_values(args.axis, args.values)
    rows = []
    for vi, value in enumerate(values):
        M = value if args.axis == "M" else args.M
        n = value if args.axis == "n" else args.n
        density = value if args.axis == "density" else args.density
        t = None if args.axis == "density" else args.t
        margins, agrees, wall = [], [], 0.0
        depth = paper_depth = parallel = 0
        for i in range(args.count):
            rng = np.random.default_rng((args.seed, vi, i))
            oracle = TruthTableOracle(
                (n,), _instance_table(rng, n, density, t)
            )
            formula = Formula(((EXISTS, "x", n),), (), oracle)
            report = evaluate(formula, budget=M, max_qubits=args.max_qubits)
            correct = (
                report.gamma_prob
                if report.classical_truth
                else 1.0 - report.gamma_prob
            )
            margins.append(correct)
            agrees.append(report.agree)
            depth = report.oracle_layer_depth
            paper_depth = report.paper_depth_bound
            parallel = report.max_parallel_queries
            wall += report.wall_time_ms
        rows.append(
            (
                f"{value:g}" if args.axis == "density" else str(value),
                f"{sum(margins) / len(margins):.9f}",
                f"{sum(agrees) / len(agrees):.9f}",
                str(depth),
                f"{paper_depth:.6g}",
                str(parallel),
                f"{wall:.3f}",
            )
        )
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    writer.writerows(rows)
    if args.plot:
        from .plots import render_sweep_plots

        written = render_sweep_plots(args.axis, rows, args.plot)
        for path in written:
            print(f"wrote {path}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PrenexqError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
