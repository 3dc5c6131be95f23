"""Command-line front end.

Verbs: ``validate``, ``sweep``, ``leakage``, ``compile``, ``roundtrip``.
Exit codes: 0 success, 1 unreadable/malformed input, 2 violated
precondition (including a failing access structure), 3 no-cloning
violation (n >= 2k).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import tempfile
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import circuit, gaussian
from . import scheme as sch

EXIT_PARSE = 1
EXIT_PRECONDITION = 2
EXIT_NO_CLONING = 3

SCHEME_KEYS = {"k", "n", "L", "discarded_shares", "r", "secret", "r_grid"}


class SchemeFileError(ValueError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + msg)
        self.line, self.col = line, col


@dataclass
class SchemeFile:
    spec: sch.ThresholdSchemeSpec
    r: float = 1.0
    secret: complex = 1.0
    r_grid: list[float] = field(default_factory=list)


def _locate(text: str, key: str) -> tuple[int | None, int | None]:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    if not m:
        return None, None
    line = text.count("\n", 0, m.start()) + 1
    col = m.start() - (text.rfind("\n", 0, m.start()) + 1) + 1
    return line, col


def parse_scheme(text: str, seed: int | None = None) -> SchemeFile:
    """Parse a JSON scheme document.

    ``k`` and ``n`` are required.  ``L`` defaults to the built-in encoding
    map, ``discarded_shares`` to the highest labels, ``secret`` is
    ``[re, im]``.  Raises :class:`SchemeFileError` for malformed input and
    :class:`~cvqss.scheme.NoCloningError` for n >= 2k.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemeFileError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise SchemeFileError("top level must be an object", 1, 1)
    unknown = sorted(set(doc) - SCHEME_KEYS)
    if unknown:
        raise SchemeFileError(f"unknown key {unknown[0]!r}", *_locate(text, unknown[0]))

    def bad(key, msg):
        return SchemeFileError(f"{key}: {msg}", *_locate(text, key))

    for key in ("k", "n"):
        if key not in doc:
            raise SchemeFileError(f"missing required key {key!r}")
        if not isinstance(doc[key], int) or isinstance(doc[key], bool):
            raise bad(key, "must be an integer")
    k, n = doc["k"], doc["n"]
    if k < 1:
        raise bad("k", "must be at least 1")

    L = None
    if "L" in doc:
        rows = doc["L"]
        if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
            raise bad("L", "must be a list of rows")
        if len(rows) != 2 * k - 1:
            raise bad("L", f"expected {2 * k - 1} rows, got {len(rows)}")
        for i, row in enumerate(rows):
            if len(row) != k:
                raise bad("L", f"row {i + 1} has {len(row)} entries, expected {k}")
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in row):
                raise bad("L", f"row {i + 1} has non-numeric entries")
        L = np.array(rows, dtype=float)
    elif k > 2:
        L = sch.default_L(k, seed)

    discarded = doc.get("discarded_shares")
    if discarded is not None and not (
        isinstance(discarded, list) and all(isinstance(v, int) for v in discarded)
    ):
        raise bad("discarded_shares", "must be a list of share labels")

    r = doc.get("r", 1.0)
    if not isinstance(r, (int, float)) or isinstance(r, bool) or r < 0:
        raise bad("r", "must be a non-negative number")
    secret = doc.get("secret", [1.0, 0.0])
    if not (isinstance(secret, list) and len(secret) == 2 and all(isinstance(v, (int, float)) for v in secret)):
        raise bad("secret", "must be [re, im]")
    grid = doc.get("r_grid", [])
    if not (isinstance(grid, list) and all(isinstance(v, (int, float)) and v >= 0 for v in grid)):
        raise bad("r_grid", "must be a list of non-negative numbers")

    if n >= 2 * k:
        raise sch.NoCloningError(f"a ({k},{n}) scheme is impossible: n >= 2k")
    try:
        spec = sch.ThresholdSchemeSpec(k, n, L, discarded)
    except sch.NoCloningError:
        raise
    except sch.SchemeError as exc:
        raise SchemeFileError(str(exc)) from None
    return SchemeFile(spec, float(r), complex(*secret), [float(v) for v in grid])


def load_scheme(path: str, seed: int | None = None) -> SchemeFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemeFileError(f"cannot read {path}: {exc.strerror}") from None
    return parse_scheme(text, seed)


# ------------------------------------------------------------------ output


def fmt(v: float) -> str:
    return f"{v:.12g}"


def format_table(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError("ragged result table")
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_atomic(path: str | None, text: str) -> None:
    """Write via a temporary file and rename, so failures leave no partial output."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cvqss-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ------------------------------------------------------------- arg parsing


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def parse_complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}")


def parse_grid(text: str) -> list[float]:
    """``start:stop:step``, inclusive of ``stop``; an empty string is an empty grid."""
    if text.strip() == "":
        return []
    try:
        start, stop, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start or start < 0:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


class _Parser(argparse.ArgumentParser):
    # malformed command lines count as malformed input, not a violated precondition
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--scheme", required=True, help="JSON scheme file")
    common.add_argument("--seed", type=int, default=None, help="seed for randomised encoding-map construction")

    p = _Parser(prog="cvqss", description="Continuous-variable quantum secret sharing toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("validate", parents=[common], help="check the access structure of a scheme")

    sp = sub.add_parser("sweep", parents=[common], help="reconstruction fidelity versus squeezing")
    sp.add_argument("--collaborators", type=parse_int_list, required=True)
    sp.add_argument("--alpha", type=parse_complex, default=None)
    sp.add_argument("--grid", type=parse_grid, default=None)
    sp.add_argument("--out", default=None)

    lp = sub.add_parser("leakage", parents=[common], help="fidelity between sub-threshold shares for two secrets")
    lp.add_argument("--subset", type=parse_int_list, required=True)
    lp.add_argument("--alpha0", type=parse_complex, default=0j)
    lp.add_argument("--alpha1", type=parse_complex, default=1 + 0j)
    lp.add_argument("--grid", type=parse_grid, default=None)
    lp.add_argument("--out", default=None)

    cp = sub.add_parser("compile", parents=[common], help="optical netlist for a collaborator group")
    cp.add_argument("--collaborators", type=parse_int_list, required=True)
    cp.add_argument("--out", default=None)

    rp = sub.add_parser("roundtrip", parents=[common], help="encode, reconstruct and print the fidelity")
    rp.add_argument("--collaborators", type=parse_int_list, required=True)
    rp.add_argument("--alpha", type=parse_complex, default=None)
    rp.add_argument("--r", type=float, default=None)
    return p


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    sf = load_scheme(args.scheme, args.seed)
    report = sch.validate(sf.spec)
    print(f"scheme: ({sf.spec.k},{sf.spec.n}) threshold, shares {list(sf.spec.shares)}")
    print(f"subsets checked: {report.subsets_checked}")
    print(f"min |det|: {fmt(report.min_abs_det)}")
    print(("PASS: " if report.ok else "FAIL: ") + report.message)
    return 0 if report.ok else EXIT_PRECONDITION


def cmd_sweep(args) -> int:
    sf = load_scheme(args.scheme, args.seed)
    alpha = sf.secret if args.alpha is None else args.alpha
    grid = sf.r_grid if args.grid is None else args.grid
    rows = sch.fidelity_sweep(sf.spec, args.collaborators, alpha, grid)
    formula = sch.is_standard_23(sf.spec) and sch.fidelity_formula_23(args.collaborators, 0.0) is not None
    formula = formula and set(args.collaborators) != {1, 2}
    if formula:
        header = ["r", "F_measured", "F_formula", "abs_error"]
        table = []
        for r, F in rows:
            ref = sch.fidelity_formula_23(args.collaborators, r)
            table.append((r, F, ref, abs(F - ref)))
    else:
        header = ["r", "F_measured"]
        table = rows
    write_atomic(args.out, format_table(header, table))
    return 0


def cmd_leakage(args) -> int:
    sf = load_scheme(args.scheme, args.seed)
    if len(args.subset) >= sf.spec.k:
        print(f"error: a subset of {len(args.subset)} shares meets the threshold k={sf.spec.k}", file=sys.stderr)
        return EXIT_PRECONDITION
    grid = sf.r_grid if args.grid is None else args.grid
    rows = []
    for r in grid:
        enc = sch.encode(args.alpha0, sf.spec, r)
        rows.append((r, sch.leakage(enc, args.subset, args.alpha0, args.alpha1)))
    write_atomic(args.out, format_table(["r", "leakage_fidelity"], rows))
    return 0


def cmd_compile(args) -> int:
    sf = load_scheme(args.scheme, args.seed)
    plan = sch.solve_T(sf.spec, args.collaborators)
    c = circuit.compile(plan.S)
    err = float(np.linalg.norm(circuit.replay(c).matrix - plan.S.matrix))
    write_atomic(args.out, circuit.to_netlist(c))
    print(f"collaborators: {list(plan.collaborators)} (secret appears on share {plan.output_share})")
    print(
        f"elements: {c.count(circuit.BeamSplitter)} BS, {c.count(circuit.PhaseShifter)} PS, "
        f"{c.count(circuit.SingleModeSqueezer)} SQ"
    )
    print(f"recomposition_error: {err:.3e}")
    return 0


def cmd_roundtrip(args) -> int:
    sf = load_scheme(args.scheme, args.seed)
    alpha = sf.secret if args.alpha is None else args.alpha
    r = sf.r if args.r is None else args.r
    if r < 0:
        print("error: squeezing must be non-negative", file=sys.stderr)
        return EXIT_PRECONDITION
    F = sch.roundtrip_fidelity(alpha, sf.spec, args.collaborators, r)
    print(fmt(F))
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "sweep": cmd_sweep,
    "leakage": cmd_leakage,
    "compile": cmd_compile,
    "roundtrip": cmd_roundtrip,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except SchemeFileError as exc:
        print(f"{args.scheme}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except sch.NoCloningError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CLONING
    except (sch.SchemeError, gaussian.InvalidStateError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
