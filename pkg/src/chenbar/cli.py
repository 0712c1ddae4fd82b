"""Command line front end.

Exit status: 0 on success (and when ``verify`` finds full agreement),
1 when ``verify`` finds a theorem disagreement, 2 on usage or parse errors,
3 when a precondition fails (for instance a connection that is not flat).
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .bar import (group_hodge_filtration, group_weight_filtration, hodge_filtration,
                  ideal_I, invariant_space, pairing_matrix, weight_filtration)
from .chen import PathParseError, format_path, parse_path
from .connection import (ConnectionParseError, check_flat, monodromy, parse_connection,
                         simpson_split, verify_theorems)
from .exact import format_matrix
from .group_algebra import algebra_dimension, format_vector, monomial_name, monomials
from .randomized import KINDS, verify_random

EXIT_OK = 0
EXIT_DISAGREE = 1
EXIT_USAGE = 2
EXIT_PRECONDITION = 3


class CLIError(Exception):
    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chenbar",
        description="Exact iterated integrals, bar-complex Hodge filtrations and unipotent "
                    "monodromy on square complex tori.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", help="basis of closed iterated integrals of length <= s")
    p.add_argument("--g", type=_positive, required=True)
    p.add_argument("--s", type=_nonnegative, required=True)

    p = sub.add_parser("ideals", help="the ideals I and Ibar in C pi_1 / J^{s+1}")
    p.add_argument("--g", type=_positive, required=True)
    p.add_argument("--s", type=_nonnegative, required=True)

    p = sub.add_parser("filtration", help="one step of the Hodge or weight filtration")
    p.add_argument("--g", type=_positive, required=True)
    p.add_argument("--s", type=_nonnegative, required=True)
    p.add_argument("--label", choices=("F", "Fbar", "W"), required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--side", choices=("group", "classes"), default="group",
                   help="filter C pi_1 / J^{s+1} (default) or the closed iterated integrals")

    p = sub.add_parser("monodromy", help="monodromy matrix of a connection along a loop")
    p.add_argument("--file", type=Path, required=True)
    p.add_argument("--path", required=True, help='loop such as "a1 b1 a1^-1"')

    p = sub.add_parser("classify", help="flatness, Higgs data and both theorem checks")
    p.add_argument("--file", type=Path, required=True)

    p = sub.add_parser("verify", help="check the theorem equivalences")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--file", type=Path)
    src.add_argument("--random", type=_nonnegative, metavar="COUNT")
    p.add_argument("--seed", type=int, help="required for --random (fallback: $CHENBAR_SEED)")
    p.add_argument("--g-max", type=_positive, default=2)
    p.add_argument("--s-max", type=_positive, default=3)
    p.add_argument("--r-max", type=_positive, default=6)
    p.add_argument("--jobs", type=_positive, default=1)
    return parser


def _load_connection(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CLIError(f"{path}: {exc.strerror}", EXIT_USAGE) from None
    try:
        return parse_connection(text)
    except ConnectionParseError as exc:
        raise CLIError(f"{path}: {exc}", EXIT_USAGE) from None
    except ValueError as exc:
        raise CLIError(f"{path}: {exc}", EXIT_USAGE) from None


def _require_flat(c, path) -> None:
    verdict = check_flat(c)
    if not verdict.flat:
        raise CLIError(f"{path}: flatness violation: {verdict.describe()}", EXIT_PRECONDITION)


def _basis_lines(space, g, s, indent="  ") -> list[str]:
    return [indent + format_vector(v, g, s) for v in space.basis]


def cmd_invariants(args, out):
    g, s = args.g, args.s
    classes = invariant_space(g, s)
    out.append(f"closed iterated integrals of length <= {s} on the torus g={g}")
    out.append(f"dimension {len(classes)} (C({2 * g + s},{s}) = {algebra_dimension(g, s)})")
    for alpha, cls in zip(monomials(g, s), classes):
        out.append(f"  {cls}    <-> {monomial_name(alpha, g)}")
    det = pairing_matrix(g, s).determinant()
    out.append(f"pairing with C pi_1 / J^{s + 1}: {'invertible' if det else 'SINGULAR'}")
    return EXIT_OK if det else EXIT_PRECONDITION


def cmd_ideals(args, out):
    g, s = args.g, args.s
    out.append(f"C pi_1 / J^{s + 1} for g={g}: dimension {algebra_dimension(g, s)}")
    for name, conj in (("I", False), ("Ibar", True)):
        space = ideal_I(g, s, conj)
        out.append(f"{name}: dim {space.dim}")
        out.extend(_basis_lines(space, g, s))
    return EXIT_OK


def cmd_filtration(args, out):
    g, s, label, level = args.g, args.s, args.label, args.level
    if args.side == "classes":
        rep = weight_filtration(g, s, level) if label == "W" else \
            hodge_filtration(g, s, level, conjugate=(label == "Fbar"))
        classes = invariant_space(g, s)
        out.append(f"{label}_{level} of closed iterated integrals (g={g}, s={s}): dim {rep.dim}"
                   if label == "W" else
                   f"{label}^{level} of closed iterated integrals (g={g}, s={s}): dim {rep.dim}")
        for v in rep.space.basis:
            k = next(i for i, x in enumerate(v) if x)
            out.append(f"  {classes[k]}")
        return EXIT_OK
    rep = group_weight_filtration(g, s, level) if label == "W" else \
        group_hodge_filtration(g, s, level, conjugate=(label == "Fbar"))
    sym = f"{label}_{level}" if label == "W" else f"{label}^{level}"
    out.append(f"{sym}(C pi_1 / J^{s + 1}) for g={g}: dim {rep.dim}")
    out.extend(_basis_lines(rep.space, g, s))
    return EXIT_OK


def cmd_monodromy(args, out):
    c = _load_connection(args.file)
    _require_flat(c, args.file)
    try:
        p = parse_path(args.path, c.g)
    except PathParseError as exc:
        raise CLIError(f"--path: {exc}", EXIT_USAGE) from None
    out.append(f"rho({format_path(p, c.g)}) =")
    out.append(format_matrix(monodromy(c, p)))
    return EXIT_OK


def cmd_classify(args, out):
    c = _load_connection(args.file)
    _require_flat(c, args.file)
    split = simpson_split(c)
    out.append(f"torus g={c.g}, blocks {' '.join(map(str, c.block_sizes))}, "
               f"rank {c.rank}, s={c.s}")
    out.append("flat: yes")
    out.append(f"underlying holomorphic bundle trivial (A^(0,1) = 0): "
               f"{'yes' if split.underlying_bundle_trivial else 'no'}")
    out.append(f"Higgs field zero (A^(1,0) = 0): {'yes' if split.higgs_field_zero else 'no'}")
    report = verify_theorems(c)
    out.extend(report.lines())
    return EXIT_OK


def cmd_verify(args, out):
    if args.file is not None:
        c = _load_connection(args.file)
        _require_flat(c, args.file)
        report = verify_theorems(c)
        out.extend(report.lines())
        if report.agree:
            out.append("1/1 agree")
            return EXIT_OK
        out.append("0/1 agree")
        out.append("counterexample certificate:")
        out.append(report.certificate().rstrip("\n"))
        return EXIT_DISAGREE

    seed = args.seed
    if seed is None:
        env = os.environ.get("CHENBAR_SEED")
        if env is None:
            raise CLIError("--random needs --seed (or CHENBAR_SEED)", EXIT_USAGE)
        try:
            seed = int(env)
        except ValueError:
            raise CLIError(f"CHENBAR_SEED must be an integer, got {env!r}", EXIT_USAGE) from None
    if args.r_max < 2:
        raise CLIError("--r-max must be at least 2", EXIT_USAGE)
    result = verify_random(args.random, seed, args.g_max, args.s_max, args.r_max, args.jobs)
    kinds = result.kind_counts()
    outcomes = result.outcome_counts()
    out.append(f"random flat connections: {result.count} (seed {seed}, g <= {args.g_max}, "
               f"s <= {args.s_max}, r <= {args.r_max})")
    out.append("specimens: " + ", ".join(f"{k} {kinds[k]}" for k in KINDS))
    out.append(f"factors through I: {outcomes['factors_I']}, not: {outcomes['not_factors_I']}")
    out.append(f"factors through Ibar: {outcomes['factors_Ibar']}, "
               f"not: {outcomes['not_factors_Ibar']}")
    out.append(f"{result.agreements}/{result.count} agree")
    failures = result.failures()
    if failures:
        first = failures[0]
        out.append(f"counterexample certificate (trial {first.index}):")
        out.append(first.report.certificate().rstrip("\n"))
        return EXIT_DISAGREE
    return EXIT_OK


COMMANDS = {
    "invariants": cmd_invariants,
    "ideals": cmd_ideals,
    "filtration": cmd_filtration,
    "monodromy": cmd_monodromy,
    "classify": cmd_classify,
    "verify": cmd_verify,
}


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out: list[str] = []
    try:
        status = COMMANDS[args.command](args, out)
    except CLIError as exc:
        if out:
            stdout.write("\n".join(out) + "\n")
        stderr.write(f"chenbar {args.command}: {exc}\n")
        return exc.status
    stdout.write("\n".join(out) + "\n")
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
