"""Define the unidefect command-line interface.

Usage:
    unidefect defect fourier:6 --method all --json
    unidefect fourier-table --max 32 --markdown
    unidefect family --p 2 --k 3 --verify
    unidefect pcm --n 6 --random --seed 1 --verify
"""
from __future__ import annotations

import argparse
import asyncio
from dataclasses import asdict
import json
import logging
from pathlib import Path
import sys
from typing import Any, Sequence

from .catalog import CATALOG
from .const import DEFAULT_GAP_WARNING, DEFAULT_MAX_WORKERS, DEFAULT_REL_TOL, LOGGER
from .defect import DEFECT_METHODS, DefectReport
from .engine import Engine
from .errors import UnidefectError
from .families import family_metadata, sample_members, verify_family
from .fourier import defect_table_markdown, defect_table_tsv
from .matcore import TolerancePolicy
from .matrix_io import format_matrix_text, load_unitary, matrix_to_json, write_matrix
from .pcm import (
    pcm_check,
    pcm_from_vector,
    pcm_parameter_count,
    pcm_to_json,
    pcm_to_solution,
    random_pcm,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNCERTAIN = 2


def _print_json(data: Any) -> None:
    """Print a JSON document."""
    print(json.dumps(data, indent=2))


def _describe_report(name: str, report: DefectReport) -> str:
    """Return a one-line human-readable summary of a report."""
    line = (
        f"{name}: N={report.N} defect={report.defect} "
        f"isolated={str(report.isolated).lower()} bound_b={report.bound_b}"
    )
    if report.uncertain:
        line += f" UNCERTAIN candidates={list(report.candidate_defects)}"
    return line


def cmd_defect(args: argparse.Namespace) -> int:
    """Report the defect of a matrix from a file or the catalog."""
    engine = Engine(
        tolerance=TolerancePolicy(rel_tol=args.tol, gap_warning=args.gap_warning)
    )
    unitary = load_unitary(args.source)
    if args.method == "all":
        reports = engine.all_defects(unitary)
    else:
        reports = {args.method: engine.defect(unitary, args.method)}

    if args.json:
        _print_json({name: report.as_dict() for name, report in reports.items()})
    else:
        for name, report in reports.items():
            print(_describe_report(name, report))

    if any(report.uncertain for report in reports.values()):
        return EXIT_UNCERTAIN
    return EXIT_OK


def cmd_fourier_table(args: argparse.Namespace) -> int:
    """Print the defect table of Fourier matrices."""
    engine = Engine(max_workers=args.workers)
    rows = asyncio.run(engine.async_defect_table(args.max, numeric=args.numeric))
    if args.markdown:
        sys.stdout.write(defect_table_markdown(rows))
    else:
        sys.stdout.write(defect_table_tsv(rows))
    if any(row.uncertain for row in rows):
        return EXIT_UNCERTAIN
    return EXIT_OK


def cmd_family(args: argparse.Namespace) -> int:
    """Build, emit and verify a Fourier family."""
    engine = Engine()
    family = engine.family(args.p, args.k, args.construction)
    output: dict[str, Any] = {"family": family_metadata(family)}

    if args.emit_basis:
        directory = Path(args.emit_basis)
        directory.mkdir(parents=True, exist_ok=True)
        for index, element in enumerate(family.space.basis, start=1):
            write_matrix(directory / f"R_{index}.txt", element)
        output["basis_dir"] = str(directory)

    members = sample_members(family, args.sample, args.seed) if args.sample else []
    exit_code = EXIT_OK
    if args.verify:
        verification = verify_family(family, seed=args.seed)
        output["verification"] = {**verification.checks, "passed": verification.passed}
        if not verification.passed:
            exit_code = EXIT_ERROR

    if args.json:
        output["samples"] = [
            {"phi": phi.tolist(), "matrix": matrix_to_json(member.matrix)}
            for phi, member in members
        ]
        _print_json(output)
        return exit_code

    meta = output["family"]
    print(
        f"p={meta['p']} k={meta['k']} dim={meta['dim']} "
        f"construction={meta['construction']}"
    )
    for phi, member in members:
        print(f"# phi = {' '.join(f'{value:.17g}' for value in phi)}")
        sys.stdout.write(format_matrix_text(member.matrix))
    if args.verify:
        for check, passed in output["verification"].items():
            print(f"{check}: {'pass' if passed else 'FAIL'}")
    return exit_code


def cmd_pcm(args: argparse.Namespace) -> int:
    """Emit a parameter cycle matrix and the solution it yields."""
    count = pcm_parameter_count(args.n)
    if args.random:
        pcm = random_pcm(args.n, args.seed)
    else:
        pcm = pcm_from_vector(args.n, [0.0] * count)
    solution = pcm_to_solution(pcm)
    check = pcm_check(pcm) if args.verify else None

    if args.json:
        output: dict[str, Any] = {
            "parameter_count": count,
            "pcm": pcm_to_json(pcm),
            "solution": matrix_to_json(solution),
        }
        if check is not None:
            output["check"] = {**asdict(check), "passed": check.passed}
        _print_json(output)
    else:
        print(f"N={args.n} parameter_count={count}")
        print("# P")
        sys.stdout.write(format_matrix_text(pcm.materialized))
        print("# R = P F_N")
        sys.stdout.write(format_matrix_text(solution))
        if check is not None:
            print(
                f"residual={check.residual:.3e} "
                f"verify: {'pass' if check.passed else 'FAIL'}"
            )

    if check is not None and not check.passed:
        return EXIT_ERROR
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser."""
    parser = argparse.ArgumentParser(
        prog="unidefect",
        description="Defects of unitary matrices and Fourier Hadamard families",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Enable debug logging"
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    defect_parser = subparsers.add_parser("defect", help="Defect of a matrix")
    defect_parser.add_argument(
        "source",
        help=f"Matrix file (.txt or .json) or catalog name: s6, {', '.join(CATALOG)}",
    )
    defect_parser.add_argument(
        "--method", choices=["all", *sorted(DEFECT_METHODS)], default="M"
    )
    defect_parser.add_argument(
        "--tol", type=float, default=DEFAULT_REL_TOL, help="Relative rank tolerance"
    )
    defect_parser.add_argument(
        "--gap-warning",
        type=float,
        default=DEFAULT_GAP_WARNING,
        help="Singular value ratio below which a rank decision is uncertain",
    )
    defect_parser.add_argument("--json", action="store_true", help="Emit JSON")
    defect_parser.set_defaults(func=cmd_defect)

    table_parser = subparsers.add_parser("fourier-table", help="Fourier defect table")
    table_parser.add_argument("--max", type=int, required=True, help="Largest N")
    table_parser.add_argument(
        "--numeric", action="store_true", help="Also run the SVD engine"
    )
    table_parser.add_argument("--markdown", action="store_true", help="Emit Markdown")
    table_parser.add_argument("--workers", type=int, default=DEFAULT_MAX_WORKERS)
    table_parser.set_defaults(func=cmd_fourier_table)

    family_parser = subparsers.add_parser("family", help="Family around F_{p^k}")
    family_parser.add_argument("--p", type=int, required=True)
    family_parser.add_argument("--k", type=int, required=True)
    family_parser.add_argument(
        "--construction", choices=["direct", "pcm"], default="direct"
    )
    family_parser.add_argument("--emit-basis", metavar="DIR")
    family_parser.add_argument("--sample", type=int, default=0, metavar="M")
    family_parser.add_argument("--seed", type=int, default=0)
    family_parser.add_argument("--verify", action="store_true")
    family_parser.add_argument("--json", action="store_true", help="Emit JSON")
    family_parser.set_defaults(func=cmd_family)

    pcm_parser = subparsers.add_parser("pcm", help="Parameter cycle matrix")
    pcm_parser.add_argument("--n", type=int, required=True)
    pcm_parser.add_argument("--random", action="store_true")
    pcm_parser.add_argument("--seed", type=int, default=None)
    pcm_parser.add_argument("--verify", action="store_true")
    pcm_parser.add_argument("--json", action="store_true", help="Emit JSON")
    pcm_parser.set_defaults(func=cmd_pcm)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if args.command is None:
        parser.print_help()
        return EXIT_OK

    try:
        return int(args.func(args))
    except UnidefectError as err:
        LOGGER.debug("Command %s failed", args.command, exc_info=True)
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
