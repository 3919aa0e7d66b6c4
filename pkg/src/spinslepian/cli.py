"""
Command-line front end.

Subcommands
-----------
build    assemble a basis and write a BasisFile
eval     evaluate Slepian functions of a BasisFile on a grid (GridFile)
shannon  print the Shannon number and entry count
verify   run the invariant suite on a fresh basis or a BasisFile

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .cap_concentration import PolarCap
from .field_assembly import (
    MIN_BANDLIMIT,
    assemble_ranked_basis,
    eval_grid_arrays,
    shannon_ranked,
    type_spins,
)
from .formats import SchemaError, read_basis, write_basis, write_grid
from .verification import verify_basis

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments; 2 is reserved for failed checks
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _alpha_list(text):
    try:
        values = [int(a) for a in text.split(",") if a.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid alpha list {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty alpha list")
    return values


def _grid_shape(text):
    try:
        n_lat, n_lon = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like NLATxNLON, got {text!r}")
    if n_lat < 2 or n_lon < 2:
        raise argparse.ArgumentTypeError("grid needs at least 2x2 cells")
    return n_lat, n_lon


def _add_basis_args(p, required=True):
    p.add_argument("--rank", choices=["scalar", "vector", "tensor", "spin"],
                   required=required)
    p.add_argument("--spin", type=int, help="spin weight N (only with --rank spin)")
    p.add_argument("--bandlimit", "-L", type=int, required=required)
    p.add_argument("--theta-deg", type=float, required=required,
                   help="cap radius in degrees, in (0, 180)")


def build_parser():
    parser = _Parser(prog="spinslep", description=__doc__.split("\n")[1],
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="assemble a basis and write it to a BasisFile")
    _add_basis_args(p)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("eval", help="evaluate Slepian functions on a grid")
    p.add_argument("basis", type=Path, help="BasisFile path")
    p.add_argument("--alpha", type=_alpha_list, required=True, help="A[,A...] (1-based)")
    p.add_argument("--grid", type=_grid_shape, default=(90, 180), help="NLATxNLON")
    p.add_argument("--out", required=True, type=Path,
                   help="output CSV; with several alphas '{alpha}' in the name is "
                        "replaced, otherwise '_alpha<A>' is appended to the stem")

    p = sub.add_parser("shannon", help="print the Shannon number")
    _add_basis_args(p)

    p = sub.add_parser("verify", help="run the invariant suite")
    _add_basis_args(p, required=False)
    p.add_argument("--basis", type=Path, help="verify a BasisFile instead of a fresh basis")
    p.add_argument("--deep", action="store_true",
                   help="add quadrature-based spatial orthogonality (L <= 8)")
    return parser


def _validate_basis_args(args):
    if args.rank is None or args.bandlimit is None or args.theta_deg is None:
        raise UsageError("--rank, --bandlimit and --theta-deg are required")
    if not 0.0 < args.theta_deg < 180.0:
        raise UsageError(f"--theta-deg must lie in (0, 180), got {args.theta_deg}")
    if (args.rank == "spin") != (args.spin is not None):
        raise UsageError("--spin is required with --rank spin and only allowed there")
    L = args.bandlimit
    if L < MIN_BANDLIMIT[args.rank]:
        raise UsageError(f"rank {args.rank} needs --bandlimit >= {MIN_BANDLIMIT[args.rank]}")
    if args.rank == "spin" and L < abs(args.spin):
        raise UsageError(f"--bandlimit {L} below |spin| = {abs(args.spin)}")
    return PolarCap.from_degrees(args.theta_deg)


def cmd_build(args):
    cap = _validate_basis_args(args)
    basis = assemble_ranked_basis(args.rank, args.bandlimit, cap, spin=args.spin)
    write_basis(basis, args.out)
    print(f"wrote {len(basis)} entries to {args.out}")
    return EXIT_OK


def _grid_path(template, alpha, several):
    text = str(template)
    if "{alpha}" in text:
        return Path(text.replace("{alpha}", str(alpha)))
    if several:
        return template.with_name(f"{template.stem}_alpha{alpha}{template.suffix}")
    return template


def cmd_eval(args):
    basis = read_basis(args.basis)
    for a in args.alpha:
        if not 1 <= a <= len(basis):
            raise UsageError(f"alpha {a} outside 1..{len(basis)}")
    n_lat, n_lon = args.grid
    several = len(args.alpha) > 1
    for a in args.alpha:
        lat, lon, values, norms = eval_grid_arrays(basis, a, n_lat, n_lon)
        path = _grid_path(args.out, a, several)
        write_grid(basis.rank, lat, lon, values, norms, path)
        print(f"alpha {a}: wrote {len(lat)} rows to {path}")
    return EXIT_OK


def cmd_shannon(args):
    cap = _validate_basis_args(args)
    S = shannon_ranked(args.rank, args.bandlimit, cap, args.spin)
    count = sum((args.bandlimit + 1) ** 2 - N * N
                for N in type_spins(args.rank, args.spin).values())
    print(f"Shannon number {S:.17g}, rounds to {round(S)}")
    print(f"entries {count}")
    return EXIT_OK


def cmd_verify(args):
    if args.basis is not None:
        basis = read_basis(args.basis)
    else:
        cap = _validate_basis_args(args)
        basis = assemble_ranked_basis(args.rank, args.bandlimit, cap, spin=args.spin)
    checks = verify_basis(basis, deep=args.deep)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    if failed:
        print(f"{len(failed)} of {len(checks)} checks failed", file=sys.stderr)
        for c in failed:
            print(f"failed invariant: {c.name}", file=sys.stderr)
        return EXIT_VERIFY
    print(f"all {len(checks)} checks passed")
    return EXIT_OK


COMMANDS = {"build": cmd_build, "eval": cmd_eval, "shannon": cmd_shannon,
            "verify": cmd_verify}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"spinslep: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchemaError as exc:
        print(f"spinslep: malformed basis file: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"spinslep: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
