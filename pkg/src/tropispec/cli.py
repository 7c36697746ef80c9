"""Command-line front end.

Exit codes: 0 on success, 1 when a verified property fails or two
computations disagree, 2 on bad input.  Every report echoes the seed and
tolerance, and output depends only on the command line.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .errors import ConsistencyError, InputError, UnsupportedOperation
from .hadamard import CSV_FIELDS, EnsembleConfig, _int_range, ensemble_run
from .io import FORMAT_VERSION, csv_text, dumps, load_config, load_kernel, load_matrix, load_polynomial
from .kernels import radius_refinement
from .maxpoly import verify_lower_mapping, verify_point_mapping, verify_radius_mapping
from .spectral import analyze, approx_eigenvector, bonsall_radius, norm_root_sequence

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
DEFAULT_GRIDS = "16,32,64,128"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--tol", type=float, default=1e-9, help="residual tolerance (default 1e-9)")
    common.add_argument("--format", choices=("json", "csv"), default=None, help="output format")

    parser = _Parser(prog="tropispec", description="Spectral analysis of max-times matrices and kernels.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("radius", parents=[common], help="cone spectral radius with certificate")
    p.add_argument("--input", required=True, help="matrix JSON file")

    p = sub.add_parser("spectrum", parents=[common], help="full spectral report")
    p.add_argument("--input", required=True, help="matrix JSON file")
    p.add_argument("--grid-points", type=int, default=21, help="residual scan points (default 21)")

    p = sub.add_parser("maxpoly", parents=[common], help="spectral mapping checks for a maxpolynomial")
    p.add_argument("--input", required=True, help="matrix JSON file")
    p.add_argument("--poly", required=True, help='coefficients "a0,a1,..." or a polynomial JSON file')

    p = sub.add_parser("hadamard", parents=[common], help="randomised Hadamard inequality suite")
    p.add_argument("--input", help="ensemble config JSON (flags override it)")
    p.add_argument("--trials", type=int, help="number of instances (default 500)")
    p.add_argument("--dims", help='matrix size range "lo-hi" (default 1-6)')
    p.add_argument("--degree", help='polynomial degree range "lo-hi" (default 0-3)')

    p = sub.add_parser("kernel", parents=[common], help="grid refinement table for a band kernel")
    p.add_argument("--input", required=True, help="kernel spec JSON file")
    p.add_argument("--grids", default=DEFAULT_GRIDS, help=f'grid sizes "N1,N2,..." (default {DEFAULT_GRIDS})')

    p = sub.add_parser("approx-eig", parents=[common], help="constructive approximate eigenvector")
    p.add_argument("--input", required=True, help="matrix JSON file")
    p.add_argument("--eps", type=float, default=0.1, help="residual bound in (0, 1) (default 0.1)")
    return parser


def _header(args) -> dict:
    return {"format": FORMAT_VERSION, "command": args.command, "seed": args.seed, "tol": args.tol}


def _kv_rows(body: dict):
    """Flatten scalar fields of a report into ``key,value`` rows."""
    for k, v in body.items():
        if isinstance(v, (int, float, str, bool, np.floating)) or v is None:
            yield [k, v]


def _emit(args, body: dict, fields=None, rows=None, default="json") -> str:
    fmt = args.format or default
    if fmt == "json":
        return dumps({**_header(args), **body})
    head = {k: v for k, v in _header(args).items() if k != "format"}
    if fields is None:
        fields, rows = ("key", "value"), list(_kv_rows(body))
    return csv_text(head, fields, rows).rstrip("\n")


def cmd_radius(args):
    A = load_matrix(args.input)
    r, cert = bonsall_radius(A)
    seq = norm_root_sequence(A, 20)
    body = {
        "semiring": A.semiring.value,
        "r": r,
        "certificate": cert.to_json() if cert else None,
        "norm_root_sequence": seq,
    }
    return EXIT_OK, _emit(args, body, ("k", "norm_root"), [[k, v] for k, v in enumerate(seq)])


def cmd_spectrum(args):
    A = load_matrix(args.input)
    if args.grid_points < 2:
        raise InputError("--grid-points must be at least 2")
    if not args.tol > 0:
        raise InputError("--tol must be positive")
    report = analyze(A, grid_points=args.grid_points, tol=args.tol, seed=args.seed)
    body = report.to_json()
    rows = [[p["s"], p["rho"], p["member"]] for p in body["scan"]]
    return EXIT_OK, _emit(args, body, ("s", "rho", "member"), rows)


def cmd_maxpoly(args):
    A = load_matrix(args.input)
    q = load_polynomial(args.poly)
    radius = verify_radius_mapping(A, q)
    lower = verify_lower_mapping(A, q)
    point = verify_point_mapping(A, q)
    ok = radius.passed and lower.passed and point.passed
    body = {
        "poly": q.to_json()["coeffs"],
        "radius": radius._asdict(),
        "lower": lower._asdict(),
        "point": point.to_json(),
        "passed": ok,
    }
    rows = [
        ["radius", radius.lhs, radius.rhs, radius.passed],
        ["lower", lower.lhs, lower.rhs, lower.passed],
        ["point", point.slack, 0.0, point.passed],
    ]
    return (EXIT_OK if ok else EXIT_FAIL), _emit(args, body, ("check", "lhs", "rhs", "passed"), rows)


def cmd_hadamard(args):
    cfg = load_config(args.input).to_json() if args.input else {}
    if args.trials is not None:
        cfg["trials"] = args.trials
    if args.dims is not None:
        cfg["dims"] = _int_range(args.dims, "--dims")
    if args.degree is not None:
        cfg["degree_range"] = _int_range(args.degree, "--degree")
    cfg["seed"] = args.seed
    config = EnsembleConfig(**cfg)
    reports = ensemble_run(config)
    ok = all(r.passed for r in reports)
    body = {"config": config.to_json(), "reports": [r.summary() for r in reports], "passed": ok}
    rows = [[row.seed, row.id, row.lhs, row.rhs, row.slack] for r in reports for row in r.rows]
    return (EXIT_OK if ok else EXIT_FAIL), _emit(args, body, CSV_FIELDS, rows)


def cmd_kernel(args):
    spec = load_kernel(args.input)
    try:
        grids = [int(g) for g in args.grids.split(",") if g.strip()]
    except ValueError:
        raise InputError(f"cannot parse --grids {args.grids!r}") from None
    table = radius_refinement(spec, grids)
    ok = all(row.d <= row.r * (1 + 1e-9) for row in table)
    body = {
        "spec": spec.to_json(),
        "table": [{"N": t.N, "r": t.r, "d": t.d, "dr": t.dr, "dd": t.dd} for t in table],
        "passed": ok,
    }
    rows = [[t.N, t.r, t.d, t.dr, t.dd] for t in table]
    return (EXIT_OK if ok else EXIT_FAIL), _emit(args, body, ("N", "r", "d", "dr", "dd"), rows, default="csv")


def cmd_approx_eig(args):
    A = load_matrix(args.input)
    res = approx_eigenvector(A, args.eps, seed=args.seed)
    body = res.to_json()
    rows = [[i, v] for i, v in enumerate(res.vector.tolist())]
    return EXIT_OK, _emit(args, body, ("index", "value"), rows)


COMMANDS = {
    "radius": cmd_radius,
    "spectrum": cmd_spectrum,
    "maxpoly": cmd_maxpoly,
    "hadamard": cmd_hadamard,
    "kernel": cmd_kernel,
    "approx-eig": cmd_approx_eig,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code, text = COMMANDS[args.command](args)
    except (InputError, UnsupportedOperation) as exc:
        print(f"tropispec: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConsistencyError as exc:
        print(f"tropispec: consistency failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
