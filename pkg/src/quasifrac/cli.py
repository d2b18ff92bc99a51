"""Command-line front end.

Exit codes: 0 success, 1 bad input or arguments, 2 failed certificate,
3 numerical failure.  Results go to standard output unless ``--out`` names a
file; ``certify`` appends its row to that file.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from typing import Sequence

import numpy as np

from . import asymptotic, exppoly, rootlocus, semiblind
from .csvio import read_columns, read_matrix, write_rows
from .errors import InvalidInput, NumericalFailure
from .fracsum import K_MAX, eval_deriv_scaled, eval_f, new_params, tau_bounds

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAIL = 2
EXIT_NUMERIC = 3

DEFAULT_K_LIST = (1, 2, 5, 10, 20, 50, 100, 200, 300)

SUBCOMMANDS = {
    "minimize": "global minimizer of F for a c,d file; prints x_star,f_star",
    "scan": "CSV x,F on a uniform grid over [0, x_max]",
    "derivative": "CSV x,Fk_scaled: F^(k)/(2 k!) on a grid over [0, x_max]",
    "certify": "unimodality certificate row; exit 2 if it fails",
    "converge": "CSV k,sup_err: sup |G_k - G_inf| on [tau_min, tau_max]",
    "zeros": "number of zeros of G_inf in the adaptive rectangle",
    "exppoly": "positive zero of the exponential polynomial in an a,b,alpha file",
    "mse": "optimal weighting lambda* and MSE* for an a,d file (or a Q matrix with --m-matrix)",
    "mse-scan": "CSV gamma,lambda_star,mse_star over --gamma-list",
}


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default, which is reserved for failed certificates
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0.0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _grid(text: str) -> int:
    v = int(text)
    if v < 10:
        raise argparse.ArgumentTypeError(f"must be at least 10, got {text}")
    return v


def _order(text: str) -> int:
    v = int(text)
    if not 0 <= v <= K_MAX:
        raise argparse.ArgumentTypeError(f"must be in [0, {K_MAX}], got {text}")
    return v


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=rootlocus.DEFAULT_TOL,
                        help="relative bisection tolerance (default 1e-10)")
    common.add_argument("--grid", type=_grid, default=rootlocus.CERTIFY_GRID,
                        help="grid points for scans and certificates (default 100000)")
    common.add_argument("--k", type=_order, default=1, help="derivative order (default 1)")
    common.add_argument("--gamma", type=_positive_float, default=1.0,
                        help="training ratio gamma for mse (default 1)")
    common.add_argument("--gamma-list", type=_float_list, default=None,
                        help="comma-separated gammas for mse-scan")
    common.add_argument("--k-list", type=_int_list, default=list(DEFAULT_K_LIST),
                        help="comma-separated orders for converge (default 1,2,5,...,300)")
    common.add_argument("--x-max", type=_positive_float, default=None,
                        help="right end of scans (default 10 tau_max, 10 k tau_max for derivative)")
    common.add_argument("--m-matrix", default=None,
                        help="for mse: treat INPUT as the Q matrix and read M from this file")
    common.add_argument("--out", default=None, help="output file (default standard output)")

    parser = _Parser(
        prog="quasifrac",
        description="Minimize sums of quadratic fractions and check the supporting numerics. "
        "MSE values are reported with proportionality constant 1.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in SUBCOMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=text, description=text)
        sp.add_argument("input", help="input CSV file")
    return parser


def _fracsum(path):
    c, d = read_columns(path, ["c", "d"])
    return new_params(c, d)


def _spectral(args):
    if args.m_matrix is not None:
        pair = semiblind.HermitianPair(read_matrix(args.input), read_matrix(args.m_matrix), args.gamma)
        return semiblind.spectral_from_matrices(pair)
    a, d = read_columns(args.input, ["a", "d"])
    return semiblind.new_model(a, d, args.gamma)


def _grid_rows(xs, ys):
    return zip(xs.tolist(), np.asarray(ys).tolist())


def _run(args, out) -> int:
    cmd = args.command
    if cmd == "minimize":
        x, f = rootlocus.minimize(_fracsum(args.input), args.tol)
        write_rows(out, [(x, f)])
    elif cmd == "scan":
        p = _fracsum(args.input)
        x_max = args.x_max or rootlocus.default_x_max(p)
        xs = np.linspace(0.0, x_max, args.grid)
        write_rows(out, _grid_rows(xs, eval_f(p, xs)), ["x", "F"])
    elif cmd == "derivative":
        p = _fracsum(args.input)
        x_max = args.x_max or 10.0 * max(args.k, 1) * tau_bounds(p)[1]
        xs = np.linspace(0.0, x_max, args.grid)
        write_rows(out, _grid_rows(xs, eval_deriv_scaled(p, args.k, xs)), ["x", "Fk_scaled"])
    elif cmd == "certify":
        cert = rootlocus.certify_unimodal(_fracsum(args.input), args.tol, args.grid)
        write_rows(out, [cert.csv_row()])
        return EXIT_OK if cert.passed else EXIT_FAIL
    elif cmd == "converge":
        rows = asymptotic.convergence_report(_fracsum(args.input), args.k_list)
        write_rows(out, rows, ["k", "sup_err"])
    elif cmd == "zeros":
        zc = asymptotic.count_G_inf_zeros(_fracsum(args.input))
        write_rows(out, [(zc.count,)])
    elif cmd == "exppoly":
        a, b, alpha = read_columns(args.input, ["a", "b", "alpha"])
        write_rows(out, [(exppoly.find_unique_positive_zero(exppoly.new_exppoly(a, b, alpha), args.tol),)])
    elif cmd == "mse":
        write_rows(out, [semiblind.optimal_lambda(_spectral(args), args.tol)])
    elif cmd == "mse-scan":
        if args.gamma_list is None:
            raise InvalidInput("mse-scan needs --gamma-list")
        a, d = read_columns(args.input, ["a", "d"])
        rows = semiblind.training_tradeoff_scan(a, d, args.gamma_list, args.tol)
        write_rows(out, [(r.gamma, r.lambda_star, r.mse_star) for r in rows],
                   ["gamma", "lambda_star", "mse_star"])
    return EXIT_OK


def _warn_to_stderr(message, category, filename, lineno, file=None, line=None):
    sys.stderr.write(f"warning: {message}\n")


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings():
            warnings.showwarning = _warn_to_stderr
            if args.out is None:
                return _run(args, sys.stdout)
            mode = "a" if args.command == "certify" else "w"
            with open(args.out, mode, encoding="utf-8", newline="") as fh:
                return _run(args, fh)
    except InvalidInput as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except NumericalFailure as exc:
        sys.stderr.write(f"numerical failure: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC


__all__ = ["build_parser", "main"]
