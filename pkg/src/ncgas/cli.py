"""``ncgas`` command line: figure data, solves, oracle comparisons and spectrum files.

Exit codes: 0 success, 2 domain or validation error, 3 solver failure,
4 tolerance breach in ``compare``.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings

from .errors import DomainError, NcgasError, SolverError
from .figures import FIGURE_IDS, build_figure
from .qpot3d import Geometry3D, observables_3d, solve_potentials_3d
from .spectrum import build_spectrum
from .sweep import parse_config, run_compare
from .thermo2d import classify_region, observables, solve_potentials, t0_entropy_per_M, t0_pressure_per_M2

EXIT_OK, EXIT_DOMAIN, EXIT_SOLVER, EXIT_TOLERANCE = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_DOMAIN, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _wants_json(out: str | None, fmt: str | None) -> bool:
    if fmt:
        return fmt == "json"
    return bool(out) and out.endswith(".json")


def cmd_figure(args) -> int:
    data = build_figure(args.id, beta=args.beta, n=args.n, points=args.points, G=args.G, M=args.M,
                        jobs=args.jobs)
    _emit(data.to_json() if _wants_json(args.out, args.format) else data.to_csv(), args.out)
    failed = sum(1 for row in data.rows if str(row[-1]).startswith("error"))
    if failed:
        print(f"{failed} row(s) failed; see the status column", file=sys.stderr)
    return EXIT_OK


def _finite(v):
    return v if isinstance(v, str) or math.isfinite(v) else None


def cmd_solve(args) -> int:
    if args.dimension == "2d":
        region = classify_region(args.nu, args.ell)
        c, w = solve_potentials(args.nu, args.ell)
        mu = c * args.M
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            obs = observables(args.M, args.beta, mu, w, "sommerfeld")
        result = {"dimension": 2, "region": region.value, "nu": args.nu, "ell": args.ell,
                  "M": args.M, "beta": args.beta, "mu": mu, "mu_over_M": c, "omega": w,
                  "q": obs.q, "N": obs.N, "L_over_hbar": obs.L_over_hbar,
                  "S_over_k": obs.S_over_k, "P_tilde": obs.P_tilde,
                  "S_over_Mk_limit": t0_entropy_per_M(c, w, args.beta),
                  "P_over_M2_limit": t0_pressure_per_M2(c, w)}
    else:
        mu, w = solve_potentials_3d(args.nu, args.ell, args.G, args.M, args.beta)
        obs = observables_3d(args.M, args.beta, mu, w, args.G)
        geom = Geometry3D(args.M, args.G)
        result = {"dimension": 3, "nu": args.nu, "ell": args.ell, "G": args.G, "M": args.M,
                  "beta": args.beta, "mu": mu, "mu_over_M": mu / args.M, "omega": w,
                  "q": obs.q, "N": obs.N, "L_over_hbar": obs.L_over_hbar, "S_over_k": obs.S_over_k,
                  "E": obs.E, "PV": obs.PV, "P_over_E_density": obs.pressure_energy_ratio,
                  "V_tilde": geom.V_tilde, "rho_tilde": geom.rho_tilde(obs.N)}
    if args.json:
        print(json.dumps({k: _finite(v) for k, v in result.items()}, indent=1))
    else:
        width = max(map(len, result))
        for key, val in result.items():
            shown = f"{val:.10g}" if isinstance(val, float) else str(val)
            print(f"{key:<{width}}  {shown}")
    return EXIT_OK


def cmd_compare(args) -> int:
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        raise DomainError(f"cannot read config: {exc}") from None
    cfg = parse_config(text)
    report = run_compare(cfg)
    _emit(report.to_json() if cfg.format == "json" else report.to_csv(), cfg.output)
    if report.failed:
        print(f"{report.failed} grid point(s) failed", file=sys.stderr)
        return EXIT_SOLVER
    if report.breached:
        print(f"max relative deviation {report.max_deviation:.3g} exceeds tolerance {cfg.tolerance:g}",
              file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_spectrum(args) -> int:
    build_spectrum(args.M, args.mmax).to_csv(args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ncgas", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    fig = sub.add_parser("figure", help="write the data behind one figure")
    fig.add_argument("id", choices=FIGURE_IDS)
    fig.add_argument("--out", help="output file (default stdout); .json selects JSON")
    fig.add_argument("--format", choices=("csv", "json"))
    fig.add_argument("--beta", type=float, help="dimensionless inverse temperature")
    fig.add_argument("--n", type=float, help="particle number (f3b)")
    fig.add_argument("--points", type=int, help="grid size")
    fig.add_argument("--G", type=float, help="cylinder shape constant (f4a, f4b)")
    fig.add_argument("--M", type=int, help="system size (f4a, f4b)")
    fig.add_argument("--jobs", type=int, default=1, help="worker processes")
    fig.set_defaults(func=cmd_figure)

    solve = sub.add_parser("solve", help="solve for the potentials and print observables")
    solve.add_argument("dimension", choices=("2d", "3d"))
    solve.add_argument("--nu", type=float, required=True)
    solve.add_argument("--ell", type=float, required=True)
    solve.add_argument("--G", type=float, default=1.0)
    solve.add_argument("--M", type=int, required=True)
    solve.add_argument("--beta", type=float, required=True)
    solve.add_argument("--json", action="store_true")
    solve.set_defaults(func=cmd_solve)

    cmp_ = sub.add_parser("compare", help="compare evaluation paths over a grid")
    cmp_.add_argument("--config", required=True)
    cmp_.set_defaults(func=cmd_compare)

    spec = sub.add_parser("spectrum", help="write the exact single-particle levels to CSV")
    spec.add_argument("--M", type=int, required=True)
    spec.add_argument("--mmax", type=int, required=True)
    spec.add_argument("--out", required=True)
    spec.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NcgasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
