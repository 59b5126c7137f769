"""Command-line front end: one subcommand per study, CSV/JSON outputs and a run manifest.

Exit codes: 0 success, 2 usage/domain error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .errors import NumericError, UsageError
from .tabular import _plain, dumps

OUTPUT_ENV = "CRITLINE_OUTPUT_DIR"
EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class _Run:
    """Collects written files and tolerances for the manifest."""

    def __init__(self, args):
        self.args = args
        self.out_dir = Path(args.out_dir or os.environ.get(OUTPUT_ENV) or ".")
        self.outputs: list[str] = []
        self.tolerances: dict[str, float] = {}

    def path(self, name: str | None) -> Path | None:
        if name is None:
            return None
        p = Path(name)
        return p if p.is_absolute() else self.out_dir / p

    def wrote(self, p) -> None:
        self.outputs.append(str(p))

    def manifest(self) -> Path:
        params = {k: v for k, v in vars(self.args).items() if k not in ("func", "json")}
        doc = {
            "command": self.args.command,
            "parameters": params,
            "versions": {
                "critline": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
            },
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
            "outputs": sorted(self.outputs),
            "tolerances": self.tolerances,
        }
        p = self.out_dir / f"{self.args.command}.manifest.json"
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(dumps(doc) + "\n")
        return p


# --- subcommands -------------------------------------------------------------------


def _z_eval(run: _Run) -> dict:
    from .zeta_eval import ORACLE_ERROR, z_oracle, z_rs

    a = run.args
    sample = z_rs(a.t) if a.method == "rs" else z_oracle(a.t)
    run.tolerances["err_bound"] = sample.err_bound
    run.tolerances["oracle_error"] = ORACLE_ERROR
    return {"t": sample.t, "z": sample.z_value, "method": sample.method, "err_bound": sample.err_bound}


def _zeros(run: _Run) -> dict:
    from .zeros import BRACKET_WIDTH, RESIDUAL_TARGET, export_zeros_csv, scan_zeros

    a = run.args
    recs = scan_zeros(a.t_lo, a.t_hi, threads=a.threads)
    run.tolerances.update(residual_target=RESIDUAL_TARGET, bracket_width=BRACKET_WIDTH)
    if a.csv:
        run.wrote(export_zeros_csv(recs, run.path(a.csv)))
    return {"count": len(recs), "zeros": [r.gamma for r in recs],
            "max_residual": max((r.residual for r in recs), default=0.0)}


def _lehmer(run: _Run) -> dict:
    from .tabular import write_csv
    from .zeros import lehmer_scan

    a = run.args
    events = lehmer_scan(a.t_lo, a.t_hi, threshold=a.threshold, step=a.step, threads=a.threads)
    run.tolerances["threshold"] = a.threshold
    if a.csv:
        rows = [(e.t_ext, e.z_ext, e.kind.value, e.closeness) for e in events]
        run.wrote(write_csv(run.path(a.csv), ["t", "z", "kind", "closeness"], rows))
    return {"events": [{"t": e.t_ext, "z": e.z_ext, "kind": e.kind.value,
                        "gap_pair": e.gap_pair, "closeness": e.closeness} for e in events]}


def _dh_search(run: _Run) -> dict:
    from .davenport_heilbronn import RESIDUAL_TARGET, export_strip_zeros_csv, search_rectangle

    a = run.args
    rep = search_rectangle((a.sigma_lo, a.sigma_hi, a.t_lo, a.t_hi))
    run.tolerances["residual_target"] = RESIDUAL_TARGET
    if a.csv:
        run.wrote(export_strip_zeros_csv(rep.zeros, run.path(a.csv)))
    return {"zeros": [{"beta": z.beta, "gamma": z.gamma, "residual": z.residual, "on_line": z.on_line}
                      for z in rep.zeros], "diagnostics": rep.diagnostics}


def _conv_residual(run: _Run) -> dict:
    from .convolution import smoothing_residual_study
    from .gelfand_shilov import ConvolutionKernelSpec, make_test_function

    a = run.args
    spec = ConvolutionKernelSpec.build(make_test_function(a.a, a.b), a.delta, a.T)
    prof = smoothing_residual_study(a.T, a.points, spec)
    if a.csv:
        csv_path = run.path(a.csv)
        for p in prof.export(csv_path, csv_path.with_suffix(".json")):
            run.wrote(p)
    run.tolerances["quadrature_err_over_G"] = prof.quadrature_err
    return prof.summary()


def _conv_l1(run: _Run) -> dict:
    from .convolution import weighted_l1_bound
    from .gelfand_shilov import ConvolutionKernelSpec, make_test_function

    a = run.args
    spec = ConvolutionKernelSpec.build(make_test_function(a.a, a.b), a.delta, a.T)
    r = weighted_l1_bound(a.T, a.V, spec)
    return {"lhs": r.lhs, "rhs": r.rhs, "ratio": r.ratio, "L": r.L,
            "error_terms": r.error_terms, "in_proven_range": r.in_proven_range}


def _moment2(run: _Run) -> dict:
    from .moments import export_moments_csv, second_moment

    a = run.args
    rec = second_moment(a.T)
    if a.csv:
        run.wrote(export_moments_csv([rec], run.path(a.csv)))
    run.tolerances["halving_change"] = rec.halving_change
    return {"T": rec.T, "integral": rec.integral, "main_term": rec.main_term, "e_term": rec.e_term}


def _mu_curves(run: _Run) -> dict:
    from .moments import MuVariant, convexity_report, export_mu_csv, mu_curve

    a = run.args
    if a.csv:
        run.wrote(export_mu_csv(run.path(a.csv)))
    reports = convexity_report()
    return {
        "mu_at_half": {v.value: float(mu_curve(v, 0.5)) for v in MuVariant},
        "checks": {r.variant.value: {"convex": r.convex, "nonincreasing": r.nonincreasing,
                                     "functional_equation": r.functional_equation} for r in reports},
    }


def _mertens(run: _Run) -> dict:
    from .arithmetic import mertens_power_bound, export_mertens_csv, mobius_sieve

    a = run.args
    table = mobius_sieve(a.N)
    if a.csv:
        run.wrote(export_mertens_csv(table, run.path(a.csv)))
    return {"N": a.N, "M": int(table.M[a.N]), "k": a.k, "bound_holds": mertens_power_bound(a.N, a.k, table)}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="critline", description=__doc__.splitlines()[0])
    p.add_argument("--json", action="store_true", help="print a JSON summary")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--seed", type=int, default=42, help="seed for any randomised grid choice")
    p.add_argument("--out-dir", default=None, help=f"output directory (env {OUTPUT_ENV})")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("z-eval", help="Z(t) by the oracle or Riemann-Siegel")
    s.add_argument("t", type=float)
    s.add_argument("--method", choices=["rs", "oracle"], default="oracle")
    s.set_defaults(func=_z_eval)

    s = sub.add_parser("zeros", help="zeros of Z on [t_lo, t_hi]")
    s.add_argument("t_lo", type=float)
    s.add_argument("t_hi", type=float)
    s.add_argument("--csv")
    s.set_defaults(func=_zeros)

    s = sub.add_parser("lehmer", help="close pairs and sign-preserving extrema")
    s.add_argument("t_lo", type=float)
    s.add_argument("t_hi", type=float)
    s.add_argument("--threshold", type=float, default=0.0005)
    s.add_argument("--step", type=float, default=0.005)
    s.add_argument("--csv")
    s.set_defaults(func=_lehmer)

    s = sub.add_parser("dh-search", help="zeros of the Davenport-Heilbronn function in a rectangle")
    for name in ("sigma_lo", "sigma_hi", "t_lo", "t_hi"):
        s.add_argument(name, type=float)
    s.add_argument("--csv")
    s.set_defaults(func=_dh_search)

    s = sub.add_parser("conv-residual", help="M/G - Z residual profile around T")
    s.add_argument("T", type=float)
    s.add_argument("--delta", type=float, default=1.0)
    s.add_argument("--points", type=int, default=200)
    s.add_argument("--a", type=float, default=1.0, help="bump support radius")
    s.add_argument("--b", type=float, default=2.5, help="plateau half-width")
    s.add_argument("--csv")
    s.set_defaults(func=_conv_residual)

    s = sub.add_parser("conv-l1", help="weighted L1 lower bound for M")
    s.add_argument("T", type=float)
    s.add_argument("V", type=float)
    s.add_argument("--delta", type=float, default=1.0)
    s.add_argument("--a", type=float, default=1.0)
    s.add_argument("--b", type=float, default=2.5)
    s.set_defaults(func=_conv_l1)

    s = sub.add_parser("moment2", help="mean square of zeta up to T")
    s.add_argument("T", type=float)
    s.add_argument("--csv")
    s.set_defaults(func=_moment2)

    s = sub.add_parser("mu-curves", help="candidate mu(sigma) curves")
    s.add_argument("--csv")
    s.set_defaults(func=_mu_curves)

    s = sub.add_parser("mertens", help="Moebius sieve, M(N) and the M(N)^2k <= N^(k+1) check")
    s.add_argument("N", type=int)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--csv")
    s.set_defaults(func=_mertens)
    return p


def _print_text(result: dict) -> None:
    for key, value in result.items():
        if isinstance(value, (list, dict)):
            value = json.dumps(_plain(value))
        print(f"{key}: {value}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad usage, 0 on --help
        return int(exc.code or 0)
    run = _Run(args)
    try:
        result = args.func(run)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    finally:
        run.manifest()
    if args.json:
        print(dumps(result))
    else:
        _print_text(result)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
