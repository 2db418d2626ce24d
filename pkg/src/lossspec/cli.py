"""Command-line interface.

Subcommands: test (run specification tests on a CSV), gen (simulate a
sample to CSV), mc (Monte Carlo grids), are / are-table (efficiency
analysis), constants (kernel functionals). Exit status is 0 on success,
2 on data or argument errors, and 3 on numerical degeneracy.

Output is deterministic for fixed inputs and seed: reports carry no
timestamps outside the Monte Carlo report's metadata field.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .bootstrap import bootstrap_many
from .dgp import DELTA_SHAPES, DGPSpec, ERROR_DISTS, gen_sample
from .efficiency import CONVENTIONS, are_table, noncentrality_pair, pitman_are
from .exceptions import DataFormatError, DegenerateSampleError, QuadratureError
from .harness import (
    PRESETS,
    load_report,
    parse_config_text,
    persist_report,
    preset_config,
    run_experiment,
)
from .kernels import FAMILIES, kernel_constants, parse_kernel
from .loss import loss_curvature, parse_loss
from .smoothing import (
    Sample,
    nw_fit,
    parse_bandwidth,
    parse_ratio,
    resolve_bandwidth,
)
from .stats import (
    METHODS,
    TestSpec,
    asymptotic_calibration_glr,
    asymptotic_calibration_q,
    estimate_omega,
    glr_statistic,
    loss_statistic,
    ols_fit,
    ssr_floor,
)

GRAMMAR_HELP = """\
option grammars:
  kernel      uniform | epanechnikov | biweight | triweight
  bandwidth   fixed:<h> | rot:<omega> | cv:<c1>,<c2>,<grid>
              rates accept fractions, e.g. rot:2/9; examples: fixed:0.5,
              rot:2/9, cv:0.5,2,20
  loss        quadratic | tq:<c> | linex:<alpha>,<beta>
              examples: quadratic, tq:1.0, linex:1,1
  methods     loss_q | loss_q0 | glr | f (comma-separated list)
"""

DATA_HELP = """\
data format: CSV with header y,x1[,x2,x3], decimal floats, UTF-8.
Rows keep their file order (time-series order matters).
With --residuals, the header is resid,x1[,x2,x3] and the parametric
null fit is skipped; only asymptotic calibration is available then.
"""


def _read_table(path: str, first_col: str) -> tuple[np.ndarray, np.ndarray]:
    """Read a CSV of `first_col,x1..xp`; returns (first column, x matrix)."""
    try:
        fh = open(path, encoding="utf-8-sig", newline="")
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        names = [c.strip().lower() for c in header]
        p = len(names) - 1
        if p > 3:
            raise DataFormatError(
                f"{path}: {p} regressor columns; at most 3 are supported (p < 4)"
            )
        expected = [first_col] + [f"x{i}" for i in range(1, p + 1)]
        if names != expected or p < 1:
            raise DataFormatError(
                f"{path}: header must be {','.join([first_col, 'x1[,x2,x3]'])}, "
                f"got {','.join(names)}"
            )
        first, xs = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != p + 1:
                raise DataFormatError(
                    f"{path}: line {lineno} has {len(row)} cells, expected {p + 1}"
                )
            values = []
            for name, cell in zip(names, row):
                try:
                    value = float(cell)
                except ValueError:
                    raise DataFormatError(
                        f"{path}: line {lineno}, column {name}: "
                        f"cannot parse {cell.strip()!r} as a number"
                    ) from None
                if not math.isfinite(value):
                    raise DataFormatError(
                        f"{path}: line {lineno}, column {name}: non-finite value"
                    )
                values.append(value)
            first.append(values[0])
            xs.append(values[1:])
    if not first:
        raise DataFormatError(f"{path}: no data rows")
    return np.asarray(first), np.asarray(xs)


def parse_data(path: str) -> Sample:
    """Read a response-plus-regressors CSV into a validated Sample."""
    y, x = _read_table(path, "y")
    return Sample(y=y, x=x)


def parse_residuals(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Read a precomputed-residuals CSV: header resid,x1[,x2,x3]."""
    return _read_table(path, "resid")


def _write_output(body: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)


def _json_body(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _build_tests(methods_text: str, loss_texts: Sequence[str]) -> list[TestSpec]:
    methods = [m.strip().lower() for m in methods_text.split(",") if m.strip()]
    if not methods:
        raise DataFormatError("no methods requested")
    losses = [parse_loss(t) for t in (loss_texts or ["quadratic"])]
    tests: list[TestSpec] = []
    for method in methods:
        if method not in METHODS:
            raise DataFormatError(
                f"unknown method {method!r}; choose from {', '.join(METHODS)}"
            )
        if method in ("loss_q", "loss_q0"):
            tests.extend(TestSpec(method, loss) for loss in losses)
        else:
            tests.append(TestSpec(method))
    return tests


def _cmd_test(args: argparse.Namespace) -> int:
    kernel = parse_kernel(args.kernel)
    rule = parse_bandwidth(args.bandwidth)
    tests = _build_tests(args.methods, args.loss)

    results: list[dict] = []
    if args.residuals:
        if args.calibration == "bootstrap":
            raise DataFormatError(
                "bootstrap calibration needs the original response; "
                "--residuals supports --calibration asymptotic only"
            )
        resid, x = parse_residuals(args.residuals)
        if resid.shape[0] < 2 * (x.shape[1] + 1):
            raise DataFormatError("too few rows for the number of regressors")
        n, p = x.shape
        ssr0 = float(resid @ resid)
        bw = resolve_bandwidth(rule, resid, x, kernel)
        fit = nw_fit(resid, x, kernel, bw.h)
        source = {"residuals": args.residuals}
    else:
        sample = parse_data(args.data)
        n, p = sample.n, sample.p
        if args.calibration == "bootstrap":
            outcomes, bw = bootstrap_many(
                sample,
                kernel,
                rule,
                tests,
                b=args.bootstrap,
                mode=args.boot_mode,
                seed=args.seed,
            )
            for test, outcome in zip(tests, outcomes):
                results.append(
                    {
                        "method": test.method,
                        "loss": test.loss.label() if test.loss else None,
                        "statistic": outcome.observed,
                        "p_star": outcome.p_star,
                        "b": args.bootstrap,
                        "mode": args.boot_mode,
                    }
                )
            return _finish_test(args, results, bw.h, n, p, source={"data": args.data})
        null = ols_fit(sample)
        resid, ssr0 = null.residuals, null.ssr0
        x = sample.x
        bw = resolve_bandwidth(rule, resid, x, kernel)
        fit = nw_fit(resid, x, kernel, bw.h)
        if min(ssr0, fit.ssr1) <= float(ssr_floor(sample.y)):
            raise DegenerateSampleError(
                "the linear fit is numerically perfect; no variation is left to test"
            )
        source = {"data": args.data}

    omega = estimate_omega(x)
    constants = kernel_constants(kernel, p=x.shape[1])
    for test in tests:
        if test.method == "f":
            raise DataFormatError(
                "the f statistic has no asymptotic calibration; use bootstrap"
            )
        if test.method in ("loss_q", "loss_q0"):
            denominator = "ssr1" if test.method == "loss_q" else "ssr0"
            _, stat = loss_statistic(fit, test.loss, denominator, ssr0=ssr0)
            outcome = asymptotic_calibration_q(
                stat, constants, loss_curvature(test.loss), omega, bw.h, test.method
            )
        else:
            lam = glr_statistic(ssr0, fit.ssr1, resid.shape[0])
            outcome = asymptotic_calibration_glr(lam, constants, omega, bw.h)
        results.append(
            {
                "method": test.method,
                "loss": test.loss.label() if test.loss else None,
                "statistic": outcome.statistic,
                "centering": outcome.centering,
                "scaling": outcome.scaling,
                "z": outcome.z,
                "p_value": outcome.p_value,
                "omega_measure": omega,
            }
        )
    return _finish_test(args, results, bw.h, x.shape[0], x.shape[1], source)


def _finish_test(
    args: argparse.Namespace,
    results: list[dict],
    h: float,
    n: int,
    p: int,
    source: dict,
) -> int:
    doc = {
        "schema_version": 1,
        "command": "test",
        "kernel": args.kernel,
        "bandwidth_rule": args.bandwidth,
        "h": h,
        "n": n,
        "p": p,
        "calibration": args.calibration,
        "seed": args.seed,
        "source": source,
        "results": results,
    }
    if args.format == "json":
        _write_output(_json_body(doc), args.out)
        return 0
    lines = [
        f"n = {n}, p = {p}, kernel = {args.kernel}, h = {h!r} ({args.bandwidth})",
        f"calibration = {args.calibration}, seed = {args.seed}",
    ]
    for r in results:
        label = r["method"] + (f"[{r['loss']}]" if r.get("loss") else "")
        if "p_star" in r:
            lines.append(
                f"  {label}: statistic = {r['statistic']!r}, "
                f"p* = {r['p_star']!r} (b = {r['b']}, {r['mode']})"
            )
        else:
            lines.append(
                f"  {label}: statistic = {r['statistic']!r}, z = {r['z']!r}, "
                f"p = {r['p_value']!r}"
            )
    _write_output("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_gen(args: argparse.Namespace) -> int:
    spec = DGPSpec(
        model=args.dgp,
        n=args.n,
        seed=args.seed,
        error_dist=args.dist,
        theta=args.theta,
        delta_shape=args.shape,
        local_omega=parse_ratio(args.local_omega),
        truncation=args.truncation,
    )
    sample = gen_sample(spec)
    lines = ["y," + ",".join(f"x{i}" for i in range(1, sample.p + 1))]
    for i in range(sample.n):
        row = [repr(float(sample.y[i]))] + [
            repr(float(v)) for v in sample.x[i]
        ]
        lines.append(",".join(row))
    _write_output("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_constants(args: argparse.Namespace) -> int:
    kernel = parse_kernel(args.kernel)
    k = kernel_constants(kernel, p=args.dim, tol=args.tol)
    doc = {
        "kernel": kernel.family,
        "p": k.p,
        "tol": k.tol,
        "a": k.a,
        "b": k.b,
        "c": k.c,
        "d": k.d,
        "t": k.t,
    }
    if args.format == "json":
        _write_output(_json_body(doc), args.out)
    else:
        lines = [f"kernel = {kernel.family}, p = {k.p}, tol = {k.tol:g}"] + [
            f"  {name} = {getattr(k, name)!r}" for name in "abcdt"
        ]
        _write_output("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_are(args: argparse.Namespace) -> int:
    kernel = parse_kernel(args.kernel)
    omega = parse_ratio(args.omega)
    res = pitman_are(kernel, p=args.dim, omega=omega, convention=args.convention)
    doc = {
        "kernel": kernel.family,
        "p": res.p,
        "omega": res.omega,
        "convention": res.convention,
        "ratio": res.ratio,
        "exponent": res.exponent,
        "are": res.are,
    }
    if args.format == "json":
        _write_output(_json_body(doc), args.out)
    else:
        _write_output(
            f"kernel = {kernel.family}, p = {res.p}, omega = {res.omega:g}, "
            f"convention = {res.convention}\n"
            f"  ratio 4d/b = {res.ratio!r}\n"
            f"  ARE = ratio^{res.exponent!r} = {res.are!r}\n",
            args.out,
        )
    return 0


_CONVENTION_NOTE = (
    "note: the displayed efficiency formula implies exponent 1/(2 - p*omega) "
    "(eq52); the published table's scale matches exponent 2/(2 - p*omega) "
    "(table1). Both are reported; the discrepancy is documented, not resolved."
)


def _cmd_are_table(args: argparse.Namespace) -> int:
    omegas = tuple(parse_ratio(t) for t in args.omegas.split(","))
    rows = are_table(omegas)
    columns = list(rows[0].keys())
    if args.format == "csv":
        lines = ["# " + _CONVENTION_NOTE, ",".join(columns)]
        for row in rows:
            lines.append(
                ",".join(
                    repr(row[c]) if isinstance(row[c], float) else str(row[c])
                    for c in columns
                )
            )
        _write_output("\n".join(lines) + "\n", args.out)
        return 0
    widths = {c: max(len(c), 14) for c in columns}
    header = "  ".join(c.ljust(widths[c]) for c in columns)
    lines = [header]
    for row in rows:
        lines.append(
            "  ".join(
                (f"{row[c]:.6f}" if isinstance(row[c], float) else str(row[c])).ljust(
                    widths[c]
                )
                for c in columns
            )
        )
    lines.append(_CONVENTION_NOTE)
    _write_output("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_mc(args: argparse.Namespace) -> int:
    if bool(args.preset) == bool(args.config):
        raise DataFormatError("give exactly one of a preset name or --config <file>")
    knobs = {
        name: getattr(args, name)
        for name in ("reps", "seed", "n", "b")
        if getattr(args, name) is not None
    }
    if args.preset:
        config = preset_config(args.preset, **knobs)
    else:
        if knobs:
            # a config file is the complete experiment; overriding parts of it
            # here would leave the file lying about what ran
            raise DataFormatError(
                "--reps, --seed, --n, --b tune presets only; with --config set "
                "them in the file"
            )
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = parse_config_text(fh.read())
        except OSError as exc:
            raise DataFormatError(f"cannot read {args.config}: {exc}") from None
    report = run_experiment(config, jobs=args.jobs)
    if args.out:
        persist_report(report, args.out)
    sys.stdout.write(report.table_csv())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lossspec",
        description="Loss-function and likelihood-ratio specification tests "
        "for parametric regressions.",
        epilog=GRAMMAR_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_test = sub.add_parser(
        "test",
        help="run specification tests on a CSV data file",
        epilog=GRAMMAR_HELP + "\n" + DATA_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    src = p_test.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="CSV with header y,x1[,x2,x3]")
    src.add_argument(
        "--residuals",
        help="CSV with header resid,x1[,x2,x3]: precomputed null residuals "
        "(skips the built-in linear fit; asymptotic calibration only)",
    )
    p_test.add_argument("--kernel", default="uniform", help="kernel name (see grammars)")
    p_test.add_argument(
        "--bandwidth",
        default="rot:2/9",
        help="bandwidth rule: fixed:<h> | rot:<omega> | cv:<c1>,<c2>,<grid>",
    )
    p_test.add_argument(
        "--methods",
        default="loss_q,glr",
        help="comma list of statistics: loss_q, loss_q0, glr, f",
    )
    p_test.add_argument(
        "--loss",
        action="append",
        default=None,
        help="loss grammar (repeatable): quadratic | tq:<c> | linex:<alpha>,<beta>",
    )
    p_test.add_argument(
        "--calibration",
        choices=("bootstrap", "asymptotic"),
        default="bootstrap",
        help="p-value calibration (default bootstrap)",
    )
    p_test.add_argument(
        "--bootstrap", type=int, default=99, metavar="B", help="bootstrap replicates"
    )
    p_test.add_argument(
        "--boot-mode",
        choices=("conditional", "wild"),
        default="conditional",
        help="residual resampling scheme",
    )
    p_test.add_argument("--seed", type=int, default=0, help="64-bit seed")
    p_test.add_argument("--format", choices=("text", "json"), default="text")
    p_test.add_argument("--out", help="write output here instead of stdout")
    p_test.set_defaults(func=_cmd_test)

    p_gen = sub.add_parser("gen", help="simulate a sample and write it as CSV")
    p_gen.add_argument(
        "--dgp",
        default="s_null",
        help="model: s_null | p1 | p2 | p3 | local (long names accepted)",
    )
    p_gen.add_argument("--theta", type=float, default=0.0, help="alternative strength")
    p_gen.add_argument("--dist", default="normal", choices=ERROR_DISTS)
    p_gen.add_argument("--n", type=int, required=True, help="sample size")
    p_gen.add_argument("--seed", type=int, default=0, help="64-bit seed")
    p_gen.add_argument(
        "--shape",
        default="centered_quadratic",
        choices=DELTA_SHAPES,
        help="local-alternative shape",
    )
    p_gen.add_argument(
        "--local-omega", default="2/9", help="local-alternative bandwidth rate"
    )
    p_gen.add_argument("--truncation", default="clip", choices=("clip", "reject"))
    p_gen.add_argument("--out", help="output CSV path (default stdout)")
    p_gen.set_defaults(func=_cmd_gen)

    p_const = sub.add_parser("constants", help="kernel integral constants")
    p_const.add_argument("--kernel", required=True, help="kernel name")
    p_const.add_argument("--dim", type=int, default=1, help="product-kernel dimension")
    p_const.add_argument("--tol", type=float, default=1e-10, help="quadrature tolerance")
    p_const.add_argument("--format", choices=("text", "json"), default="text")
    p_const.add_argument("--out")
    p_const.set_defaults(func=_cmd_constants)

    p_are = sub.add_parser("are", help="Pitman relative efficiency of one kernel")
    p_are.add_argument("--kernel", required=True, help="kernel name")
    p_are.add_argument(
        "--omega", default="2/9", help="bandwidth rate (fractions accepted, e.g. 2/9)"
    )
    p_are.add_argument("--dim", type=int, default=1)
    p_are.add_argument("--convention", choices=CONVENTIONS, default="eq52")
    p_are.add_argument("--format", choices=("text", "json"), default="text")
    p_are.add_argument("--out")
    p_are.set_defaults(func=_cmd_are)

    p_aret = sub.add_parser(
        "are-table", help="efficiency table over the built-in kernels"
    )
    p_aret.add_argument(
        "--omegas", default="1/5,2/9", help="comma list of rates (fractions accepted)"
    )
    p_aret.add_argument("--format", choices=("text", "csv"), default="text")
    p_aret.add_argument("--out")
    p_aret.set_defaults(func=_cmd_are_table)

    p_mc = sub.add_parser(
        "mc",
        help="Monte Carlo size/power grids",
        epilog="presets: " + ", ".join(sorted(PRESETS)) + "\n" + GRAMMAR_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p_mc.add_argument(
        "preset",
        nargs="?",
        help="published-table grid preset (or use --config)",
    )
    p_mc.add_argument("--config", help="flat key-value experiment config file")
    p_mc.add_argument("--reps", type=int, help="Monte Carlo replications (presets)")
    p_mc.add_argument("--seed", type=int, help="master seed (presets)")
    p_mc.add_argument("--n", type=int, help="sample size (presets)")
    p_mc.add_argument("--b", type=int, help="bootstrap replicates (presets)")
    p_mc.add_argument("--jobs", type=int, default=1, help="worker processes")
    p_mc.add_argument("--out", help="write the JSON report here")
    p_mc.set_defaults(func=_cmd_mc)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateSampleError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
