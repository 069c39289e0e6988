"""
Command-line entry point.

Exit codes: 0 success, 1 usage or I/O error, 2 recovery failure.
"""

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .adc import SrAdcConfig, fold_samples
from .errors import UnlimitedSamplingError
from .harness import (
    SWEEP_AXES,
    ExperimentConfig,
    emit_report,
    fmt,
    run_experiment,
    sweep,
    write_sweep,
)
from .recovery import RecoveryParams, unfold
from .signals import CRITICAL_PERIOD, SamplingGrid, generate_random, sample

EXIT_OK, EXIT_USAGE, EXIT_RECOVERY = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for recovery failure
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _order(text):
    if text == "auto":
        return "auto"
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {text!r}")
    if n < 0:
        raise argparse.ArgumentTypeError("order must be >= 0")
    return n


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _read_columns(path):
    fh = sys.stdin if str(path) == "-" else open(path, newline="")
    with fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise UnlimitedSamplingError(f"{path}: no data rows")
    return {k: np.array([float(r[k]) for r in rows]) for k in rows[0]}


def _write_columns(path, cols: dict):
    keys = list(cols)
    n = len(cols[keys[0]])
    fh = sys.stdout if path is None else open(path, "w", newline="")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(keys)
        for i in range(n):
            w.writerow([int(cols[k][i]) if k == "k" else fmt(cols[k][i]) for k in keys])
    finally:
        if path is not None:
            fh.close()


def _add_common(p, *, lam=False, rate=False, beta=False, order=False, seed=False):
    if lam:
        p.add_argument("--lambda", dest="lam", type=float, default=0.05,
                       help="ADC threshold (default 0.05)")
    if rate:
        p.add_argument("--oversample", type=float, default=1.0,
                       help="T = 1/(2*pi*e*oversample) (default 1)")
        p.add_argument("--allow-fast-rate", action="store_true",
                       help="accept oversample < 1 (no recovery guarantee)")
    if beta:
        p.add_argument("--beta", type=float, default=1.0,
                       help="amplitude bound beta_g, a multiple of 2*lambda (default 1)")
    if order:
        p.add_argument("--order", type=_order, default="auto",
                       help="difference order N or 'auto' (default auto)")
    if seed:
        p.add_argument("--seed", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="unlimited-sampling", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="random bandlimited signal -> samples CSV (k,t,gamma)")
    _add_common(p, rate=True, beta=True, seed=True)
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--terms", type=int, default=32)
    p.add_argument("--out", help="output CSV (default stdout)")

    p = sub.add_parser("fold", help="fold the gamma column of a CSV -> adds column y")
    p.add_argument("input", help="CSV with a gamma column ('-' for stdin)")
    _add_common(p, lam=True, seed=True)
    p.add_argument("--noise", type=float, default=0.0, help="uniform noise half-width")
    p.add_argument("--out", help="output CSV (default stdout)")

    p = sub.add_parser("recover", help="unfold the y column of a CSV")
    p.add_argument("input", help="CSV with a y column ('-' for stdin)")
    _add_common(p, lam=True, rate=True, beta=True, order=True)
    p.add_argument("--noise", type=float, default=0.0,
                   help="known noise bound; widens the consistency checks")
    p.add_argument("--out", help="output CSV with gamma_rec, eps_rec (default: none)")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="format of the report printed to stdout")

    p = sub.add_parser("experiment", help="generate, fold, recover and score one signal")
    p.add_argument("--config", help="JSON config (ExperimentConfig field names)")
    _add_common(p, lam=True, rate=True, beta=True, order=True, seed=True)
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--terms", type=int, default=32)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--out", help="output directory for samples.csv / result.json")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--record-runtime", action="store_true",
                   help="write runtime_ms to result files (breaks byte-identity)")

    p = sub.add_parser("sweep", help="success rate over one parameter axis")
    p.add_argument("--config", help="JSON base config")
    _add_common(p, lam=True, rate=True, beta=True, order=True, seed=True)
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--terms", type=int, default=32)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--axis", choices=SWEEP_AXES, required=True)
    p.add_argument("--values", type=_floats, required=True, help="comma-separated axis values")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output directory for sweep.csv")
    return parser


def _experiment_config(args) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.from_json(args.config)
        if args.out:
            cfg = replace(cfg, output_dir=args.out)
        return cfg
    return ExperimentConfig(
        seed=args.seed, lam=args.lam, oversample_factor=args.oversample, beta_g=args.beta,
        N=args.order, K=args.samples, M=args.terms, noise_amplitude=args.noise,
        output_dir=getattr(args, "out", None), allow_fast_rate=args.allow_fast_rate,
    )


def cmd_generate(args):
    grid = SamplingGrid(CRITICAL_PERIOD / args.oversample, args.samples)
    g = generate_random(args.seed, args.terms, args.beta)
    _write_columns(args.out, {"k": np.arange(1, grid.K + 1), "t": grid.times, "gamma": sample(g, grid)})
    return EXIT_OK


def cmd_fold(args):
    cols = _read_columns(args.input)
    if "gamma" not in cols:
        raise UnlimitedSamplingError("input CSV has no 'gamma' column")
    cols["y"] = fold_samples(cols["gamma"], SrAdcConfig(args.lam, args.noise, seed=args.seed))
    _write_columns(args.out, cols)
    return EXIT_OK


def cmd_recover(args):
    cols = _read_columns(args.input)
    if "y" not in cols:
        raise UnlimitedSamplingError("input CSV has no 'y' column")
    T = CRITICAL_PERIOD / args.oversample
    N = None if args.order == "auto" else args.order
    params = RecoveryParams(args.lam, T, args.beta, N=N,
                            allow_fast_rate=args.allow_fast_rate,
                            allow_unguaranteed=N is not None,
                            noise_bound=args.noise)
    report = unfold(cols["y"], params)
    if args.out:
        y = cols["y"]
        out = {"k": cols.get("k", np.arange(1, y.size + 1))}
        if "t" in cols:
            out["t"] = cols["t"]
        out.update(y=y, gamma_rec=report.gamma, eps_rec=report.eps.values)
        _write_columns(args.out, out)
    summary = {
        "success": report.success,
        "N_used": params.N,
        "J_used": params.J,
        "kappa": report.kappa,
        "guaranteed": report.guaranteed,
        "kappa_margin": report.kappa_margin,
        "max_rounding": report.max_rounding,
        "failure_reasons": report.failure_reasons,
    }
    if args.format == "json":
        print(json.dumps(summary, indent=2))
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(list(summary))
        w.writerow([" ".join(map(str, v)) if isinstance(v, list) else v for v in summary.values()])
    return EXIT_OK if report.success else EXIT_RECOVERY


def cmd_experiment(args):
    cfg = _experiment_config(args)
    if args.record_runtime:
        cfg = replace(cfg, record_runtime=True)
    result = run_experiment(cfg)
    if cfg.output_dir and args.format == "csv":
        emit_report(result, "csv", Path(cfg.output_dir) / "result.csv",
                    include_runtime=cfg.record_runtime)
    if args.format == "json":
        print(json.dumps(result.to_dict(), indent=2))
    else:
        d = result.to_dict()
        print(",".join(d))
        print(",".join(" ".join(map(str, v)) if isinstance(v, list) else str(v) for v in d.values()))
    return EXIT_OK if result.success else EXIT_RECOVERY


def cmd_sweep(args):
    base = _experiment_config(args)
    rows = sweep(base, args.axis, args.values, args.trials, workers=args.workers)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        write_sweep(rows, Path(args.out) / "sweep.csv")
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["axis", "value", "trials", "successes", "success_rate", "flagged", "undetected"])
    for r in rows:
        w.writerow([r["axis"], r["value"], r["trials"], r["successes"],
                    f"{r['success_rate']:.3f}", r["flagged"], r["undetected"]])
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "fold": cmd_fold,
    "recover": cmd_recover,
    "experiment": cmd_experiment,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UnlimitedSamplingError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
