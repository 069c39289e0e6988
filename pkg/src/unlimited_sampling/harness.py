"""
Experiment runner: generate -> sample -> fold -> unfold -> metrics.

Outputs are deterministic for a fixed config. The wall-clock runtime is
kept on the in-memory result; it is written to disk only when
``record_runtime`` is set, so artifacts stay byte-identical across runs.
"""

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

from .adc import SrAdcConfig, fold_samples
from .errors import ParameterError
from .recovery import RecoveryParams, choose_J, choose_N, unfold
from .signals import CRITICAL_PERIOD, SamplingGrid, generate_random, sample

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "run_experiment",
    "sweep",
    "emit_report",
    "SAMPLES_HEADER",
    "RESULT_KEYS",
    "SWEEP_HEADER",
    "SWEEP_AXES",
    "SUCCESS_TOL",
]

SUCCESS_TOL = 1e-9
SAMPLES_HEADER = ["k", "t", "gamma", "y", "eps", "gamma_rec", "eps_rec"]
RESULT_KEYS = ["mse", "max_abs_err", "success", "N_used", "J_used", "kappa", "runtime_ms"]
SWEEP_HEADER = ["axis", "value", "trials", "successes", "success_rate", "flagged", "undetected"]
SWEEP_AXES = ("lambda-ratio", "T", "N", "noise")


def fmt(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


@dataclass(frozen=True)
class ExperimentConfig:
    """
    One experiment. ``N`` is an int or ``"auto"``; the sampling period is
    ``CRITICAL_PERIOD / oversample_factor``. With ``output_dir=None`` nothing
    is written.
    """

    seed: int = 1
    lam: float = 0.05
    oversample_factor: float = 1.0
    beta_g: float = 1.0
    N: Union[int, str] = "auto"
    K: int = 512
    M: int = 32
    noise_amplitude: float = 0.0
    output_dir: Optional[str] = None
    allow_fast_rate: bool = False
    record_runtime: bool = False

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError(f"lambda must be positive, got {self.lam}")
        if not self.beta_g > 0:
            raise ParameterError(f"beta_g must be positive, got {self.beta_g}")
        if not self.oversample_factor > 0:
            raise ParameterError("oversample_factor must be positive")
        if self.oversample_factor < 1 and not self.allow_fast_rate:
            raise ParameterError(
                f"oversample_factor {self.oversample_factor} < 1 needs allow_fast_rate"
            )
        if self.N != "auto" and (isinstance(self.N, bool) or not isinstance(self.N, int) or self.N < 0):
            raise ParameterError(f"N must be a non-negative int or 'auto', got {self.N!r}")
        if self.K < 2 or self.M < 1:
            raise ParameterError("K must be >= 2 and M >= 1")

    @property
    def T(self) -> float:
        return CRITICAL_PERIOD / self.oversample_factor

    def resolved_N(self) -> int:
        if self.N == "auto":
            return choose_N(self.lam, self.beta_g, self.T)
        return int(self.N)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class ExperimentResult:
    mse: float
    max_abs_err: float
    success: bool
    N_used: int
    J_used: int
    kappa: List[int]
    runtime_ms: Optional[float]
    offset_multiple: int = 0
    recovery_flagged: bool = False
    guaranteed: bool = True
    failure_reasons: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentResult":
        return cls(**d)


def _align(diff: np.ndarray, lam: float) -> int:
    # the recovered samples are only defined up to one multiple of 2*lambda
    return int(np.round(np.mean(diff) / (2 * lam)))


def _write_samples(path: Path, times, gamma, y, eps, gamma_rec, eps_rec):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SAMPLES_HEADER)
        for k in range(len(times)):
            w.writerow([k + 1] + [fmt(v[k]) for v in (times, gamma, y, eps, gamma_rec, eps_rec)])


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run the full pipeline once. Files go to ``cfg.output_dir`` if set."""
    T = cfg.T
    grid = SamplingGrid(T, cfg.K)
    g = generate_random(cfg.seed, cfg.M, cfg.beta_g)
    gamma = sample(g, grid)
    adc = SrAdcConfig(cfg.lam, cfg.noise_amplitude, seed=[cfg.seed, 1])
    y = fold_samples(gamma, adc)
    adc_input = y + np.round((gamma - y) / (2 * cfg.lam)) * 2 * cfg.lam

    N = cfg.resolved_N()
    J = choose_J(cfg.lam, cfg.beta_g)
    params = RecoveryParams(
        cfg.lam, T, cfg.beta_g, N=N, J=J,
        allow_fast_rate=cfg.allow_fast_rate,
        allow_unguaranteed=cfg.N != "auto",
        noise_bound=cfg.noise_amplitude,
    )
    t0 = time.perf_counter()
    report = unfold(y, params)
    runtime_ms = 1e3 * (time.perf_counter() - t0)

    diff = report.gamma - gamma
    m = _align(diff, cfg.lam)
    err = diff - 2 * cfg.lam * m
    max_abs = float(np.max(np.abs(err)))
    result = ExperimentResult(
        mse=float(np.mean(err**2)),
        max_abs_err=max_abs,
        success=max_abs <= SUCCESS_TOL + cfg.noise_amplitude,
        N_used=N,
        J_used=J,
        kappa=list(report.kappa),
        runtime_ms=runtime_ms,
        offset_multiple=m,
        recovery_flagged=not report.success,
        guaranteed=report.guaranteed,
        failure_reasons=list(report.failure_reasons),
    )

    if cfg.output_dir is not None:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_samples(
            out / "samples.csv", grid.times, gamma, y,
            adc_input - y, report.gamma, report.eps.values,
        )
        emit_report(result, "json", out / "result.json", include_runtime=cfg.record_runtime)
        with open(out / "config.json", "w") as fh:
            json.dump(cfg.to_dict(), fh, indent=2)
            fh.write("\n")
    return result


def emit_report(result: ExperimentResult, format: str, path, include_runtime: bool = True) -> Path:
    """
    Write ``result`` as JSON or a one-row CSV. Returns the path written.

    With ``include_runtime=False`` the ``runtime_ms`` field is written as
    null so that the file depends only on the config.
    """
    d = result.to_dict()
    if not include_runtime:
        d["runtime_ms"] = None
    path = Path(path)
    if format == "json":
        text = json.dumps(d, indent=2) + "\n"
    elif format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        keys = list(d)
        w.writerow(keys)
        row = []
        for k in keys:
            v = d[k]
            if isinstance(v, float):
                v = fmt(v)
            elif isinstance(v, list):
                v = " ".join(str(x) for x in v)
            elif v is None:
                v = ""
            row.append(v)
        w.writerow(row)
        text = buf.getvalue()
    else:
        raise ParameterError(f"unknown format {format!r}; use 'json' or 'csv'")
    path.write_text(text)
    return path


def _cell_config(base: ExperimentConfig, axis: str, value: float) -> ExperimentConfig:
    if axis == "lambda-ratio":
        lam = base.beta_g / value
        N = base.resolved_N() if base.N != "auto" else choose_N(lam, base.beta_g, base.T)
        K = max(base.K, choose_J(lam, base.beta_g) + N + 1)
        return replace(base, lam=lam, K=K)
    if axis == "T":
        return replace(
            base,
            oversample_factor=CRITICAL_PERIOD / value,
            allow_fast_rate=base.allow_fast_rate or value > CRITICAL_PERIOD,
        )
    if axis == "N":
        if int(value) != value:
            raise ParameterError(f"N values must be integers, got {value}")
        return replace(base, N=int(value))
    if axis == "noise":
        return replace(base, noise_amplitude=float(value))
    raise ParameterError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")


def _trial(cfg: ExperimentConfig):
    r = run_experiment(cfg)
    return r.success, r.recovery_flagged


def sweep(
    base: ExperimentConfig,
    axis: str,
    values: Sequence[float],
    trials: int,
    workers: int = 1,
) -> List[dict]:
    """
    Success rate per axis value over ``trials`` seeds (``base.seed + i``).

    Columns: see ``SWEEP_HEADER``. ``flagged`` counts failures reported by
    ``unfold`` itself; ``undetected`` counts ground-truth failures that
    ``unfold`` did not flag. ``trials == 0`` gives an empty table.
    """
    if axis not in SWEEP_AXES:
        raise ParameterError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")
    if trials < 0:
        raise ParameterError("trials must be >= 0")
    if trials == 0:
        return []
    base = replace(base, output_dir=None)
    cells = [_cell_config(base, axis, v) for v in values]
    jobs = [replace(c, seed=base.seed + i) for c in cells for i in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_trial, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        outcomes = [_trial(j) for j in jobs]

    rows = []
    for ci, v in enumerate(values):
        chunk = outcomes[ci * trials:(ci + 1) * trials]
        ok = sum(1 for s, _ in chunk if s)
        rows.append({
            "axis": axis,
            "value": float(v),
            "trials": trials,
            "successes": ok,
            "success_rate": ok / trials,
            "flagged": sum(1 for _, f in chunk if f),
            "undetected": sum(1 for s, f in chunk if not s and not f),
        })
    return rows


def write_sweep(rows: List[dict], path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for r in rows:
            w.writerow([r["axis"], fmt(r["value"]), r["trials"], r["successes"],
                        fmt(r["success_rate"]), r["flagged"], r["undetected"]])
    return path
