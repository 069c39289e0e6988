"""Modulo-folding ADC simulation and recovery of bandlimited samples."""

__version__ = "0.1.0"

from .adc import ResidualSequence, SrAdcConfig, fold_samples, residual
from .errors import *  # noqa: F401,F403
from .harness import ExperimentConfig, ExperimentResult, emit_report, run_experiment, sweep
from .recovery import (
    RecoveryParams,
    RecoveryReport,
    choose_J,
    choose_N,
    compute_kappa,
    unfold,
    validate,
)
from .seqcore import (
    GridScalar,
    antidiff,
    centered_modulo,
    cumsum,
    finite_diff,
    fractional_part,
    round_to_grid,
)
from .signals import (
    CRITICAL_PERIOD,
    BandlimitedSignal,
    SamplingGrid,
    evaluate,
    generate_random,
    sample,
    sinc_reconstruct,
    sup_norm_estimate,
)
