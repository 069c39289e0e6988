"""
Recovery of bandlimited samples from modulo-folded measurements.

Outline of ``unfold``:

1. ``ybar = Δ^N y``. When ``|Δ^N gamma| < lambda`` the fold leaves the
   N-th difference alone, so ``Δ^N eps = M(ybar) - ybar`` where
   ``eps = gamma - y`` is the lattice-valued residual.
2. Undo one difference at a time. Summation recovers ``Δ^{n-1} eps`` only
   up to an unknown constant ``2*lambda*kappa``. Summing a second time turns
   that constant into a ramp whose slope is read off between indices 1 and
   J + 1, which pins ``kappa`` to an integer.
3. The last summation leaves one global constant that cannot be resolved;
   it is fixed by ``eps_rec[0] = 0``.

Every intermediate sequence is rounded to the 2*lambda lattice.
"""

import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .adc import ResidualSequence
from .errors import (
    BoundError,
    GridError,
    InsufficientSamplesError,
    ParameterError,
    RateError,
)
from .seqcore import antidiff, as_sequence, centered_modulo, finite_diff, snap_to_grid

__all__ = [
    "RecoveryParams",
    "RecoveryReport",
    "choose_N",
    "choose_J",
    "compute_kappa",
    "validate",
    "unfold",
    "KAPPA_MARGIN",
]

_PI_E = math.pi * math.e
# slack for float ties in ceil() of exact ratios such as log(0.5)/log(0.5)
_CEIL_SLACK = 1e-9
# provable bound on |kappa estimate - kappa| when the hypotheses hold
KAPPA_MARGIN = 0.25


def _ceil(x: float) -> int:
    return int(math.ceil(x - _CEIL_SLACK))


def choose_N(lam: float, beta_g: float, T: float) -> int:
    """
    Smallest difference order that guarantees recovery.

    ``N = ceil((log lam - log beta_g) / log(T*pi*e))``, clamped at 0. A zero
    means ``beta_g <= lam`` so nothing folds.
    """
    if not (lam > 0 and beta_g > 0 and T > 0):
        raise ParameterError("lambda, beta_g and T must be positive")
    rate = T * _PI_E
    if rate >= 1.0:
        raise RateError(f"T*pi*e = {rate:.6g} >= 1: no difference order suffices")
    if beta_g <= lam:
        return 0
    return max(0, _ceil((math.log(lam) - math.log(beta_g)) / math.log(rate)))


def choose_J(lam: float, beta_g: float) -> int:
    """Span between the two samples used to estimate kappa: ``ceil(6*beta_g/lam)``."""
    if not (lam > 0 and beta_g > 0):
        raise ParameterError("lambda and beta_g must be positive")
    return _ceil(6.0 * beta_g / lam)


@dataclass(frozen=True)
class RecoveryParams:
    """
    Inputs of ``unfold``. ``N`` and ``J`` default to ``choose_N`` / ``choose_J``.

    ``allow_fast_rate`` lifts the ``T <= 1/(2*pi*e)`` check (only
    ``T*pi*e < 1`` is then required). ``allow_unguaranteed`` accepts an ``N``
    for which ``(T*pi*e)**N * beta_g >= lam``; the report then carries
    ``guaranteed=False``. ``noise_bound`` is a known bound on additive
    noise; it only widens the self-consistency checks of ``unfold``.
    """

    lam: float
    T: float
    beta_g: float
    N: int = None
    J: int = None
    allow_fast_rate: bool = False
    allow_unguaranteed: bool = False
    noise_bound: float = 0.0

    def __post_init__(self):
        if not (self.lam > 0 and self.T > 0 and self.beta_g > 0):
            raise ParameterError("lambda, T and beta_g must be positive")
        if not self.noise_bound >= 0:
            raise ParameterError("noise_bound must be >= 0")
        if self.N is None:
            object.__setattr__(self, "N", choose_N(self.lam, self.beta_g, self.T))
        if self.J is None:
            object.__setattr__(self, "J", choose_J(self.lam, self.beta_g))
        if int(self.N) != self.N or self.N < 0:
            raise ParameterError(f"N must be a non-negative integer, got {self.N}")
        if int(self.J) != self.J or self.J < 1:
            raise ParameterError(f"J must be a positive integer, got {self.J}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "J", int(self.J))

    @property
    def guaranteed(self) -> bool:
        """True when the recovery guarantee applies for these parameters."""
        return (
            self.T * _PI_E <= 0.5 * (1 + 1e-12)
            and (self.T * _PI_E) ** self.N * self.beta_g <= self.lam * (1 + 1e-12)
            and _on_grid(self.beta_g, 2 * self.lam)
            and self.J * self.lam >= 6 * self.beta_g * (1 - 1e-12)
        )


@dataclass(eq=False)
class RecoveryReport:
    """
    Output of ``unfold``.

    Attributes
    ----------
    gamma : numpy.ndarray
        Recovered samples ``y + eps.values``.
    eps : ResidualSequence
        Recovered residual, anchored at ``eps[0] = 0``.
    kappa : list of int
        Integration constants, one per resolved level (N - 1 of them).
    anchored : bool
        The global 2*lambda constant was fixed by assuming sample 1 is unfolded.
    guaranteed : bool
        Parameters satisfy the recovery guarantee.
    success : bool
        No internal consistency check failed. Without ground truth this is
        the best available signal; it can miss errors when ``guaranteed`` is
        False.
    failure_reasons : list of str
    max_diff_N : float
        ``max |Δ^N gamma|`` of the output (always below lambda).
    kappa_margin : float
        Largest distance of a kappa estimate from its integer (<= 1/4 when
        guaranteed).
    max_rounding : float
        Largest lattice-rounding correction applied to any entry.
    stages : list of numpy.ndarray
        ``s_(1) .. s_(N)``: the recovered ``Δ^N eps, ..., Δ eps``.
    """

    gamma: np.ndarray
    eps: ResidualSequence
    kappa: List[int]
    anchored: bool
    guaranteed: bool
    success: bool
    failure_reasons: List[str] = field(default_factory=list)
    max_diff_N: float = 0.0
    kappa_margin: float = 0.0
    max_rounding: float = 0.0
    stages: List[np.ndarray] = field(default_factory=list)


def _on_grid(x: float, step: float, rtol: float = 1e-8) -> bool:
    r = x / step
    return abs(r - round(r)) <= rtol * max(1.0, abs(r))


def _kappa_estimate(s2, J: int, lam: float) -> float:
    return (s2[0] - s2[J]) / (2.0 * lam * J)


def compute_kappa(s, J: int, lam: float, beta_g: float) -> int:
    """
    Integer constant lost by one summation.

    ``s`` is the twice-summed difference sequence (``antidiff`` applied
    twice), so the lost constant shows up as a ramp of slope
    ``2*lam*kappa``. Returns ``floor((s_1 - s_{J+1}) / (2*lam*J) + 1/2)``.
    ``beta_g`` only enters through the choice of ``J``; it is checked for
    positivity.
    """
    if not (lam > 0 and beta_g > 0):
        raise ParameterError("lambda and beta_g must be positive")
    if J < 1:
        raise ParameterError(f"J must be >= 1, got {J}")
    s = np.asarray(s, dtype=np.float64)
    if s.size < J + 1:
        raise InsufficientSamplesError(f"need at least J+1 = {J + 1} entries, got {s.size}")
    return int(math.floor(_kappa_estimate(s, J, lam) + 0.5))


def validate(params: RecoveryParams, K: int) -> None:
    """
    Check ``params`` against a record of ``K`` samples.

    The order check is ``(T*pi*e)**N * beta_g <= lam``. Since
    ``sup|g| <= beta_g``, this still gives a strict bound below ``lam``
    whenever ``sup|g| < beta_g``.

    Raises a distinct ``ValidationError`` subclass per violated condition:
    ``RateError``, ``GridError``, ``BoundError`` or
    ``InsufficientSamplesError``.
    """
    rate = params.T * _PI_E
    if rate >= 1.0:
        raise RateError(f"T*pi*e = {rate:.6g} >= 1")
    if not params.allow_fast_rate and rate > 0.5 * (1 + 1e-12):
        raise RateError(
            f"T = {params.T:.6g} exceeds 1/(2*pi*e) = {0.5 / _PI_E:.6g}"
        )
    if not _on_grid(params.beta_g, 2 * params.lam) or params.beta_g < 2 * params.lam * (1 - 1e-12):
        raise GridError(
            f"beta_g = {params.beta_g!r} is not a positive multiple of 2*lambda = {2 * params.lam!r}"
        )
    if params.N >= 1 and not params.allow_unguaranteed:
        # equality is accepted: beta_g only bounds sup|g|
        bound = rate**params.N * params.beta_g
        if bound > params.lam * (1 + 1e-12):
            raise BoundError(
                f"(T*pi*e)^N * beta_g = {bound:.6g} >= lambda = {params.lam:.6g} for N = {params.N}"
            )
    if params.N >= 1 and K < params.J + params.N + 1:
        raise InsufficientSamplesError(
            f"K = {K} samples, need J + N + 1 = {params.J + params.N + 1}"
        )


def _consistency_failures(gamma: np.ndarray, params: RecoveryParams) -> List[str]:
    """
    Checks that samples of a signal with ``sup|g| <= beta_g`` must pass.

    ``|Δ^n gamma| <= (T*pi*e)**n * beta_g`` holds for every n. A wrong
    recovery differs from the truth by an integer lattice sequence ``e``
    whose n-th difference is either zero or at least 2*lambda somewhere, so
    once the bound drops below lambda (n = choose_N) any error that is not a
    low-degree polynomial is exposed; polynomial errors blow up the
    amplitude span instead.
    """
    lam, beta = params.lam, params.beta_g
    step = 2.0 * lam
    reasons = []
    slack = lam / 2 + 2 * params.noise_bound
    lo = math.ceil((-beta - slack - gamma.min()) / step)
    hi = math.floor((beta + slack - gamma.max()) / step)
    if lo > hi:
        reasons.append(
            f"recovered amplitude span {gamma.max() - gamma.min():.6g} exceeds 2*beta_g"
        )
    rate = params.T * _PI_E
    top = min(max(params.N, choose_N(lam, beta, params.T)), gamma.size - 1)
    d = gamma
    for n in range(1, top + 1):
        d = np.diff(d)
        bound = rate**n * beta * (1 + 1e-9) + 2**n * params.noise_bound + 1e-12
        peak = float(np.max(np.abs(d)))
        if peak > bound:
            reasons.append(
                f"max |Δ^{n} gamma| = {peak:.3g} exceeds (T*pi*e)^{n}*beta_g = {bound:.3g}"
            )
            break
    return reasons


def _blown_up(a: np.ndarray, step: float) -> bool:
    # past 2**50 lattice steps a double can no longer resolve the lattice
    return not np.all(np.isfinite(a)) or float(np.max(np.abs(a))) > 2.0**50 * step


def _blowup_report(y, params, kappas, stages) -> RecoveryReport:
    return RecoveryReport(
        gamma=y.copy(),
        eps=ResidualSequence(np.zeros_like(y), params.lam),
        kappa=kappas,
        anchored=False,
        guaranteed=params.guaranteed,
        success=False,
        failure_reasons=["partial sums left the representable lattice range; samples returned unfolded"],
        stages=stages,
    )


def _passthrough(y: np.ndarray, params: RecoveryParams) -> RecoveryReport:
    return RecoveryReport(
        gamma=y.copy(),
        eps=ResidualSequence(np.zeros_like(y), params.lam),
        kappa=[],
        anchored=True,
        guaranteed=params.beta_g <= params.lam,
        success=True,
    )


def unfold(y, params: RecoveryParams) -> RecoveryReport:
    """
    Recover samples ``gamma`` from folded samples ``y``.

    Parameters
    ----------
    y : array_like
        Folded samples, all in ``[-lam, lam)``.
    params : RecoveryParams
        Threshold, sampling period, amplitude bound and orders.

    Returns
    -------
    RecoveryReport
        ``gamma`` equals the true samples up to one global multiple of
        ``2*lam`` (zero when the first sample was not folded).
    """
    y = as_sequence(y, name="y")
    if params.N == 0:
        return _passthrough(y, params)
    validate(params, y.size)

    lam, N, J = params.lam, params.N, params.J
    step = 2.0 * lam
    reasons = []

    ybar = finite_diff(y, N)
    s, max_round = snap_to_grid(centered_modulo(ybar, lam) - ybar, step)
    stages = [s]
    kappas = []
    margin = 0.0
    for _ in range(N - 1):
        partial, corr = snap_to_grid(antidiff(s), step)
        max_round = max(max_round, corr)
        if _blown_up(partial, step):
            return _blowup_report(y, params, kappas, stages)
        estimate = _kappa_estimate(antidiff(partial), J, lam)
        kappa = int(math.floor(estimate + 0.5))
        margin = max(margin, abs(estimate - kappa))
        kappas.append(kappa)
        s, corr = snap_to_grid(partial + step * kappa, step)
        max_round = max(max_round, corr)
        stages.append(s)

    eps, corr = snap_to_grid(antidiff(s), step)
    max_round = max(max_round, corr)
    if _blown_up(eps, step):
        return _blowup_report(y, params, kappas, stages)
    gamma = y + eps

    if max_round > lam / 2:
        reasons.append(f"lattice rounding moved an entry by {max_round:.3g} > lambda/2")
    if params.guaranteed and margin > KAPPA_MARGIN:
        reasons.append(f"kappa estimate {margin:.3g} away from an integer (> 1/4)")
    reasons.extend(_consistency_failures(gamma, params))

    return RecoveryReport(
        gamma=gamma,
        eps=ResidualSequence(eps, lam),
        kappa=kappas,
        anchored=True,
        guaranteed=params.guaranteed,
        success=not reasons,
        failure_reasons=reasons,
        max_diff_N=float(np.max(np.abs(np.diff(gamma, n=N)))),
        kappa_margin=margin,
        max_rounding=max_round,
        stages=stages,
    )
