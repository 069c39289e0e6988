"""
Bandwidth-pi test signals built from integer-shifted sinc kernels.

A signal is ``g(t) = scale * sum_m c_m sinc((t - m*h)/h)`` with nodes
``m = 1..M`` and spacing ``h >= 1``. Each kernel has spectrum supported on
``[-pi/h, pi/h]``, so every finite sum is exactly pi-bandlimited.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError, UndersampledError
from .seqcore import as_sequence

__all__ = [
    "BandlimitedSignal",
    "SamplingGrid",
    "generate_random",
    "evaluate",
    "sample",
    "sinc_reconstruct",
    "sup_norm_estimate",
    "derivative_sup_estimate",
    "CRITICAL_PERIOD",
]

CRITICAL_PERIOD = 1.0 / (2.0 * np.pi * np.e)

SUP_NORM_STEP = 0.01
SUP_NORM_PAD = 10.0  # Nyquist periods on each side of the node range
DERIVATIVE_STEP = 1e-3


@dataclass(frozen=True, eq=False)
class BandlimitedSignal:
    """Finite sinc series; ``coefficients[m-1]`` weights the kernel at node m."""

    coefficients: np.ndarray
    node_spacing: float = 1.0
    norm_scale: float = 1.0

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=np.float64).reshape(-1)
        if c.size < 1:
            raise ParameterError("a signal needs at least one term")
        if not np.all(np.isfinite(c)):
            raise DomainError("coefficients must be finite")
        if not self.node_spacing >= 1.0:
            # spacing below 1 widens the band past pi
            raise ParameterError(f"node_spacing must be >= 1, got {self.node_spacing}")
        if not self.norm_scale > 0:
            raise ParameterError(f"norm_scale must be positive, got {self.norm_scale}")
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    @property
    def num_terms(self) -> int:
        return int(self.coefficients.size)

    @property
    def nodes(self) -> np.ndarray:
        return self.node_spacing * np.arange(1, self.num_terms + 1, dtype=np.float64)

    @property
    def support(self) -> tuple:
        """Node range padded by ``SUP_NORM_PAD`` Nyquist periods."""
        pad = SUP_NORM_PAD * self.node_spacing
        return float(self.nodes[0] - pad), float(self.nodes[-1] + pad)

    def scaled(self, factor: float) -> "BandlimitedSignal":
        return BandlimitedSignal(self.coefficients, self.node_spacing, self.norm_scale * factor)

    def __call__(self, t):
        return evaluate(self, t)


@dataclass(frozen=True)
class SamplingGrid:
    """Uniform grid ``t_k = t0 + k*T`` for ``k = 1..K``."""

    T: float
    K: int
    t0: float = 0.0

    def __post_init__(self):
        if not self.T > 0:
            raise ParameterError(f"sampling period must be positive, got {self.T}")
        if int(self.K) != self.K or self.K < 2:
            raise ParameterError(f"grid needs K >= 2 samples, got {self.K}")
        if not np.isfinite(self.t0):
            raise DomainError("t0 must be finite")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.T * np.arange(1, self.K + 1, dtype=np.float64)


def evaluate(g: BandlimitedSignal, t):
    """Evaluate ``g`` at scalar or array ``t``."""
    t_arr = np.asarray(t, dtype=np.float64)
    if not np.all(np.isfinite(t_arr)):
        raise DomainError("evaluation times must be finite")
    flat = t_arr.reshape(-1)
    h = g.node_spacing
    out = np.empty(flat.size)
    # chunk to keep the kernel matrix small on dense grids
    chunk = max(1, 2_000_000 // g.num_terms)
    for lo in range(0, flat.size, chunk):
        tt = flat[lo:lo + chunk]
        kern = np.sinc((tt[:, None] - g.nodes[None, :]) / h)
        out[lo:lo + chunk] = kern @ g.coefficients
    out *= g.norm_scale
    return float(out[0]) if t_arr.ndim == 0 else out.reshape(t_arr.shape)


def _dense_grid(g: BandlimitedSignal, step: float, pad: float = 0.0) -> np.ndarray:
    lo, hi = g.support
    n = int(np.ceil((hi - lo + 2 * pad) / step)) + 1
    return lo - pad + step * np.arange(n)


def sup_norm_estimate(g: BandlimitedSignal, dense_step: float = SUP_NORM_STEP) -> float:
    """Max of ``|g|`` on a grid of spacing ``dense_step`` over ``g.support``."""
    if not 0 < dense_step <= SUP_NORM_STEP:
        raise ParameterError(f"dense_step must be in (0, {SUP_NORM_STEP}], got {dense_step}")
    return float(np.max(np.abs(evaluate(g, _dense_grid(g, dense_step)))))


def derivative_sup_estimate(g: BandlimitedSignal, order: int, step: float = DERIVATIVE_STEP) -> float:
    """
    Estimate ``sup |g^(order)|`` with centred finite differences.

    The N-th difference of dense samples, divided by ``step**N``, is the
    centred N-th derivative estimate at the midpoint of its stencil.
    """
    if order < 1:
        raise ParameterError(f"order must be >= 1, got {order}")
    vals = evaluate(g, _dense_grid(g, step, pad=order * step))
    return float(np.max(np.abs(np.diff(vals, n=order)))) / step**order


def generate_random(seed: int, M: int = 32, target_norm: float = 1.0) -> BandlimitedSignal:
    """
    Random signal with weights uniform on [-1, 1], rescaled to a given sup-norm.

    Parameters
    ----------
    seed : int
        Seed for ``numpy.random.default_rng``; equal seeds give equal signals.
    M : int
        Number of sinc terms.
    target_norm : float
        Desired value of ``sup_norm_estimate``.
    """
    if int(M) != M or M < 1:
        raise ParameterError(f"M must be a positive integer, got {M}")
    if not target_norm > 0:
        raise ParameterError(f"target_norm must be positive, got {target_norm}")
    rng = np.random.default_rng(seed)
    raw = BandlimitedSignal(rng.uniform(-1.0, 1.0, int(M)))
    peak = sup_norm_estimate(raw)
    if peak == 0.0:
        raise ParameterError("generated an all-zero signal; try another seed")
    return raw.scaled(target_norm / peak)


def sample(g: BandlimitedSignal, grid: SamplingGrid) -> np.ndarray:
    """Samples ``g(t_k)`` on ``grid``."""
    return evaluate(g, grid.times)


def sinc_reconstruct(gamma, grid: SamplingGrid, query_times) -> np.ndarray:
    """
    Ideal low-pass (cutoff pi) interpolation of samples on ``grid``.

    Computes ``sum_k gamma_k * T * sinc(t - t_k)`` at every query time. Exact
    for an infinite record; with a finite record the error grows towards the
    window edges.
    """
    gamma = as_sequence(gamma, name="gamma")
    if gamma.size != grid.K:
        raise ParameterError(f"expected {grid.K} samples, got {gamma.size}")
    if grid.T > 1.0:
        raise UndersampledError(f"T = {grid.T} exceeds the Nyquist period 1")
    q = np.asarray(query_times, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(q)):
        raise DomainError("query times must be finite")
    tk = grid.times
    out = np.empty(q.size)
    chunk = max(1, 2_000_000 // grid.K)
    for lo in range(0, q.size, chunk):
        kern = np.sinc(q[lo:lo + chunk, None] - tk[None, :])
        out[lo:lo + chunk] = kern @ gamma
    return grid.T * out
