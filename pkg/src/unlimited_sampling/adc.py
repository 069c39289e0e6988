"""
Self-reset ADC model: fold each sample into [-lambda, lambda).

Optional bounded uniform noise is added before folding. The residual
``gamma - y`` of a noise-free fold lies on the lattice 2*lambda*Z.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConsistencyError, LengthError, ParameterError
from .seqcore import GRID_RTOL, as_sequence, centered_modulo, grid_multiples

__all__ = ["SrAdcConfig", "ResidualSequence", "fold_samples", "residual"]


@dataclass(frozen=True)
class SrAdcConfig:
    """
    Converter settings.

    ``noise_amplitude`` is the half-width of the uniform noise; it must stay
    below ``lam / 4``. ``seed`` feeds the noise generator.
    """

    lam: float
    noise_amplitude: float = 0.0
    seed: Optional[int] = 0

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError(f"lambda must be positive, got {self.lam}")
        if not 0 <= self.noise_amplitude < self.lam / 4:
            raise ParameterError(
                f"noise_amplitude must be in [0, lambda/4), got {self.noise_amplitude}"
            )


@dataclass(frozen=True, eq=False)
class ResidualSequence:
    """Sequence whose entries are integer multiples of ``2*lam``."""

    values: np.ndarray
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError(f"lambda must be positive, got {self.lam}")
        v = np.array(self.values, dtype=np.float64).reshape(-1)
        # raises ConsistencyError when off the lattice
        grid_multiples(v, 2.0 * self.lam, GRID_RTOL)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def multiples(self) -> np.ndarray:
        """Integer labels ``values / (2*lam)``."""
        return grid_multiples(self.values, 2.0 * self.lam)

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def adc_noise(n: int, cfg: SrAdcConfig) -> np.ndarray:
    if cfg.noise_amplitude == 0:
        return np.zeros(n)
    rng = np.random.default_rng(cfg.seed)
    return rng.uniform(-cfg.noise_amplitude, cfg.noise_amplitude, n)


def fold_samples(gamma, cfg: SrAdcConfig) -> np.ndarray:
    """Return ``centered_modulo(gamma + noise, cfg.lam)``."""
    gamma = as_sequence(gamma, name="gamma")
    return centered_modulo(gamma + adc_noise(gamma.size, cfg), cfg.lam)


def residual(gamma, y, lam: float) -> ResidualSequence:
    """
    ``gamma - y`` checked against the 2*lambda lattice.

    Raises ``ConsistencyError`` when the difference is off-lattice, which
    means ``y`` was not produced from ``gamma`` with this ``lam``.
    """
    gamma = as_sequence(gamma, name="gamma")
    y = as_sequence(y, name="y")
    if gamma.size != y.size:
        raise LengthError(f"length mismatch: {gamma.size} vs {y.size}")
    eps = gamma - y
    try:
        return ResidualSequence(eps, lam)
    except ConsistencyError as exc:
        raise ConsistencyError(f"gamma - y is off the 2*lambda grid: {exc}") from None
