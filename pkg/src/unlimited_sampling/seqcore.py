"""
Elementary sequence and scalar operators.

Sequences are plain 1-D float64 numpy arrays. Storage is 0-based; where a
docstring talks about "index 1" it means element ``a[0]``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DomainError, LengthError, ParameterError

__all__ = [
    "GridScalar",
    "as_sequence",
    "fractional_part",
    "centered_modulo",
    "finite_diff",
    "cumsum",
    "antidiff",
    "round_to_grid",
    "snap_to_grid",
    "grid_multiples",
]

# default relative tolerance for "lies on the lattice" checks
GRID_RTOL = 1e-8


@dataclass(frozen=True)
class GridScalar:
    """A real number known to be an integer multiple of ``grid_step``."""

    value: float
    grid_step: float

    def __post_init__(self):
        if not self.grid_step > 0:
            raise ParameterError(f"grid_step must be positive, got {self.grid_step}")
        ratio = self.value / self.grid_step
        if abs(ratio - round(ratio)) > GRID_RTOL * max(1.0, abs(ratio)):
            raise ParameterError(
                f"{self.value!r} is not a multiple of {self.grid_step!r}"
            )

    @property
    def multiple(self) -> int:
        return int(round(self.value / self.grid_step))

    def __float__(self):
        return float(self.value)


def as_sequence(a, *, name="sequence") -> np.ndarray:
    """Coerce ``a`` to a finite, non-empty 1-D float array (copied)."""
    arr = np.array(a, dtype=np.float64, copy=True).reshape(-1)
    if arr.size == 0:
        raise LengthError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite values")
    return arr


def _check_finite(t):
    if not np.all(np.isfinite(t)):
        raise DomainError("input must be finite")


def fractional_part(t):
    """Return ``t - floor(t)``, a value in ``[0, 1)``. Works elementwise."""
    t = np.asarray(t, dtype=np.float64)
    _check_finite(t)
    r = t - np.floor(t)
    # t = -1e-20 gives 1.0 after rounding
    r = np.where(r >= 1.0, 0.0, r)
    return float(r) if r.ndim == 0 else r


def centered_modulo(t, lam):
    """
    Fold ``t`` into ``[-lam, lam)``.

    Mathematically ``2*lam*(frac(t/(2*lam) + 1/2) - 1/2)``. It is evaluated
    as ``t - 2*lam*floor(t/(2*lam) + 1/2)`` so that values already in range
    come back bit-identical.

    Parameters
    ----------
    t : float or array_like
        Amplitude(s) to fold.
    lam : float
        Folding threshold, must be positive.

    Returns
    -------
    float or numpy.ndarray
        Folded amplitude(s), same shape as ``t``.
    """
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    t = np.asarray(t, dtype=np.float64)
    _check_finite(t)
    period = 2.0 * lam
    r = t - period * np.floor(t / period + 0.5)
    # keep the half-open range when floor() lands on the wrong side of a tie
    r = np.where(r >= lam, r - period, r)
    r = np.where(r < -lam, r + period, r)
    return float(r) if r.ndim == 0 else r


def finite_diff(a, N: int = 1) -> np.ndarray:
    """N-th forward difference, ``(Δa)_k = a_{k+1} - a_k``; length drops by N."""
    a = as_sequence(a)
    if N < 1:
        raise ParameterError(f"difference order must be >= 1, got {N}")
    if N >= a.size:
        raise LengthError(f"order {N} needs more than {N} samples, got {a.size}")
    return np.diff(a, n=N)


def cumsum(a, times: int = 1) -> np.ndarray:
    """Apply the running-sum operator ``times`` times (length preserved)."""
    a = as_sequence(a)
    if times < 1:
        raise ParameterError(f"times must be >= 1, got {times}")
    for _ in range(times):
        a = np.cumsum(a)
    return a


def antidiff(a) -> np.ndarray:
    """
    Running sum with a leading zero: ``(0, a_1, a_1 + a_2, ...)``.

    ``finite_diff(antidiff(a)) == a`` and ``antidiff(finite_diff(b)) ==
    b - b_1``, so the unknown integration constant sits at index 1.
    """
    a = as_sequence(a)
    return cumsum(np.concatenate(([0.0], a)))


def round_to_grid(x: float, step: float) -> GridScalar:
    """Nearest multiple of ``step``; ties round up (``floor(x/step + 1/2)``)."""
    if not step > 0:
        raise ParameterError(f"step must be positive, got {step}")
    if not np.isfinite(x):
        raise DomainError("input must be finite")
    return GridScalar(step * float(np.floor(x / step + 0.5)), step)


def snap_to_grid(a, step: float):
    """
    Vectorised ``round_to_grid``.

    Returns
    -------
    snapped : numpy.ndarray
        ``step * floor(a/step + 1/2)``.
    correction : float
        Largest absolute change applied to any element.
    """
    if not step > 0:
        raise ParameterError(f"step must be positive, got {step}")
    a = np.asarray(a, dtype=np.float64)
    snapped = step * np.floor(a / step + 0.5)
    correction = float(np.max(np.abs(snapped - a))) if a.size else 0.0
    return snapped, correction


def grid_multiples(a, step: float, rtol: float = GRID_RTOL) -> np.ndarray:
    """Integer multiples ``a / step``; raises if any entry is off the lattice."""
    a = np.asarray(a, dtype=np.float64)
    if not np.all(np.isfinite(a)):
        raise DomainError("lattice values must be finite")
    ratio = a / step
    nearest = np.round(ratio)
    bad = np.abs(ratio - nearest) > rtol * np.maximum(1.0, np.abs(ratio))
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise ConsistencyError(
            f"entry {k + 1} = {a[k]!r} is not a multiple of {step!r}"
        )
    return nearest.astype(np.int64)
