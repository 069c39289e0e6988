import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from unlimited_sampling.errors import ConsistencyError, DomainError, LengthError, ParameterError
from unlimited_sampling.seqcore import (
    GridScalar,
    antidiff,
    centered_modulo,
    cumsum,
    finite_diff,
    fractional_part,
    grid_multiples,
    round_to_grid,
    snap_to_grid,
)

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
lams = st.floats(min_value=1e-3, max_value=10.0)


class TestFractionalPart:
    @pytest.mark.parametrize("t, expected", [(2.7, 0.7), (3.0, 0.0), (-0.3, 0.7)])
    def test_examples(self, t, expected):
        assert fractional_part(t) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_non_finite(self, bad):
        with pytest.raises(DomainError):
            fractional_part(bad)

    @given(finite)
    def test_range(self, t):
        r = fractional_part(t)
        assert 0.0 <= r < 1.0

    def test_tiny_negative_stays_in_range(self):
        assert fractional_part(-1e-20) == 0.0


class TestCenteredModulo:
    @pytest.mark.parametrize(
        "t, lam, expected",
        [(0.3, 1.0, 0.3), (2.0, 1.0, 0.0), (1.0, 1.0, -1.0), (-1.2, 1.0, 0.8)],
    )
    def test_examples(self, t, lam, expected):
        assert centered_modulo(t, lam) == pytest.approx(expected, abs=1e-15)

    def test_matches_fractional_part_form(self):
        rng = np.random.default_rng(0)
        t = rng.uniform(-50, 50, 1000)
        lam = 0.37
        ref = 2 * lam * (fractional_part(t / (2 * lam) + 0.5) - 0.5)
        assert np.allclose(centered_modulo(t, lam), ref, atol=1e-12)

    @pytest.mark.parametrize("lam", [0.0, -1.0])
    def test_bad_lambda(self, lam):
        with pytest.raises(ParameterError):
            centered_modulo(0.1, lam)

    def test_non_finite(self):
        with pytest.raises(DomainError):
            centered_modulo([0.0, math.nan], 1.0)

    def test_vectorised_shape(self):
        out = centered_modulo(np.zeros((3, 2)), 0.5)
        assert out.shape == (3, 2)

    @given(st.floats(min_value=-100, max_value=100), lams, st.integers(-50, 50))
    def test_periodicity(self, t, lam, k):
        a = centered_modulo(t, lam)
        b = centered_modulo(t + 2 * lam * k, lam)
        # skip points that land on the fold boundary after the shift
        assume(abs(abs(a) - lam) > 1e-9)
        assert b == pytest.approx(a, abs=1e-12 * max(1.0, abs(t) + 2 * lam * abs(k)))

    @given(lams, st.floats(min_value=-1.0, max_value=1.0, exclude_max=True))
    def test_identity_on_range(self, lam, u):
        t = u * lam
        assert centered_modulo(t, lam) == t

    @given(finite, lams)
    def test_range_and_residual_grid(self, t, lam):
        r = centered_modulo(t, lam)
        assert -lam <= r < lam
        q = (t - r) / (2 * lam)
        assert abs(q - round(q)) <= 1e-8 * max(1.0, abs(q))

    @given(
        arrays(np.float64, st.integers(5, 30), elements=st.floats(-10, 10)),
        st.sampled_from([1, 2, 3]),
    )
    @settings(max_examples=200)
    def test_commutes_with_differences(self, a, N):
        lam = 1.0
        lhs = centered_modulo(finite_diff(a, N), lam)
        rhs = centered_modulo(finite_diff(centered_modulo(a, lam), N), lam)
        assume(np.all(np.abs(np.abs(lhs) - lam) > 1e-6))
        assert np.allclose(lhs, rhs, atol=1e-9)


class TestFiniteDiff:
    def test_examples(self):
        assert finite_diff([1, 3, 6, 10], 1).tolist() == [2, 3, 4]
        assert finite_diff([1, 3, 6, 10], 2).tolist() == [1, 1]
        assert finite_diff([4.2] * 4, 1).tolist() == [0, 0, 0]

    def test_order_too_large(self):
        with pytest.raises(LengthError):
            finite_diff([1, 2, 3], 3)

    def test_order_zero(self):
        with pytest.raises(ParameterError):
            finite_diff([1, 2, 3], 0)

    @pytest.mark.parametrize("N", [1, 2, 3, 4])
    def test_annihilates_polynomials(self, N):
        k = np.arange(1, 21, dtype=float)
        coeffs = np.random.default_rng(N).normal(size=N)
        poly = np.polyval(coeffs, k)  # degree N-1
        assert np.allclose(finite_diff(poly, N), 0.0, atol=1e-8)

    @given(arrays(np.float64, st.integers(2, 50), elements=st.floats(-1e3, 1e3)))
    def test_contraction(self, a):
        assert np.max(np.abs(finite_diff(a))) <= 2 * np.max(np.abs(a)) + 1e-12

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            finite_diff([1.0, math.inf, 2.0])


class TestCumsum:
    def test_examples(self):
        assert cumsum([2, 3, 4]).tolist() == [2, 5, 9]
        assert cumsum([1, 0, 0], 2).tolist() == [1, 2, 3]
        assert cumsum(np.zeros(7), 5).tolist() == [0.0] * 7

    def test_empty(self):
        with pytest.raises(LengthError):
            cumsum([])

    @given(arrays(np.float64, st.integers(2, 40), elements=st.floats(-100, 100)))
    def test_duality(self, a):
        assert np.allclose(finite_diff(cumsum(a)), a[1:], atol=1e-9)
        assert np.allclose(cumsum(finite_diff(a)), a[1:] - a[0], atol=1e-9)

    def test_antidiff_inverts_difference(self):
        b = np.array([3.0, -1.0, 4.0, 1.0, -5.0])
        assert antidiff(finite_diff(b)).tolist() == (b - b[0]).tolist()
        assert finite_diff(antidiff(b)).tolist() == b.tolist()


class TestRoundToGrid:
    @pytest.mark.parametrize(
        "x, step, expected", [(0.14, 0.1, 0.1), (-0.06, 0.1, -0.1), (0.05, 0.1, 0.1)]
    )
    def test_examples(self, x, step, expected):
        r = round_to_grid(x, step)
        assert isinstance(r, GridScalar)
        assert r.value == pytest.approx(expected, abs=1e-15)

    def test_bad_step(self):
        with pytest.raises(ParameterError):
            round_to_grid(1.0, 0.0)

    def test_grid_scalar_rejects_off_grid(self):
        with pytest.raises(ParameterError):
            GridScalar(0.15, 0.1)
        assert GridScalar(0.3, 0.1).multiple == 3

    def test_snap_reports_correction(self):
        snapped, corr = snap_to_grid([0.21, -0.38], 0.2)
        assert np.allclose(snapped, [0.2, -0.4])
        assert corr == pytest.approx(0.02)

    def test_grid_multiples(self):
        assert grid_multiples([0.0, 0.2, -0.6], 0.2).tolist() == [0, 1, -3]
        with pytest.raises(ConsistencyError):
            grid_multiples([0.0, 0.25], 0.2)
