"""Tests for least squares and Student-t significance."""

import numpy as np
import pytest
from scipy import special, stats

from tokenlaw.errors import DegenerateFitError, InsufficientDataError
from tokenlaw.stats import clamp_p_value, ols, regularized_incomplete_beta, student_t_two_sided


class TestIncompleteBeta:
    """Test the regularized incomplete beta function."""

    @pytest.mark.parametrize(
        "x,a,b",
        [(0.1, 0.5, 0.5), (0.5, 2.0, 3.0), (0.9, 5.0, 0.5), (0.999, 40.0, 0.5), (0.3, 100.0, 0.5)],
    )
    def test_matches_reference(self, x, a, b):
        """Test agreement with the reference implementation to 1e-12."""
        assert regularized_incomplete_beta(x, a, b) == pytest.approx(special.betainc(a, b, x), rel=1e-12, abs=1e-15)

    def test_endpoints(self):
        """Test the values at 0 and 1."""
        assert regularized_incomplete_beta(0.0, 2.0, 3.0) == 0.0
        assert regularized_incomplete_beta(1.0, 2.0, 3.0) == 1.0


class TestStudentT:
    """Test two-sided Student-t probabilities."""

    @pytest.mark.parametrize("t_value,df", [(0.5, 3), (2.0, 10), (-2.0, 10), (4.2, 25), (12.0, 100)])
    def test_matches_reference(self, t_value, df):
        """Test agreement with the reference survival function."""
        expected = 2 * stats.t.sf(abs(t_value), df)
        assert student_t_two_sided(t_value, df) == pytest.approx(expected, rel=1e-10)

    def test_five_percent_point(self):
        """Test the familiar 5% critical value at ten degrees of freedom."""
        assert student_t_two_sided(2.228138852, 10) == pytest.approx(0.05, abs=1e-8)

    def test_zero_t(self):
        """Test that t = 0 gives p = 1."""
        assert student_t_two_sided(0.0, 5) == pytest.approx(1.0)


class TestClamp:
    """Test the p-value reporting floor."""

    def test_below_floor(self):
        """Test that tiny values are clamped and flagged."""
        assert clamp_p_value(1e-300) == (2.2e-16, True)

    def test_above_floor(self):
        """Test that ordinary values pass through."""
        assert clamp_p_value(0.03) == (0.03, False)


class TestOLS:
    """Test ordinary least squares."""

    def test_matches_linregress(self):
        """Test slope, intercept, errors and p value against a reference regression."""
        x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
        y = [2.1, 3.9, 6.2, 7.8, 10.1, 11.8]
        fit = ols(x, y)
        ref = stats.linregress(x, y)
        assert fit.slope == pytest.approx(ref.slope, rel=1e-12)
        assert fit.intercept == pytest.approx(ref.intercept, rel=1e-12)
        assert fit.slope_stderr == pytest.approx(ref.stderr, rel=1e-10)
        assert fit.intercept_stderr == pytest.approx(ref.intercept_stderr, rel=1e-10)
        assert fit.r_squared == pytest.approx(ref.rvalue ** 2, rel=1e-12)
        assert fit.p_value == pytest.approx(ref.pvalue, rel=1e-8)
        assert fit.df == 4
        assert fit.t_value == pytest.approx(fit.slope / fit.slope_stderr)

    def test_exact_line(self):
        """Test that points on a line give zero error and a clamped p value."""
        x = np.arange(1.0, 11.0)
        fit = ols(x, 3.0 * x - 2.0)
        assert fit.slope == pytest.approx(3.0, abs=1e-12)
        assert fit.intercept == pytest.approx(-2.0, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0)
        assert fit.p_below_threshold
        assert fit.p_value_display == "< 2.2e-16"

    def test_constant_response_rejected(self):
        """Test that a constant response is a zero-variance error by default."""
        with pytest.raises(DegenerateFitError) as info:
            ols([1, 2, 3], [5, 5, 5])
        assert info.value.zero_variance == "y"

    def test_constant_response_allowed(self):
        """Test the flagged slope-0 fit for a constant response."""
        fit = ols([1, 2, 3], [5, 5, 5], allow_constant_response=True)
        assert fit.slope == 0.0
        assert fit.r_squared is None
        assert fit.degenerate
        assert fit.p_value == 1.0

    def test_constant_predictor_rejected(self):
        """Test that a constant predictor is a zero-variance error."""
        with pytest.raises(DegenerateFitError) as info:
            ols([2, 2, 2], [1, 2, 3])
        assert info.value.zero_variance == "x"

    def test_too_few_points(self):
        """Test that two points are not enough."""
        with pytest.raises(InsufficientDataError):
            ols([1, 2], [1, 2])

    def test_length_mismatch(self):
        """Test that x and y must have the same length."""
        with pytest.raises(ValueError):
            ols([1, 2, 3], [1, 2])
