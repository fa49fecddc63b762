import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.interpolate import BSpline

from expsamp import (
    MellinBSpline,
    MellinFejer,
    eval_bspline,
    eval_fejer,
    kernel_eval,
    mellin_transform_closed_form,
    numerical_mellin_transform,
    parse_kernel,
)
from expsamp.kernels import MAX_BSPLINE_ORDER, sinc


def scipy_bspline(n, s):
    """Cardinal B-spline of order n (degree n-1) centred at 0, via de Boor."""
    knots = np.arange(n + 1) - n / 2
    return BSpline.basis_element(knots, extrapolate=False)(s)


class TestBSplineValues:
    def test_hat_at_one(self):
        assert eval_bspline(2, 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_hat_half(self):
        assert eval_bspline(2, math.exp(0.5)) == pytest.approx(0.5, abs=1e-15)

    def test_quadratic_centre(self):
        assert eval_bspline(3, 1.0) == pytest.approx(0.75, abs=1e-15)

    def test_support_boundary(self):
        assert eval_bspline(2, math.e) == 0.0
        assert kernel_eval(MellinBSpline(3), math.exp(3)) == 0.0

    @pytest.mark.parametrize("n", range(1, 9))
    def test_matches_de_boor(self, n):
        rng = np.random.default_rng(n)
        s = rng.uniform(-n / 2 + 1e-9, n / 2 - 1e-9, 400)
        np.testing.assert_allclose(MellinBSpline(n).at_log(s), scipy_bspline(n, s), atol=1e-13)

    @pytest.mark.parametrize("n", range(1, 6))
    def test_zero_outside_support(self, n):
        s = np.array([n / 2, n / 2 + 0.1, -n / 2 - 3.0, 50.0])
        vals = MellinBSpline(n).at_log(s)
        if n == 1:
            # order 1 uses the midpoint convention H(0) = 1/2 at the jump
            assert vals[0] == 0.5
            vals = vals[1:]
        assert np.all(vals == 0.0)

    @pytest.mark.parametrize("n", range(1, 6))
    def test_symmetry(self, n):
        rng = np.random.default_rng(100 + n)
        x = np.exp(rng.uniform(-n, n, 1000))
        k = MellinBSpline(n)
        assert np.max(np.abs(k(x) - k(1 / x))) <= 1e-15

    def test_high_order_stays_accurate(self):
        s = np.linspace(-9.9, 9.9, 301)
        np.testing.assert_allclose(MellinBSpline(20).at_log(s), scipy_bspline(20, s), atol=1e-12)

    @pytest.mark.parametrize("bad", [0, -1, 2.5, MAX_BSPLINE_ORDER + 1])
    def test_bad_order(self, bad):
        with pytest.raises(ValueError):
            MellinBSpline(bad)

    @pytest.mark.parametrize("x", [0.0, -1.0])
    def test_domain(self, x):
        with pytest.raises(ValueError):
            eval_bspline(2, x)


class TestFejerValues:
    def test_centre(self):
        assert eval_fejer(math.pi, 0, 1.0) == pytest.approx(0.5, abs=1e-15)
        assert eval_fejer(2 * math.pi, 0, 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_first_zero(self):
        assert eval_fejer(math.pi, 0, math.exp(2)) == pytest.approx(0.0, abs=1e-16)

    def test_nonnegative(self):
        x = np.exp(np.linspace(-40, 40, 4001))
        assert np.all(MellinFejer(math.pi)(x) >= 0)

    def test_series_branch_continuous(self):
        # either side of the 1e-8 series cut-off the value must agree to rounding
        k = MellinFejer(math.pi)
        s = np.array([0.0, 1e-12, 1.9e-8, 2.1e-8, 1e-6])
        direct = math.pi / (2 * math.pi) * np.array(
            [1.0] + [(math.sin(math.pi * v / 2) / (math.pi * v / 2)) ** 2 for v in s[1:]])
        np.testing.assert_allclose(k.at_log(s), direct, rtol=1e-14)

    def test_c_weight(self):
        k = MellinFejer(1.0, 0.5)
        x = 3.0
        assert k(x) == pytest.approx(MellinFejer(1.0, 0.0)(x) * x**-0.5, rel=1e-14)

    @pytest.mark.parametrize("x", [0.0, -2.0])
    def test_domain(self, x):
        with pytest.raises(ValueError):
            eval_fejer(math.pi, 0, x)

    def test_bad_alpha(self):
        with pytest.raises(ValueError):
            MellinFejer(0.0)


class TestTransforms:
    @pytest.mark.parametrize("n", range(1, 6))
    def test_delta_at_integer_cycles(self, n):
        k = MellinBSpline(n)
        t = 2 * np.pi * np.arange(-10, 11)
        vals = mellin_transform_closed_form(k, t)
        expect = (np.arange(-10, 11) == 0).astype(float)
        assert np.array_equal(vals, expect)

    def test_fejer_triangle(self):
        k = MellinFejer(math.pi)
        assert mellin_transform_closed_form(k, math.pi / 2) == pytest.approx(0.5)
        assert mellin_transform_closed_form(k, 0.0) == 1.0
        assert mellin_transform_closed_form(k, 2 * math.pi) == 0.0

    @pytest.mark.parametrize("n", range(1, 6))
    @pytest.mark.parametrize("t", [0.0, math.pi, 2 * math.pi, 1.3, 7.0])
    def test_numerical_matches_sinc_power(self, n, t):
        k = MellinBSpline(n)
        num = numerical_mellin_transform(k, t)
        assert abs(num.real - (math.sin(t / 2) / (t / 2) if t else 1.0) ** n) <= 1e-12
        assert abs(num.imag) <= 1e-14

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_printed_exponent_is_not_a_sinc_power(self, n):
        """Using power n+1 in the truncated-power sum does not give sinc^n."""
        xg, wg = np.polynomial.legendre.leggauss(40)
        total = {}
        for t in (0.0, math.pi):
            acc = 0.0
            for left in np.arange(n) - n / 2:
                s = left + 0.5 + 0.5 * xg
                vals = sum((-1) ** j * math.comb(n, j) * np.maximum(n / 2 + s - j, 0.0) ** (n + 1)
                           for j in range(n + 1)) / math.factorial(n - 1)
                acc += float(np.sum(vals * np.cos(t * s) * 0.5 * wg))
            total[t] = acc
        sinc_pi = (2 / math.pi) ** n
        assert abs(total[0.0] - 1.0) > 0.1 or abs(total[math.pi] - sinc_pi) > 0.1

    def test_derivative_at_cycles(self):
        for n in range(2, 6):
            d = MellinBSpline(n).mellin_transform_derivative_cycles(np.arange(-5, 6))
            assert np.all(d == 0.0)
        # order 1: d/dt sinc at 2 pi m is cos(pi m) / (2 pi m)
        m = np.array([1.0, 2.0, -3.0])
        d1 = MellinBSpline(1).mellin_transform_derivative_cycles(m)
        np.testing.assert_allclose(d1, np.cos(np.pi * m) / (2 * np.pi * m), rtol=1e-14)

    def test_derivative_matches_difference(self):
        k = MellinBSpline(3)
        t, h = 2.3, 1e-5
        fd = (k.mellin_transform(t + h) - k.mellin_transform(t - h)) / (2 * h)
        assert float(k.mellin_transform_derivative(t)) == pytest.approx(fd, rel=1e-8)

    def test_numerical_needs_compact_support(self):
        with pytest.raises(ValueError):
            numerical_mellin_transform(MellinFejer(math.pi), 1.0)


class TestSinc:
    @given(st.floats(min_value=-50, max_value=50, allow_nan=False))
    @settings(max_examples=200, deadline=None)
    def test_even(self, v):
        assert sinc(v) == sinc(-v)

    def test_zero(self):
        assert sinc(0.0) == 1.0
        assert abs(sinc(1.0)) < 1e-16


class TestParseKernel:
    @pytest.mark.parametrize("spec,expect", [
        ("bspline:3", MellinBSpline(3)),
        ("fejer:pi:0", MellinFejer(math.pi, 0.0)),
        ("fejer:3.14159:0", MellinFejer(3.14159, 0.0)),
        ("fejer:2pi:0.5", MellinFejer(2 * math.pi, 0.5)),
        ("fejer:π", MellinFejer(math.pi, 0.0)),
    ])
    def test_grammar(self, spec, expect):
        assert parse_kernel(spec) == expect

    @pytest.mark.parametrize("spec", ["bspline", "bspline:0", "gauss:1", "fejer:-1:0", "fejer:a:b"])
    def test_rejects(self, spec):
        with pytest.raises(ValueError):
            parse_kernel(spec)

    def test_roundtrip(self):
        for k in (MellinBSpline(4), MellinFejer(math.pi), MellinFejer(1.5, 0.25)):
            assert parse_kernel(k.spec) == k
