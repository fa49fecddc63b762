import math

import numpy as np
import pytest

from expsamp import (
    MellinBSpline,
    MellinDerivativeSpec,
    MellinFejer,
    OperatorParams,
    Piece,
    PiecewiseSignal,
    WindowTerms,
    kantorovich_apply,
    modulus_bound_check,
    representation_decompose,
    saturation_estimate,
    sup_error_grid,
    voronovskaya_residual,
)
from expsamp.signals import CallableFormula, constant_signal, f1_signal, f2_signal, log_signal

B2, B3 = MellinBSpline(2), MellinBSpline(3)
F2Z = f2_signal(strict=True)


class TestVoronovskaya:
    @pytest.mark.parametrize("n", range(2, 6))
    def test_log_is_exact(self, n):
        for w in (1.0, 5.0, 40.0):
            for x in (0.3, 1.0, 5.0):
                r = voronovskaya_residual(MellinBSpline(n), log_signal(), OperatorParams(w), x)
                assert abs(r.residual) <= 1e-12
                assert r.moment_condition

    def test_constant(self):
        r = voronovskaya_residual(B3, constant_signal(4.0), OperatorParams(20), 2.0)
        assert abs(r.residual) <= 1e-12

    def test_f2_decreases_at_two(self):
        res = [abs(voronovskaya_residual(B3, F2Z, OperatorParams(w), 2.0).residual)
               for w in (20.0, 40.0, 80.0)]
        assert res[0] > res[1] > res[2]

    def test_matches_definition(self):
        w, x = 30.0, 1.7
        r = voronovskaya_residual(B3, F2Z, OperatorParams(w), x)
        direct = w * (kantorovich_apply(B3, F2Z, OperatorParams(w), x) - math.cos(x)) \
            + x * math.sin(x) / 2
        assert r.residual == pytest.approx(direct, abs=1e-12)

    def test_fejer_flagged(self):
        r = voronovskaya_residual(MellinFejer(math.pi), log_signal(),
                                  OperatorParams(10, WindowTerms(500)), 2.0)
        assert not r.moment_condition
        assert not voronovskaya_residual(MellinBSpline(1), log_signal(),
                                         OperatorParams(10), 2.0).moment_condition

    def test_fd_derivative_option(self):
        s = PiecewiseSignal((Piece(0.0, math.inf, CallableFormula(np.log)),))
        r = voronovskaya_residual(B2, s, OperatorParams(10), 2.0, MellinDerivativeSpec(1, 1e-4))
        assert abs(r.residual) <= 1e-7


class TestModulusBound:
    def test_log_example(self):
        grid = np.exp(np.linspace(-1, 1.5, 40)).tolist()
        rep = modulus_bound_check(B2, log_signal(), OperatorParams(10), grid)
        assert rep.omega == pytest.approx(0.1, rel=1e-12)
        assert rep.max_error == pytest.approx(0.05, abs=1e-12)
        assert rep.lam >= 1.0
        assert rep.holds

    @pytest.mark.parametrize("w", [5.0, 10.0, 40.0])
    def test_log_b2(self, w):
        grid = np.exp(np.linspace(-2, 2, 60)).tolist()
        rep = modulus_bound_check(B2, log_signal(), OperatorParams(w), grid)
        assert rep.holds and not rep.window_dependent

    def test_constant(self):
        rep = modulus_bound_check(B2, constant_signal(3.0), OperatorParams(10), [0.5, 1, 2])
        assert rep.omega == 0.0 and rep.max_error <= 1e-14 and rep.holds

    def test_f2_interior(self):
        grid = np.exp(np.linspace(math.log(1.5), math.log(3.5), 80)).tolist()
        rep = modulus_bound_check(B3, F2Z, OperatorParams(40), grid)
        assert rep.holds
        assert rep.m0 == pytest.approx(1.0, abs=1e-12)

    def test_fejer_marked(self):
        rep = modulus_bound_check(MellinFejer(math.pi), log_signal(),
                                  OperatorParams(10, WindowTerms(200)), [1.0, 2.0])
        assert rep.window_dependent


class TestRepresentation:
    def test_log_example(self):
        rep = representation_decompose(B2, log_signal(), OperatorParams(10), 2, math.e)
        assert rep.terms[0] == pytest.approx(1.0, abs=1e-14)
        assert rep.terms[1] == pytest.approx(1 / 20, abs=1e-15)
        assert abs(rep.remainder) <= 1e-14
        assert rep.direct == pytest.approx(1.05, abs=1e-14)

    def test_constant(self):
        rep = representation_decompose(B3, constant_signal(2.0), OperatorParams(7), 1, 1.3)
        assert rep.terms == [pytest.approx(2.0, abs=1e-14)]
        assert rep.remainder == 0.0

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("name", ["log", "f2z", "cos"])
    def test_identity(self, n, name):
        from expsamp import parse_signal
        s = parse_signal(name)
        for w in (10.0, 40.0):
            for x in (1.5, 2.0, 3.0):
                rep = representation_decompose(B3, s, OperatorParams(w), n, x)
                assert abs(rep.reconstruction - rep.direct) <= 1e-10

    def test_remainder_bound_example(self):
        rep = representation_decompose(B3, F2Z, OperatorParams(40), 1, 2.0)
        assert rep.smooth
        assert abs(rep.remainder) <= rep.remainder_bound

    def test_remainder_shrinks_with_order(self):
        r = [abs(representation_decompose(B3, F2Z, OperatorParams(40), n, 2.0).remainder)
             for n in (1, 2, 3)]
        assert r[0] > r[1] > r[2]

    def test_breakpoint_in_window(self):
        rep = representation_decompose(B3, F2Z, OperatorParams(10), 1, 1.05)
        assert not rep.smooth
        assert rep.remainder_bound == math.inf
        assert abs(rep.reconstruction - rep.direct) <= 1e-10

    def test_callable_rejected(self):
        s = PiecewiseSignal((Piece(0.0, math.inf, CallableFormula(np.sqrt)),))
        with pytest.raises(ValueError, match="fd_step"):
            representation_decompose(B2, s, OperatorParams(10), 1, 2.0)
        with pytest.raises(ValueError):
            representation_decompose(B2, log_signal(), OperatorParams(10), 0, 2.0)


class TestSaturation:
    def test_log_exact_rate(self):
        est = saturation_estimate(B2, log_signal(), [5, 10, 20, 40, 80], xs=[0.5, 1.0, 3.0])
        assert est.exponent == pytest.approx(-1.0, abs=1e-9)
        assert est.intercept == pytest.approx(math.log(0.5), abs=1e-9)
        np.testing.assert_allclose(est.errors, [1 / (2 * w) for w in est.ws], rtol=1e-9)

    def test_log_guarded_grid(self):
        est = saturation_estimate(B2, log_signal(), [5, 10, 20, 40, 80])
        assert abs(est.exponent + 1) <= 0.01

    def test_constant_degenerate(self):
        est = saturation_estimate(B3, constant_signal(1.0), [5, 10, 20])
        assert est.degenerate and math.isnan(est.exponent)

    def test_f1_table_points(self):
        est = saturation_estimate(B3, f1_signal(), [5, 40, 70], xs=[1.1, 1.8, 2.9, 3.8])
        assert -1.15 <= est.exponent <= -0.85

    @pytest.mark.parametrize("ws", [[5, 10], [10, 5, 20], [5, 5, 10]])
    def test_bad_ws(self, ws):
        with pytest.raises(ValueError):
            saturation_estimate(B2, log_signal(), ws)

    def test_guard_band(self):
        w = 10.0
        grid = np.array(sup_error_grid(f1_signal(), w))
        for b in f1_signal().breakpoints:
            assert np.all(np.abs(np.log(grid) - math.log(b)) >= 2 / w)
        assert grid.min() >= 0.5 and grid.max() <= 4.0 + 1e-12

    def test_degenerate_threshold_scales_with_signal(self):
        est = saturation_estimate(MellinBSpline(2), constant_signal(-3.5e3), [5, 10, 20])
        assert est.degenerate
