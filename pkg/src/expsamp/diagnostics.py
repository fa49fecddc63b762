"""Convergence diagnostics for the Kantorovich operator.

Each function turns one asymptotic statement into a finite computation: the
Voronovskaya residual, the modulus-of-continuity bound, the decomposition
into classical sampling terms plus remainder, and a log-log decay rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import KernelSpec, MellinBSpline
from .moments import sup_moment
from .operators import (
    OperatorParams,
    _window,
    apply_on_grid,
    kantorovich_apply,
    sample_sum,
)
from .signals import MellinDerivativeSpec, PiecewiseSignal, log_modulus, mellin_derivative

DEGENERATE_ERROR = 1e-14
# absolute slack for bound checks whose right-hand side can be exactly 0
ROUNDOFF_ALLOWANCE = 1e-12
SUP_GRID_PER_DECADE = 512


@dataclass(frozen=True)
class VoronovskayaResult:
    residual: float
    w: float
    x: float
    # False when the kernel's first moment does not vanish; the limit is then not predicted
    moment_condition: bool = True


def voronovskaya_residual(kernel: KernelSpec, signal: PiecewiseSignal, params: OperatorParams,
                          x: float, derivative: MellinDerivativeSpec | None = None
                          ) -> VoronovskayaResult:
    """``w [I_w f(x) - f(x)] - theta f(x) / 2``."""
    spec = derivative or MellinDerivativeSpec(1)
    theta_f = mellin_derivative(signal, spec, x)
    err = kantorovich_apply(kernel, signal, params, x) - signal(x)
    return VoronovskayaResult(
        residual=params.w * err - theta_f / 2,
        w=params.w,
        x=x,
        moment_condition=kernel.first_moment_vanishes,
    )


@dataclass(frozen=True)
class ModulusBoundReport:
    w: float
    xs: list[float]
    errors: list[float]
    max_error: float
    m0: float
    m1: float
    lam: float
    omega: float
    bound: float
    holds: bool
    window_dependent: bool


def kernel_reach(kernel: KernelSpec, w: float) -> float | None:
    """Log-distance from x beyond which no node or cell contributes, if finite."""
    if isinstance(kernel, MellinBSpline):
        return (kernel.support_log_radius + 1) / w
    return None


def modulus_bound_check(kernel: KernelSpec, signal: PiecewiseSignal, params: OperatorParams,
                        xs, grid_density: int = 4,
                        atol: float = ROUNDOFF_ALLOWANCE) -> ModulusBoundReport:
    """Compare ``max |I_w f - f|`` on ``xs`` with ``(M_0 + M_1) omega(f, 1/w)``.

    The modulus is taken over the part of the half-line the operator actually
    reads at the points ``xs``; for kernels without compact support that is
    the default range of the signal.  ``atol`` absorbs rounding when the
    bound is 0 (constant signals).
    """
    xs = [float(x) for x in xs]
    w = params.w
    approx = apply_on_grid(kernel, signal, params, xs)
    errors = [abs(a - float(signal(x))) for a, x in zip(approx, xs)]
    m0 = sup_moment(kernel, 0, params.truncation)
    m1 = sup_moment(kernel, 1, params.truncation)
    lam = m0 + m1
    reach = kernel_reach(kernel, w)
    if reach is None:
        omega = log_modulus(signal, 1 / w, grid_density)
    else:
        omega = log_modulus(signal, 1 / w, grid_density,
                            lo=min(xs) * math.exp(-reach), hi=max(xs) * math.exp(reach))
    bound = lam * omega
    max_err = max(errors)
    return ModulusBoundReport(
        w=w, xs=xs, errors=errors, max_error=max_err, m0=m0, m1=m1, lam=lam,
        omega=omega, bound=bound, holds=max_err <= bound + atol,
        window_dependent=not isinstance(kernel, MellinBSpline),
    )


@dataclass(frozen=True)
class RepresentationReport:
    n: int
    terms: list[float]
    remainder: float
    reconstruction: float
    direct: float
    # ||theta^n f||_inf M_0 / ((n+1)! w^n), sup taken over the cells in the window
    remainder_bound: float = math.nan
    # False when a breakpoint of f falls inside the weighted cells; the bound
    # then does not apply and is reported as inf
    smooth: bool = True


def _taylor_cell_integral(signal, k, w, n):
    """``w int_{k/w}^{(k+1)/w} P_{n-1,k}(u) du`` with P the Mellin-Taylor
    polynomial of f at ``e^{k/w}``: sum_j theta^j f(e^{k/w}) / ((j+1)! w^j)."""
    u0 = k / w
    total = np.zeros(np.shape(u0))
    for j in range(n):
        total = total + signal.theta_at_log(u0, j) / (math.factorial(j + 1) * w**j)
    return total


def representation_decompose(kernel: KernelSpec, signal: PiecewiseSignal,
                             params: OperatorParams, n: int, x: float,
                             sup_points: int = 4001) -> RepresentationReport:
    """Split ``I_w f(x)`` into classical sampling sums of ``theta^j f`` and a remainder.

    The remainder is the integral-form Taylor defect
    ``sum_k chi w int (f(e^u) - P_{n-1,k}(u)) du``, computed directly rather
    than through the mean-value point.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not signal.has_closed_form_derivatives:
        raise ValueError(
            f"signal {signal.name!r} lacks closed-form Mellin derivatives; the decomposition "
            "needs them (use a MellinDerivativeSpec with fd_step for point derivatives)"
        )
    w = params.w
    terms = []
    for j in range(n):
        s_j = sample_sum(kernel, lambda u, j=j: signal.theta_at_log(u, j), params, x)
        terms.append(s_j / (math.factorial(j + 1) * w**j))

    t = w * math.log(x)
    lo, hi = _window(kernel, params, t, (-math.inf, math.inf))
    k = np.arange(lo, hi + 1, dtype=np.int64)
    chi = kernel.at_log(t - k)
    exact = w * signal.cell_integrals(k, w, params.quadrature_order)
    defect = exact - _taylor_cell_integral(signal, k, w, n)
    remainder = math.fsum(chi * defect)

    direct = kantorovich_apply(kernel, signal, params, x)

    # sup of |theta^n f| over the cells actually weighted by the kernel
    live = k[chi != 0]
    smooth = True
    if live.size:
        a, b = live[0] / w, (live[-1] + 1) / w
        smooth = not any(a < math.log(bp) < b for bp in signal.breakpoints)
        uu = np.linspace(a, b, sup_points)
        sup_theta = float(np.max(np.abs(signal.theta_at_log(uu, n))))
    else:
        sup_theta = 0.0
    if smooth:
        m0 = sup_moment(kernel, 0, params.truncation)
        rbound = sup_theta * m0 / (math.factorial(n + 1) * w**n)
    else:
        rbound = math.inf

    return RepresentationReport(
        n=n,
        terms=terms,
        remainder=remainder,
        reconstruction=math.fsum(terms + [remainder]),
        direct=direct,
        remainder_bound=rbound,
        smooth=smooth,
    )


@dataclass(frozen=True)
class RateEstimate:
    exponent: float
    intercept: float
    ws: list[float]
    errors: list[float]
    degenerate: bool = False


def sup_error_grid(signal: PiecewiseSignal, w: float, lo: float = 0.5, hi: float = 4.0,
                   per_decade: int = SUP_GRID_PER_DECADE) -> list[float]:
    """Log-uniform grid on ``[lo, hi]`` without the band ``|log x - log b| < 2/w``
    around each breakpoint ``b``."""
    n = max(2, math.ceil(per_decade * math.log10(hi / lo)) + 1)
    grid = np.exp(np.linspace(math.log(lo), math.log(hi), n))
    keep = np.ones(n, dtype=bool)
    for b in signal.breakpoints:
        keep &= np.abs(np.log(grid) - math.log(b)) >= 2 / w
    return grid[keep].tolist()


def sup_error(kernel: KernelSpec, signal: PiecewiseSignal, params: OperatorParams, xs) -> float:
    approx = apply_on_grid(kernel, signal, params, xs)
    return max(abs(a - float(signal(x))) for a, x in zip(approx, xs))


def saturation_estimate(kernel: KernelSpec, signal: PiecewiseSignal, ws, xs=None,
                        truncation=None, quadrature_order: int | None = None) -> RateEstimate:
    """Least-squares slope of ``log max_x |I_w f - f|`` against ``log w``.

    Without ``xs`` the breakpoint-guarded grid of :func:`sup_error_grid` is used
    for each w.  All errors below ``1e-14`` (relative to ``max |f|`` on the grid
    once that exceeds 1) mean f is reproduced exactly and the estimate is
    flagged degenerate.
    """
    ws = [float(w) for w in ws]
    if len(ws) < 3 or any(b <= a for a, b in zip(ws, ws[1:])):
        raise ValueError("need at least three increasing values of w")
    kw = {}
    if truncation is not None:
        kw["truncation"] = truncation
    if quadrature_order is not None:
        kw["quadrature_order"] = quadrature_order
    errors = []
    scale = 1.0
    for w in ws:
        grid = xs if xs is not None else sup_error_grid(signal, w)
        errors.append(sup_error(kernel, signal, OperatorParams(w, **kw), grid))
        scale = max(scale, float(np.max(np.abs(signal(np.asarray(grid, dtype=float))))))
    if max(errors) < DEGENERATE_ERROR * scale:
        return RateEstimate(math.nan, math.nan, ws, errors, degenerate=True)
    slope, intercept = np.polyfit(np.log(ws), np.log(errors), 1)
    return RateEstimate(float(slope), float(intercept), ws, errors)
