"""Discrete kernel moments and the structural kernel conditions."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .kernels import KernelSpec, MellinBSpline, MellinFejer
from .truncation import DEFAULT_TRUNCATION, TruncationPolicy, index_window


@dataclass(frozen=True)
class MomentReport:
    order: int
    grid: list[float]
    algebraic: list[float]
    absolute: list[float]
    sup_absolute: float
    # truncated Fejer moments of order >= 1 depend on the window size
    window_dependent: bool = False


@dataclass(frozen=True)
class PoissonReport:
    kmax: int
    values: dict[int, float]
    max_deviation: float
    derivatives: dict[int, float] = field(default_factory=dict)
    max_derivative: float = 0.0
    # True when the transform derivative vanishes at every 2 pi k, i.e. m_1 = 0
    first_moment_condition: bool = False


def _moment_terms(kernel, nu, t, policy):
    win = index_window(kernel, policy, t)
    k = win.indices
    d = k - t
    chi = kernel.at_log(t - k)
    powd = d**nu if nu else np.ones_like(d, dtype=float)
    return chi * powd, np.abs(chi) * np.abs(powd)


def discrete_moment(
    kernel: KernelSpec, nu: int, u: float, policy: TruncationPolicy = DEFAULT_TRUNCATION
) -> tuple[float, float]:
    """Return ``(m_nu(chi, u), M_nu(chi, u))`` over the truncation window."""
    if nu < 0:
        raise ValueError("moment order must be non-negative")
    if not u > 0:
        raise ValueError(f"u must be positive, got {u!r}")
    alg, ab = _moment_terms(kernel, nu, math.log(u), policy)
    return math.fsum(alg), math.fsum(ab)


def moment_report(
    kernel: KernelSpec, nu: int, grid, policy: TruncationPolicy = DEFAULT_TRUNCATION
) -> MomentReport:
    grid = [float(u) for u in grid]
    if not grid:
        raise ValueError("moment grid must be non-empty")
    alg, ab = [], []
    for u in grid:
        m, M = discrete_moment(kernel, nu, u, policy)
        alg.append(m)
        ab.append(M)
    return MomentReport(
        order=nu,
        grid=grid,
        algebraic=alg,
        absolute=ab,
        sup_absolute=max(ab),
        window_dependent=isinstance(kernel, MellinFejer) and nu >= 1,
    )


def period_grid(points: int = 257) -> np.ndarray:
    """Grid covering one period of ``u -> m_nu(chi, u)``, i.e. ``log u`` in [0, 1]."""
    return np.exp(np.linspace(0.0, 1.0, points))


def sup_moment(kernel: KernelSpec, nu: int, policy: TruncationPolicy = DEFAULT_TRUNCATION,
               points: int | None = None) -> float:
    """Estimate ``M_nu(chi) = sup_u M_nu(chi, u)``; moments are 1-periodic in log u.

    The default grid is 257 points for compact kernels and 33 otherwise, where
    each point costs a full (possibly 10^5-term) window.  Results are memoized.
    """
    if points is None:
        points = 257 if isinstance(kernel, MellinBSpline) else 33
    return _sup_moment_cached(kernel, nu, policy, points)


@functools.lru_cache(maxsize=256)
def _sup_moment_cached(kernel, nu, policy, points):
    return moment_report(kernel, nu, period_grid(points), policy).sup_absolute


def partition_of_unity_check(
    kernel: KernelSpec, x: float, w: float, policy: TruncationPolicy = DEFAULT_TRUNCATION
) -> float:
    """``sum_k chi(e^{-k} x^w)``; equals 1 for an admissible kernel."""
    if not (x > 0 and w > 0):
        raise ValueError("x and w must be positive")
    t = w * math.log(x)
    k = index_window(kernel, policy, t).indices
    return math.fsum(kernel.at_log(t - k))


def poisson_condition_check(kernel: KernelSpec, kmax: int) -> PoissonReport:
    """Evaluate the closed-form transform at ``2 pi k``, ``|k| <= kmax``.

    By Mellin-Poisson summation the partition of unity holds iff these values
    are ``delta_{k0}``, and the first moment vanishes iff the transform
    derivative is zero at every ``2 pi k``.
    """
    ks = list(range(-kmax, kmax + 1))
    m = np.array(ks, dtype=float)
    if isinstance(kernel, MellinBSpline):
        vals = kernel.mellin_transform_cycles(m)
        der = kernel.mellin_transform_derivative_cycles(m)
    else:
        vals = kernel.mellin_transform(2 * np.pi * m)
        der = kernel.mellin_transform_derivative(2 * np.pi * m)
    vals = np.asarray(vals, dtype=float)
    der = np.asarray(der, dtype=float)
    target = np.array([1.0 if k == 0 else 0.0 for k in ks])
    dev = float(np.max(np.abs(vals - target)))

    if isinstance(kernel, MellinFejer):
        # one-sided slopes -+1/alpha at the kink t = 0
        der = np.where(np.isnan(der), 1.0 / kernel.alpha, der)
    max_der = float(np.max(np.abs(der)))
    return PoissonReport(
        kmax=kmax,
        values={k: float(v) for k, v in zip(ks, vals)},
        max_deviation=dev,
        derivatives={k: float(d) for k, d in zip(ks, der)},
        max_derivative=max_der,
        first_moment_condition=max_der == 0.0,
    )
