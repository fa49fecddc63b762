"""Mellin B-spline and Mellin-Fejer kernels.

Kernels are evaluated either at a point ``x > 0`` or, more usefully for the
sampling sums, at a log-argument ``s = log x``.  A sum such as
``sum_k chi(e^{-k} x^w)`` then becomes ``sum_k chi.at_log(w*log(x) - k)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

MAX_BSPLINE_ORDER = 20

# below this |v| the sinc series 1 - (pi v)^2/6 is used
_SINC_SERIES_CUTOFF = 1e-8


class Decay(enum.Enum):
    COMPACT = "compact"
    INVERSE_SQUARE_LOG = "inverse-square-log"


def _check_positive(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(arr > 0):
        raise ValueError(f"{name} must be positive, got {x!r}")
    return arr


def _truncated_power(y, p):
    """(y)_+^p, with the Heaviside convention H(0) = 1/2 for p = 0."""
    if p == 0:
        return np.where(y > 0, 1.0, np.where(y == 0, 0.5, 0.0))
    return np.where(y > 0, y, 0.0) ** p


def sinc(v):
    """Normalized sinc, sin(pi v)/(pi v), with sinc(0) = 1."""
    v = np.asarray(v, dtype=float)
    small = np.abs(v) < _SINC_SERIES_CUTOFF
    safe = np.where(small, 1.0, v)
    out = np.sin(np.pi * safe) / (np.pi * safe)
    return np.where(small, 1.0 - (np.pi * v) ** 2 / 6.0, out)


def _sinpi(x):
    """sin(pi x), exactly zero at integers."""
    x = np.asarray(x, dtype=float)
    r = x - 2.0 * np.rint(x / 2.0)  # r in [-1, 1]
    r = np.where(r > 0.5, 1.0 - r, np.where(r < -0.5, -1.0 - r, r))
    return np.sin(np.pi * r)


def _cospi(x):
    x = np.asarray(x, dtype=float)
    return _sinpi(x + 0.5)


def _sinc_exact(m):
    m = np.asarray(m, dtype=float)
    safe = np.where(m == 0, 1.0, m)
    return np.where(m == 0, 1.0, _sinpi(safe) / (np.pi * safe))


def bspline_at_log(order, s):
    """Centered B-spline of the given order at log-argument ``s``.

    Uses the truncated-power representation

        1/(n-1)! * sum_{j=0}^{n} (-1)^j C(n, j) (n/2 + s - j)_+^{n-1}

    evaluated at ``-|s|`` (the function is even), which keeps the number of
    non-zero terms, and hence cancellation, small.
    """
    n = int(order)
    s = np.asarray(s, dtype=float)
    y = -np.abs(s)
    acc = np.zeros_like(y)
    for j in range(n + 1):
        acc = acc + (-1) ** j * math.comb(n, j) * _truncated_power(n / 2 + y - j, n - 1)
    acc = acc / math.factorial(n - 1)
    r = n / 2
    inside = np.abs(s) < r
    if n == 1:
        inside = inside | (np.abs(s) == r)
    return np.where(inside, acc, 0.0)


def fejer_at_log(alpha, c, s):
    """Mellin-Fejer kernel at log-argument ``s``: alpha/(2 pi) e^{-cs} sinc^2(alpha s / 2pi)."""
    s = np.asarray(s, dtype=float)
    out = alpha / (2 * np.pi) * sinc(alpha * s / (2 * np.pi)) ** 2
    if c != 0:
        out = out * np.exp(-c * s)
    return out


@dataclass(frozen=True)
class MellinBSpline:
    """Mellin B-spline of order ``order``; support is ``|log x| <= order/2``."""

    order: int

    def __post_init__(self):
        if int(self.order) != self.order or not 1 <= self.order <= MAX_BSPLINE_ORDER:
            raise ValueError(
                f"B-spline order must be an integer in [1, {MAX_BSPLINE_ORDER}], got {self.order!r}"
            )

    decay = Decay.COMPACT

    @property
    def support_log_radius(self) -> float:
        return self.order / 2

    @property
    def first_moment_vanishes(self) -> bool:
        # sinc^n has a zero of order n at 2 pi k, so its derivative vanishes there iff n >= 2
        return self.order >= 2

    @property
    def spec(self) -> str:
        return f"bspline:{self.order}"

    def at_log(self, s):
        return bspline_at_log(self.order, s)

    def __call__(self, x):
        x = _check_positive(x)
        out = self.at_log(np.log(x))
        return float(out) if out.ndim == 0 else out

    def mellin_transform(self, t):
        return self.mellin_transform_cycles(np.asarray(t, dtype=float) / (2 * np.pi))

    def mellin_transform_cycles(self, m):
        """Transform at ``t = 2 pi m``; exact zeros at non-zero integers ``m``."""
        return _sinc_exact(m) ** self.order

    def mellin_transform_derivative(self, t):
        return self.mellin_transform_derivative_cycles(np.asarray(t, dtype=float) / (2 * np.pi))

    def mellin_transform_derivative_cycles(self, m):
        """d/dt of the transform, evaluated at ``t = 2 pi m``."""
        m = np.asarray(m, dtype=float)
        g = _sinc_exact(m)
        safe = np.where(m == 0, 1.0, m)
        dg = np.where(m == 0, 0.0, _cospi(safe) / safe - _sinpi(safe) / (np.pi * safe**2))
        n = self.order
        lead = g ** (n - 1) if n > 1 else np.ones_like(g)
        return n * lead * dg / (2 * np.pi)


@dataclass(frozen=True)
class MellinFejer:
    """Mellin-Fejer kernel F_alpha^c.

    The kernel decays like 1/log(x)^2, so sampling sums over it must be
    truncated; only ``c = 0`` gives a summable partition of unity.
    """

    alpha: float
    c: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"Fejer alpha must be positive, got {self.alpha!r}")

    decay = Decay.INVERSE_SQUARE_LOG
    support_log_radius = None
    first_moment_vanishes = False

    @property
    def spec(self) -> str:
        return f"fejer:{self.alpha!r}:{self.c!r}"

    def at_log(self, s):
        return fejer_at_log(self.alpha, self.c, s)

    def __call__(self, x):
        x = _check_positive(x)
        out = self.at_log(np.log(x))
        return float(out) if out.ndim == 0 else out

    def mellin_transform(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(np.abs(t) <= self.alpha, 1.0 - np.abs(t) / self.alpha, 0.0)

    def mellin_transform_derivative(self, t):
        """Derivative of the triangular transform; NaN at the kinks 0 and +-alpha."""
        t = np.asarray(t, dtype=float)
        a = np.abs(t)
        out = np.where(a < self.alpha, -np.sign(t) / self.alpha, 0.0)
        return np.where((t == 0) | (a == self.alpha), np.nan, out)


KernelSpec = Union[MellinBSpline, MellinFejer]


def eval_bspline(order: int, x: float) -> float:
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    return MellinBSpline(order)(x)


def eval_fejer(alpha: float, c: float, x: float) -> float:
    return MellinFejer(alpha, c)(x)


def kernel_eval(kernel: KernelSpec, x):
    return kernel(x)


def mellin_transform_closed_form(kernel: KernelSpec, t):
    out = kernel.mellin_transform(t)
    return float(out) if np.ndim(out) == 0 else out


def numerical_mellin_transform(kernel: KernelSpec, t: float, nodes: int = 32) -> complex:
    """Mellin transform at ``s = it`` by Gauss-Legendre quadrature in log scale.

    Integrates ``e^{its} chi(e^s)`` over each unit knot interval of the
    B-spline support, so the piecewise-polynomial kernel is never straddled.
    """
    if not isinstance(kernel, MellinBSpline):
        raise ValueError("numerical transform needs a compactly supported kernel")
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    r = kernel.support_log_radius
    left = -r + np.arange(kernel.order)
    mid = (left + 0.5)[:, None]
    s = mid + 0.5 * xg[None, :]
    vals = kernel.at_log(s) * 0.5 * wg[None, :]
    re = math.fsum((vals * np.cos(t * s)).ravel())
    im = math.fsum((vals * np.sin(t * s)).ravel())
    return complex(re, im)


def parse_kernel(spec: str) -> KernelSpec:
    """Parse ``bspline:<order>`` or ``fejer:<alpha>:<c>`` (``pi`` allowed for alpha)."""
    parts = spec.strip().lower().split(":")
    if parts[0] == "bspline" and len(parts) == 2:
        return MellinBSpline(int(parts[1]))
    if parts[0] == "fejer" and len(parts) in (2, 3):
        alpha = _parse_real(parts[1])
        c = _parse_real(parts[2]) if len(parts) == 3 else 0.0
        return MellinFejer(alpha, c)
    raise ValueError(f"bad kernel spec {spec!r}; expected bspline:<n> or fejer:<alpha>:<c>")


def _parse_real(tok: str) -> float:
    tok = tok.strip()
    if tok in ("pi", "π"):
        return math.pi
    if tok.endswith("pi"):
        return float(tok[:-2].rstrip("*")) * math.pi
    return float(tok)
