"""Truncation of the bilateral sums over k."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .kernels import KernelSpec, MellinBSpline, MellinFejer


class TruncationError(ValueError):
    """A truncation policy that cannot be applied to the given kernel."""


@dataclass(frozen=True)
class ExactSupport:
    """Sum over every k where the kernel is non-zero (compact kernels only)."""


@dataclass(frozen=True)
class WindowTerms:
    """Sum over ``|k - round(t)| <= half_width``."""

    half_width: int

    def __post_init__(self):
        if self.half_width < 1:
            raise ValueError("half_width must be a positive integer")


@dataclass(frozen=True)
class TailTolerance:
    """Pick the smallest window whose discarded kernel mass is at most ``tol``."""

    tol: float

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")


TruncationPolicy = Union[ExactSupport, WindowTerms, TailTolerance]

DEFAULT_TRUNCATION = TailTolerance(1e-6)


@dataclass(frozen=True)
class IndexWindow:
    """Inclusive range ``lo..hi`` of summation indices and a bound on the
    discarded ``sum |chi|`` outside it."""

    lo: int
    hi: int
    tail_bound: float

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1, dtype=np.int64)

    def __len__(self):
        return max(0, self.hi - self.lo + 1)


def fejer_tail_bound(alpha: float, half_width: int) -> float:
    """Bound on ``sum |F_alpha^0(e^{t-k})|`` over k outside ``round(t) +- half_width``.

    With ``|F| <= 2/(pi alpha s^2)`` and every discarded ``|s| >= K + 1/2``,
    each side is at most ``2/(pi alpha) * sum_{j>=0} (K + 1/2 + j)^-2 <= 2/(pi alpha K)``.
    """
    return 4.0 / (math.pi * alpha * half_width)


def fejer_half_width(alpha: float, tol: float) -> int:
    return max(1, math.ceil(4.0 / (math.pi * alpha * tol)))


def parse_truncation(spec: str) -> TruncationPolicy:
    """``exact``, ``terms:K`` or ``tol:T``."""
    s = spec.strip().lower()
    if s == "exact":
        return ExactSupport()
    head, _, arg = s.partition(":")
    if head == "terms" and arg:
        return WindowTerms(int(arg))
    if head == "tol" and arg:
        return TailTolerance(float(arg))
    raise ValueError(f"bad truncation spec {spec!r}; expected exact, terms:K or tol:T")


def truncation_spec(policy: TruncationPolicy) -> str:
    if isinstance(policy, ExactSupport):
        return "exact"
    if isinstance(policy, WindowTerms):
        return f"terms:{policy.half_width}"
    return f"tol:{policy.tol!r}"


def _center(t: float) -> int:
    return math.floor(t + 0.5)


def index_window(kernel: KernelSpec, policy: TruncationPolicy, t: float) -> IndexWindow:
    """Indices k to sum for ``sum_k chi(e^{t-k}) ...`` under ``policy``."""
    if isinstance(kernel, MellinBSpline):
        r = kernel.support_log_radius
        lo, hi = math.floor(t - r), math.ceil(t + r)
        if isinstance(policy, WindowTerms):
            k0 = _center(t)
            wlo, whi = k0 - policy.half_width, k0 + policy.half_width
            covered = wlo <= lo and whi >= hi
            return IndexWindow(wlo, whi, 0.0 if covered else math.inf)
        return IndexWindow(lo, hi, 0.0)

    if isinstance(kernel, MellinFejer):
        if isinstance(policy, ExactSupport):
            raise TruncationError("ExactSupport needs a compactly supported kernel; Fejer is not")
        if isinstance(policy, TailTolerance):
            if kernel.c != 0:
                raise TruncationError("tail bound is only available for the Fejer kernel with c = 0")
            K = fejer_half_width(kernel.alpha, policy.tol)
        else:
            K = policy.half_width
        bound = fejer_tail_bound(kernel.alpha, K) if kernel.c == 0 else math.inf
        k0 = _center(t)
        return IndexWindow(k0 - K, k0 + K, bound)

    raise TypeError(f"unknown kernel {kernel!r}")
