"""Piecewise test signals on the positive half-line.

A signal is a sorted tuple of pieces ``[lo, hi)`` each carrying a formula;
outside every piece the signal is zero.  Everything the operators need is
expressed in the log variable ``u = log x``: point values ``f(e^u)``, the
integrals ``int_a^b f(e^u) du`` and Mellin derivatives ``theta^j f``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.special import sici

DEFAULT_QUADRATURE_ORDER = 16
DEFAULT_FD_STEP = 1e-5


@lru_cache(maxsize=None)
def gauss_legendre(order: int):
    if order < 1:
        raise ValueError("quadrature order must be positive")
    return np.polynomial.legendre.leggauss(order)


def _gl_integrate(g, a, b, order):
    """Gauss-Legendre rule on each ``[a_i, b_i]``; ``g`` is vectorized in u."""
    xg, wg = gauss_legendre(order)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    # explicit node loop keeps each cell's result independent of batch shape
    acc = np.zeros(np.shape(mid))
    for node, weight in zip(xg, wg):
        acc = acc + weight * g(mid + half * node)
    return half * acc


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


# -- formulas -----------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    value: float

    kind = "const"

    def at_log(self, u):
        return np.full(np.shape(u), float(self.value))

    def integral(self, a, b, order):
        return self.value * (b - a)

    def theta(self, order, x):
        return np.full(np.shape(x), float(self.value) if order == 0 else 0.0)

    def extrema(self, x0, x1):
        v = np.full(np.shape(x0), float(self.value))
        return v, v


@dataclass(frozen=True)
class Log:
    kind = "log"

    def at_log(self, u):
        return np.asarray(u, dtype=float) + 0.0

    def integral(self, a, b, order):
        return 0.5 * (b - a) * (b + a)

    def theta(self, order, x):
        x = np.asarray(x, dtype=float)
        if order == 0:
            return np.log(x)
        return np.full(x.shape, 1.0 if order == 1 else 0.0)

    def extrema(self, x0, x1):
        return np.log(x0), np.log(x1)


@dataclass(frozen=True)
class Reciprocal:
    """``scale / x``."""

    scale: float

    kind = "recip"

    def at_log(self, u):
        return self.scale * np.exp(-np.asarray(u, dtype=float))

    def integral(self, a, b, order):
        # s (e^{-a} - e^{-b}) without cancellation for short cells
        return -self.scale * np.exp(-a) * np.expm1(-(b - a))

    def theta(self, order, x):
        return (-1) ** order * self.scale / np.asarray(x, dtype=float)

    def extrema(self, x0, x1):
        v0, v1 = self.scale / x0, self.scale / x1
        return np.minimum(v0, v1), np.maximum(v0, v1)


@dataclass(frozen=True)
class CosOfX:
    """``cos x``.

    Cells are integrated by Gauss-Legendre; once the phase ``e^u`` sweeps more
    than half a period inside a cell the rule no longer resolves it and the
    exact ``Ci(e^b) - Ci(e^a)`` is used instead.
    """

    kind = "cos"

    def at_log(self, u):
        with np.errstate(over="ignore", invalid="ignore"):
            x = np.exp(np.asarray(u, dtype=float))
            # beyond float range cos(e^u) carries no information; sample as 0
            return np.where(np.isfinite(x), np.cos(x), 0.0)

    def integral(self, a, b, order):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            sweep = np.exp(b) - np.exp(a)
        resolved = sweep <= np.pi
        out = np.empty(np.shape(a))
        if np.any(resolved):
            out[resolved] = _gl_integrate(self.at_log, a[resolved], b[resolved], order)
        if np.any(~resolved):
            with np.errstate(over="ignore"):
                _, ci_b = sici(np.exp(b[~resolved]))
                _, ci_a = sici(np.exp(a[~resolved]))
            out[~resolved] = ci_b - ci_a
        return out

    def theta(self, order, x):
        x = np.asarray(x, dtype=float)
        if order == 0:
            return np.cos(x)
        # theta^j = sum_m S(j, m) x^m D^m,  D^m cos x = cos(x + m pi/2)
        return sum(
            _stirling2(order, m) * x**m * np.cos(x + m * np.pi / 2) for m in range(1, order + 1)
        )

    def extrema(self, x0, x1):
        c0, c1 = np.cos(x0), np.cos(x1)
        lo, hi = np.minimum(c0, c1), np.maximum(c0, c1)
        two_pi = 2 * np.pi
        has_max = np.floor(x1 / two_pi) >= np.ceil(x0 / two_pi)
        has_min = np.floor((x1 - np.pi) / two_pi) >= np.ceil((x0 - np.pi) / two_pi)
        return np.where(has_min, -1.0, lo), np.where(has_max, 1.0, hi)


@dataclass(frozen=True)
class CallableFormula:
    """User-supplied vectorized ``func(x)``; no closed-form Mellin derivatives."""

    func: Callable
    kind = "callable"

    def at_log(self, u):
        return np.asarray(self.func(np.exp(np.asarray(u, dtype=float))), dtype=float)

    def integral(self, a, b, order):
        return _gl_integrate(self.at_log, np.asarray(a, float), np.asarray(b, float), order)

    def theta(self, order, x):
        if order == 0:
            return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)
        raise NotImplementedError("no closed-form Mellin derivative")

    def extrema(self, x0, x1):
        s = np.linspace(0.0, 1.0, 65)
        xs = np.exp(np.log(x0)[:, None] * (1 - s) + np.log(x1)[:, None] * s)
        v = self.func(xs)
        return v.min(axis=1), v.max(axis=1)


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    formula: object

    @property
    def log_lo(self) -> float:
        return -math.inf if self.lo == 0 else math.log(self.lo)

    @property
    def log_hi(self) -> float:
        return math.log(self.hi)


@dataclass(frozen=True)
class MellinDerivativeSpec:
    """Order ``j`` of ``theta^j f``; ``fd_step=None`` selects the closed form,
    otherwise central differences in ``log x`` with that step."""

    order: int = 1
    fd_step: float | None = None


class NonSmoothPoint(ValueError):
    pass


@dataclass(frozen=True)
class PiecewiseSignal:
    pieces: tuple[Piece, ...]
    name: str = "custom"

    def __post_init__(self):
        prev_hi = 0.0
        for p in self.pieces:
            if not (0 <= p.lo < p.hi):
                raise ValueError(f"bad piece interval [{p.lo}, {p.hi})")
            if p.lo < prev_hi:
                raise ValueError("pieces must be ordered and disjoint")
            prev_hi = p.hi

    @property
    def breakpoints(self) -> list[float]:
        pts = {e for p in self.pieces for e in (p.lo, p.hi) if 0 < e < math.inf}
        return sorted(pts)

    @property
    def log_support(self) -> tuple[float, float]:
        """Smallest ``[a, b]`` in log scale outside which the signal is zero."""
        if not self.pieces:
            return 0.0, 0.0
        return self.pieces[0].log_lo, self.pieces[-1].log_hi

    @property
    def has_closed_form_derivatives(self) -> bool:
        return not any(isinstance(p.formula, CallableFormula) for p in self.pieces)

    # -- evaluation -----------------------------------------------------------

    def at_log(self, u):
        """``f(e^u)``, vectorized."""
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape)
        for p in self.pieces:
            mask = (u >= p.log_lo) & (u < p.log_hi)
            if np.any(mask):
                out[mask] = p.formula.at_log(u[mask])
        return out

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if not np.all(x > 0):
            raise ValueError("signal is defined on x > 0 only")
        out = np.zeros(x.shape)
        for p in self.pieces:
            mask = (x >= p.lo) & (x < p.hi)
            if np.any(mask):
                out[mask] = p.formula.theta(0, x[mask])
        return float(out) if out.ndim == 0 else out

    def exp_integral(self, a, b, quadrature_order: int = DEFAULT_QUADRATURE_ORDER):
        """``int_a^b f(e^u) du`` elementwise, split at every piece boundary."""
        a = np.atleast_1d(np.asarray(a, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        out = np.zeros(np.broadcast(a, b).shape)
        a, b = np.broadcast_arrays(a, b)
        for p in self.pieces:
            aa = np.maximum(a, p.log_lo)
            bb = np.minimum(b, p.log_hi)
            mask = bb > aa
            if np.any(mask):
                out[mask] += p.formula.integral(aa[mask], bb[mask], quadrature_order)
        return out

    def cell_integrals(self, k, w, quadrature_order: int = DEFAULT_QUADRATURE_ORDER):
        """``int_{k/w}^{(k+1)/w} f(e^u) du`` for each index in ``k``."""
        k = np.asarray(k, dtype=float)
        return self.exp_integral(k / w, (k + 1) / w, quadrature_order)

    def theta(self, x, order: int = 1):
        """Closed-form ``theta^order f(x)`` using the piece active at ``x``."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for p in self.pieces:
            mask = (x >= p.lo) & (x < p.hi)
            if np.any(mask):
                try:
                    out[mask] = p.formula.theta(order, x[mask])
                except NotImplementedError:
                    raise ValueError(
                        f"signal {self.name!r} has no closed-form Mellin derivative; "
                        "use MellinDerivativeSpec(order, fd_step=...) for finite differences"
                    ) from None
        return float(out) if out.ndim == 0 else out

    def theta_at_log(self, u, order: int):
        """``theta^order f(e^u)``; masks are taken in log scale so that huge
        or tiny ``u`` still land on the right piece."""
        u = np.asarray(u, dtype=float)
        if order == 0:
            return self.at_log(u)
        out = np.zeros(u.shape)
        for p in self.pieces:
            mask = (u >= p.log_lo) & (u < p.log_hi)
            if not np.any(mask):
                continue
            with np.errstate(over="ignore", invalid="ignore"):
                try:
                    vals = p.formula.theta(order, np.exp(u[mask]))
                except NotImplementedError:
                    raise ValueError(
                        f"signal {self.name!r} has no closed-form Mellin derivative; "
                        "use MellinDerivativeSpec(order, fd_step=...) for finite differences"
                    ) from None
            # same convention as sampling: beyond float range the value is 0
            out[mask] = np.where(np.isfinite(vals), vals, 0.0)
        return out

    def left_limit(self, b: float) -> float:
        """``f(b-)`` at a breakpoint (0 across a gap)."""
        for p in self.pieces:
            if p.hi == b:
                return float(p.formula.theta(0, np.array([b]))[0])
        return 0.0

    # -- range over a log segment ---------------------------------------------

    def segment_range(self, p, q):
        """Exact ``sup f - inf f`` over ``e^u``, ``u in [p, q]`` (vectorized).

        One-sided limits at breakpoints count as attained values, since the
        modulus is a supremum.
        """
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        X0, X1 = np.exp(p), np.exp(q)
        vmax = np.full(p.shape, -np.inf)
        vmin = np.full(p.shape, np.inf)
        for pc in self.pieces:
            x0 = np.maximum(X0, pc.lo)
            x1 = np.minimum(X1, pc.hi)
            ok = x0 <= x1
            if not np.any(ok):
                continue
            # extrema over the closure of [lo, hi): left limits count
            lo_v, hi_v = pc.formula.extrema(x0[ok], x1[ok])
            vmin[ok] = np.minimum(vmin[ok], lo_v)
            vmax[ok] = np.maximum(vmax[ok], hi_v)
        # zero extension enters whenever the segment meets a gap between pieces
        gaps = []
        prev = 0.0
        for pc in self.pieces:
            if pc.lo > prev:
                gaps.append((prev, pc.lo))
            prev = pc.hi
        if prev < math.inf:
            gaps.append((prev, math.inf))
        if not self.pieces:
            gaps = [(0.0, math.inf)]
        for g0, g1 in gaps:
            meets = (X1 >= g0) & (X0 < g1)
            vmin = np.where(meets, np.minimum(vmin, 0.0), vmin)
            vmax = np.where(meets, np.maximum(vmax, 0.0), vmax)
        return vmax - vmin

    def describe(self) -> str:
        return self.name


# -- operations ----------------------------------------------------------------


def signal_eval(signal: PiecewiseSignal, x: float) -> float:
    return signal(x)


def exp_mean(signal: PiecewiseSignal, a: float, b: float,
             quadrature_order: int = DEFAULT_QUADRATURE_ORDER) -> float:
    """``int_a^b f(e^u) du`` (the caller normalizes by ``b - a``)."""
    if not a < b:
        raise ValueError("need a < b")
    return float(signal.exp_integral(a, b, quadrature_order)[0])


def mellin_derivative(signal: PiecewiseSignal, spec: MellinDerivativeSpec, x: float) -> float:
    """``theta^j f(x)`` in closed form or by central differences in log x."""
    if not x > 0:
        raise ValueError("x must be positive")
    j = spec.order
    if spec.fd_step is None:
        return signal.theta(x, j)
    if j == 0:
        return signal(x)
    h = spec.fd_step
    t = math.log(x)
    reach = j * h / 2
    for b in signal.breakpoints:
        if abs(math.log(b) - t) <= reach:
            raise NonSmoothPoint(f"non-smooth point: breakpoint {b} within the difference stencil at x={x}")
    # central difference of order j: sum_i (-1)^i C(j, i) g(t + (j/2 - i) h) / h^j
    offs = np.array([(j / 2 - i) * h for i in range(j + 1)])
    g = signal.at_log(t + offs)
    coef = np.array([(-1) ** i * math.comb(j, i) for i in range(j + 1)], dtype=float)
    return math.fsum(coef * g) / h**j


def default_log_range(signal: PiecewiseSignal) -> tuple[float, float]:
    bps = signal.breakpoints
    if bps:
        return math.log(bps[0]) - 1.0, math.log(bps[-1]) + 1.0
    return -3.0, 3.0


def log_modulus(signal: PiecewiseSignal, delta: float, grid_density: int = 1,
                lo: float | None = None, hi: float | None = None) -> float:
    """Lower estimate of ``omega(f, delta)`` on ``[lo, hi]`` (x-coordinates).

    Anchors sit on a log-uniform grid with ``64 * grid_density`` points per
    decade, plus one segment centred on every breakpoint.  Each anchor
    contributes the exact range of f over a log-segment of length ``delta``,
    so the estimate is non-decreasing in ``delta``.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    tlo, thi = default_log_range(signal)
    if lo is not None:
        tlo = math.log(lo)
    if hi is not None:
        thi = math.log(hi)
    h = math.log(10.0) / (64 * grid_density)
    n = max(2, math.ceil((thi - tlo) / h) + 1)
    anchors = tlo + h * np.arange(n)
    best = float(np.max(signal.segment_range(anchors, anchors + delta)))
    tb = np.array([math.log(b) for b in signal.breakpoints if tlo - delta <= math.log(b) <= thi + delta])
    if tb.size:
        best = max(best, float(np.max(signal.segment_range(tb - delta / 2, tb + delta / 2))))
    return best


# -- built-ins and parsing -------------------------------------------------------

_KIND_ALIASES = {
    "const": "const", "constant": "const", "zero": "zero",
    "log": "log",
    "recip": "recip", "reciprocal": "recip",
    "cos": "cos", "cosofx": "cos",
}


def constant_signal(v: float) -> PiecewiseSignal:
    return PiecewiseSignal((Piece(0.0, math.inf, Constant(float(v))),), name=f"const:{v!r}")


def log_signal() -> PiecewiseSignal:
    return PiecewiseSignal((Piece(0.0, math.inf, Log()),), name="log")


def cos_signal() -> PiecewiseSignal:
    return PiecewiseSignal((Piece(0.0, math.inf, CosOfX()),), name="cos")


def f1_signal(strict: bool = False) -> PiecewiseSignal:
    """0 on [1/2, 1), -2/x from 1 on; ``strict`` cuts the last piece at 4."""
    hi = 4.0 if strict else math.inf
    return PiecewiseSignal(
        (Piece(0.5, 1.0, Constant(0.0)), Piece(1.0, hi, Reciprocal(-2.0))),
        name="f1z" if strict else "f1",
    )


def f2_signal(strict: bool = False) -> PiecewiseSignal:
    """0 below 1, cos x from 1 on; ``strict`` cuts at 4."""
    hi = 4.0 if strict else math.inf
    return PiecewiseSignal((Piece(1.0, hi, CosOfX()),), name="f2z" if strict else "f2")


def signal_from_dict(obj: dict, name: str = "custom") -> PiecewiseSignal:
    """Build from ``{"pieces": [{"from": a, "to": b, "kind": ..., "v"/"scale": ...}]}``.

    ``"to": null`` (or ``"inf"``) makes the piece unbounded above.
    """
    pieces = []
    for item in obj["pieces"]:
        kind = _KIND_ALIASES.get(str(item["kind"]).lower())
        if kind is None:
            raise ValueError(f"unknown piece kind {item['kind']!r}")
        lo = float(item.get("from", 0.0) or 0.0)
        to = item.get("to")
        hi = math.inf if to is None or to == "inf" else float(to)
        if kind == "const":
            formula = Constant(float(item.get("v", item.get("value", 0.0))))
        elif kind == "zero":
            formula = Constant(0.0)
        elif kind == "log":
            formula = Log()
        elif kind == "recip":
            formula = Reciprocal(float(item.get("scale", item.get("v", 1.0))))
        else:
            formula = CosOfX()
        pieces.append(Piece(lo, hi, formula))
    return PiecewiseSignal(tuple(pieces), name=obj.get("name", name))


def parse_signal(spec: str) -> PiecewiseSignal:
    """``f1``, ``f2``, ``f1z``, ``f2z``, ``log``, ``cos``, ``const:<v>``, a JSON
    descriptor, or ``@path`` to a JSON file."""
    s = spec.strip()
    if s.startswith("@"):
        return signal_from_dict(json.loads(Path(s[1:]).read_text()), name=Path(s[1:]).stem)
    if s.startswith("{"):
        return signal_from_dict(json.loads(s))
    low = s.lower()
    if low == "f1":
        return f1_signal()
    if low == "f1z":
        return f1_signal(strict=True)
    if low == "f2":
        return f2_signal()
    if low == "f2z":
        return f2_signal(strict=True)
    if low == "log":
        return log_signal()
    if low == "cos":
        return cos_signal()
    if low.startswith("const:"):
        return constant_signal(float(low.split(":", 1)[1]))
    raise ValueError(f"bad signal spec {spec!r}")
