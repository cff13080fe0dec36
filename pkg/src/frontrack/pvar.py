"""Maximal p-sums and p-variations of finite sequences and step functions.

For a sequence ``x`` the maximal p-sum is

    s_p(x) = ( sup over partitions of sum_j |sum_{l in block j} x_l|^p )^(1/p)

where a partition cuts ``x`` into consecutive non-empty blocks.  The
p-variation of a sequence of values is the maximal p-sum of its successive
differences, and the p-variation of a step function is the maximal p-sum of
its jumps.

The supremum is computed exactly by a quadratic dynamic program over prefix
optima.  ``opt[j]`` is the best value of the p-sum restricted to the first
``j`` entries; it satisfies ``opt[j] = max_i opt[i] + |P[j] - P[i]|^p`` with
``P`` the prefix sums.  A brute-force enumerator is kept as an oracle.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit
from scipy.special import zeta as _scipy_zeta

from .errors import ConditionError, GuardError, InvalidInputError

BRUTE_FORCE_MAX_LEN = 20


@njit(cache=True)
def _prefix_optima(x, p):
    n = x.shape[0]
    prefix = np.zeros(n + 1)
    for k in range(n):
        prefix[k + 1] = prefix[k] + x[k]
    opt = np.zeros(n + 1)
    for j in range(1, n + 1):
        best = -1.0
        pj = prefix[j]
        for i in range(j):
            val = opt[i] + abs(pj - prefix[i]) ** p
            if val > best:
                best = val
        opt[j] = best
    return opt


def _as_seq(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("sequence contains non-finite entries")
    return arr


def _check_p(p: float) -> float:
    p = float(p)
    if not np.isfinite(p) or p < 1.0:
        raise InvalidInputError(f"exponent p must be >= 1, got {p}")
    return p


def prefix_p_sums(x, p: float) -> np.ndarray:
    """Return ``s_p^p`` of every prefix: entry ``j`` covers ``x[:j]``."""
    arr = _as_seq(x)
    p = _check_p(p)
    if arr.size == 0:
        return np.zeros(1)
    return _prefix_optima(np.ascontiguousarray(arr), p)


def suffix_p_sums(x, p: float) -> np.ndarray:
    """Return ``s_p^p`` of every suffix: entry ``j`` covers ``x[j:]``."""
    arr = _as_seq(x)
    return prefix_p_sums(arr[::-1], p)[::-1].copy()


def max_p_sum_power(x, p: float) -> float:
    """``s_p(x)^p``, the quantity most functionals actually use."""
    return float(prefix_p_sums(x, p)[-1])


def max_p_sum(x, p: float) -> float:
    """Maximal p-sum ``s_p(x)``.  Zero for the empty sequence.

    The sequence is scaled by its largest entry first (``s_p`` is
    1-homogeneous), so tiny or huge entries neither underflow nor overflow.
    """
    arr = _as_seq(x)
    scale = float(np.max(np.abs(arr), initial=0.0))
    if scale == 0.0:
        _check_p(p)
        return 0.0
    return scale * max_p_sum_power(arr / scale, p) ** (1.0 / float(p))


def brute_force_p_sum(x, p: float) -> float:
    """Exhaustive reference for :func:`max_p_sum` (length at most 20)."""
    arr = _as_seq(x)
    p = _check_p(p)
    n = arr.size
    if n > BRUTE_FORCE_MAX_LEN:
        raise GuardError(f"brute force limited to {BRUTE_FORCE_MAX_LEN} entries, got {n}")
    if n == 0:
        return 0.0
    best = 0.0
    for mask in itertools.product((False, True), repeat=n - 1):
        total = 0.0
        block = arr[0]
        for k, cut in enumerate(mask):
            if cut:
                total += abs(block) ** p
                block = arr[k + 1]
            else:
                block += arr[k + 1]
        total += abs(block) ** p
        best = max(best, total)
    return best ** (1.0 / p)


def p_variation_seq(x, p: float) -> float:
    """p-variation ``v_p(x) = s_p(x_2 - x_1, ..., x_n - x_{n-1})``."""
    arr = _as_seq(x)
    if arr.size == 0:
        raise InvalidInputError("p-variation of an empty sequence is undefined")
    return max_p_sum(np.diff(arr), p)


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous piecewise constant map from the real line.

    ``values[k]`` holds on ``[breakpoints[k-1], breakpoints[k])`` with the
    conventions ``breakpoints[-1] = -inf`` and ``breakpoints[len] = +inf``.
    Values may be scalars (shape ``(k+1,)``) or vectors (shape ``(k+1, d)``).
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float).reshape(-1)
        vals = np.asarray(self.values, dtype=float)
        if vals.shape[0] != bp.size + 1:
            raise InvalidInputError("need exactly one more value than breakpoints")
        if bp.size and np.any(np.diff(bp) <= 0):
            raise InvalidInputError("breakpoints must be strictly increasing")
        if not (np.all(np.isfinite(bp)) and np.all(np.isfinite(vals))):
            raise InvalidInputError("step function has non-finite data")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, value):
        return cls(np.zeros(0), np.asarray([value], dtype=float))

    @property
    def n_jumps(self) -> int:
        return self.breakpoints.size

    def jumps(self) -> np.ndarray:
        return np.diff(self.values, axis=0)

    def __call__(self, x):
        idx = np.searchsorted(self.breakpoints, np.asarray(x, dtype=float), side="right")
        return self.values[idx]

    def window_mask(self, window=None) -> np.ndarray:
        if window is None:
            return np.ones(self.n_jumps, dtype=bool)
        a, b = window
        return (self.breakpoints >= a) & (self.breakpoints <= b)

    def simplified(self, atol: float = 0.0) -> "StepFunction":
        """Drop breakpoints whose jump is (numerically) zero."""
        if self.n_jumps == 0:
            return self
        jumps = self.jumps().reshape(self.n_jumps, -1)
        keep = np.max(np.abs(jumps), axis=1) > atol
        values = np.concatenate([self.values[:1], self.values[1:][keep]])
        return StepFunction(self.breakpoints[keep], values)


def p_variation_step(f: StepFunction, p: float, window=None) -> float:
    """p-variation of a scalar step function, optionally restricted to the
    jumps located in the closed interval ``window``."""
    jumps = f.jumps()
    if jumps.ndim != 1:
        raise InvalidInputError("p_variation_step expects a scalar step function")
    return max_p_sum(jumps[f.window_mask(window)], p)


def riemann_jumps(u: StepFunction, chart):
    """Jumps of ``w_1(u)`` and ``w_2(u)`` across the breakpoints of ``u``."""
    vals = np.atleast_2d(u.values)
    w = np.array([chart.w(v) for v in vals])
    dw = np.diff(w, axis=0)
    return dw[:, 0], dw[:, 1]


def vector_p_variation(u: StepFunction, p: float, chart, window=None) -> float:
    """p-variation of a 2-vector step function measured in Riemann coordinates:
    ``(V_p(w_1 o u)^p + V_p(w_2 o u)^p)^(1/p)``."""
    if u.n_jumps == 0:
        return 0.0
    d1, d2 = riemann_jumps(u, chart)
    mask = u.window_mask(window)
    total = max_p_sum_power(d1[mask], p) + max_p_sum_power(d2[mask], p)
    return total ** (1.0 / p)


@lru_cache(maxsize=64)
def zeta(s: float) -> float:
    """Riemann zeta for real ``s > 1``."""
    if s <= 1.0:
        raise ConditionError(f"zeta diverges for s = {s} <= 1")
    return float(_scipy_zeta(s, 1.0))


def zeta_partial_sum(s: float, terms: int = 10**6) -> float:
    """Independent zeta evaluation: partial sum plus Euler-Maclaurin tail."""
    k = np.arange(1, terms + 1, dtype=float)
    head = np.sum(k[::-1] ** (-s))
    n = float(terms)
    tail = n ** (1.0 - s) / (s - 1.0) - 0.5 * n ** (-s) + s * n ** (-s - 1.0) / 12.0
    return float(head + tail)


@dataclass(frozen=True)
class LoveYoungReport:
    lhs: float
    rhs: float
    holds: bool


def love_young_check(x, y, p: float, q: float) -> LoveYoungReport:
    """Compare ``|sum_{i<=j} x_i y_j|`` against ``(1 + zeta(1/p + 1/q)) s_p(x) s_q(y)``."""
    xs, ys = _as_seq(x), _as_seq(y)
    if xs.size != ys.size:
        raise InvalidInputError("sequences must have equal lengths")
    exponent = 1.0 / p + 1.0 / q
    if exponent <= 1.0:
        raise ConditionError(f"need 1/p + 1/q > 1, got {exponent}")
    lhs = abs(float(np.dot(np.cumsum(xs), ys)))
    rhs = (1.0 + zeta(exponent)) * max_p_sum(xs, p) * max_p_sum(ys, q)
    return LoveYoungReport(lhs, rhs, lhs <= rhs * (1 + 1e-12) + 1e-14)


@dataclass(frozen=True)
class MultiplicativeReport:
    lhs: float
    ratio: float


def multiplicative_bound_check(a, b, p: float) -> MultiplicativeReport:
    """Ratio ``s_p(a b) / (s_p(a) (|b|_inf + v_p(b)))`` for ``p < 2``."""
    aa, bb = _as_seq(a), _as_seq(b)
    if aa.size != bb.size:
        raise InvalidInputError("sequences must have equal lengths")
    if p >= 2:
        raise ConditionError(f"multiplicative bound needs p < 2, got {p}")
    lhs = max_p_sum(aa * bb, p)
    denom = max_p_sum(aa, p) * (np.max(np.abs(bb), initial=0.0) + (p_variation_seq(bb, p) if bb.size else 0.0))
    ratio = lhs / denom if denom > 0 else 0.0
    return MultiplicativeReport(lhs, ratio)
