"""Temporal signal algebra.

Boolean signals are finite unions of left-closed right-open intervals over a
bounded horizon, kept in normal form (sorted, disjoint, adjacent runs
merged).  Endpoints are exact rationals so that joint interval coverings can
be compared without float-epsilon ambiguity.

Quantitative signals are piecewise-constant extended-real functions sampled
on a uniform grid: sample ``k`` holds the value on ``[k*h, (k+1)*h)``.
Infinities are first-class values (IEEE ``inf``); they arise only from the
empty-set conventions and the padding used by the spatial operators, never
as in-band stand-ins for data.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import GridMismatchError

TimeLike = int | float | str | Fraction

POS_INF = float("inf")
NEG_INF = float("-inf")


def as_time(value: TimeLike) -> Fraction:
    """Convert a time coordinate to an exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # repr gives the shortest decimal that round-trips, so grid-aligned
        # inputs like 0.5 stay exact
        return Fraction(repr(value))
    return Fraction(value)


class GridSnapWarning(UserWarning):
    """An until bound was not a multiple of the sampling step and was snapped."""


# ---------------------------------------------------------------------------
# Boolean signals
# ---------------------------------------------------------------------------

Interval = tuple[Fraction, Fraction]


def _normalise(pairs: Iterable[tuple[TimeLike, TimeLike]], horizon: Fraction) -> tuple[Interval, ...]:
    """Sort, clip to [0, horizon) and merge overlapping or adjacent intervals."""
    items: list[Interval] = []
    for lo, hi in pairs:
        lo, hi = max(as_time(lo), Fraction(0)), min(as_time(hi), horizon)
        if lo < hi:
            items.append((lo, hi))
    items.sort()
    merged: list[Interval] = []
    for lo, hi in items:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return tuple(merged)


@dataclass(frozen=True)
class BooleanSignal:
    """Truth value over time as a normalised positive interval set."""

    horizon: Fraction
    intervals: tuple[Interval, ...]

    @staticmethod
    def from_intervals(horizon: TimeLike, pairs: Iterable[tuple[TimeLike, TimeLike]]) -> "BooleanSignal":
        horizon = as_time(horizon)
        if horizon <= 0:
            raise ValueError("signal horizon must be positive")
        return BooleanSignal(horizon, _normalise(pairs, horizon))

    @staticmethod
    def const(horizon: TimeLike, value: bool) -> "BooleanSignal":
        horizon = as_time(horizon)
        pairs = [(Fraction(0), horizon)] if value else []
        return BooleanSignal.from_intervals(horizon, pairs)

    @staticmethod
    def from_samples(step: TimeLike, bits: Sequence[bool]) -> "BooleanSignal":
        """Lift grid samples; sample ``k`` owns ``[k*h, (k+1)*h)``."""
        step = as_time(step)
        pairs = []
        start = None
        for k, bit in enumerate(bits):
            if bit and start is None:
                start = k
            elif not bit and start is not None:
                pairs.append((start * step, k * step))
                start = None
        if start is not None:
            pairs.append((start * step, len(bits) * step))
        return BooleanSignal.from_intervals(step * len(bits), pairs)

    def value_at(self, t: TimeLike) -> bool:
        t = as_time(t)
        return any(lo <= t < hi for lo, hi in self.intervals)

    def endpoints(self) -> list[Fraction]:
        out = []
        for lo, hi in self.intervals:
            out.append(lo)
            out.append(hi)
        return out

    def is_normalised(self) -> bool:
        prev_hi = None
        for lo, hi in self.intervals:
            if not (Fraction(0) <= lo < hi <= self.horizon):
                return False
            if prev_hi is not None and lo <= prev_hi:
                return False
            prev_hi = hi
        return True


def _check_same_horizon(a: BooleanSignal, b: BooleanSignal) -> None:
    if a.horizon != b.horizon:
        raise GridMismatchError(f"signal horizons differ: {a.horizon} vs {b.horizon}")


def bool_not(signal: BooleanSignal) -> BooleanSignal:
    """Complement of the positive set within [0, horizon)."""
    pairs = []
    cursor = Fraction(0)
    for lo, hi in signal.intervals:
        if cursor < lo:
            pairs.append((cursor, lo))
        cursor = hi
    if cursor < signal.horizon:
        pairs.append((cursor, signal.horizon))
    return BooleanSignal(signal.horizon, tuple(pairs))


def bool_or(a: BooleanSignal, b: BooleanSignal) -> BooleanSignal:
    _check_same_horizon(a, b)
    return BooleanSignal.from_intervals(a.horizon, list(a.intervals) + list(b.intervals))


def bool_and(a: BooleanSignal, b: BooleanSignal) -> BooleanSignal:
    """Intersection of positive sets via a two-pointer sweep."""
    _check_same_horizon(a, b)
    pairs = []
    i = j = 0
    while i < len(a.intervals) and j < len(b.intervals):
        lo = max(a.intervals[i][0], b.intervals[j][0])
        hi = min(a.intervals[i][1], b.intervals[j][1])
        if lo < hi:
            pairs.append((lo, hi))
        if a.intervals[i][1] <= b.intervals[j][1]:
            i += 1
        else:
            j += 1
    return BooleanSignal(a.horizon, tuple(pairs))


def bool_until(s1: BooleanSignal, s2: BooleanSignal, t1: TimeLike, t2: TimeLike) -> BooleanSignal:
    """Time-bounded until on dense time.

    Both signals are decomposed into unitary signals; each pair ``(p, q)``
    contributes ``((I_p n I_q) shifted back by [t1, t2]) n I_p``, where the
    back-shift of ``[m, n)`` is ``[m - t2, n - t1) n [0, T]``.  The witness
    interval for the right operand is closed at its left end, which matches
    a semantics whose inner quantification runs over the closed interval
    ``[t, t']``.
    """
    _check_same_horizon(s1, s2)
    t1, t2 = as_time(t1), as_time(t2)
    if t1 < 0 or t2 < t1:
        raise ValueError(f"need 0 <= t1 <= t2, got [{t1}, {t2}]")
    pairs = []
    for p_lo, p_hi in s1.intervals:
        for q_lo, q_hi in s2.intervals:
            lo = max(p_lo, q_lo)
            hi = min(p_hi, q_hi)
            if lo >= hi:
                continue
            m, n = lo - t2, hi - t1
            m2, n2 = max(m, p_lo), min(n, p_hi)
            if m2 < n2:
                pairs.append((m2, n2))
    return BooleanSignal.from_intervals(s1.horizon, pairs)


def joint_covering(signals: Iterable[BooleanSignal], horizon: Fraction) -> list[Fraction]:
    """Sorted cell edges of the minimal covering consistent with all signals.

    Returns ``k + 1`` edges delimiting ``k`` left-closed right-open cells on
    which every input signal is constant.
    """
    edges = {Fraction(0), horizon}
    for s in signals:
        if s.horizon != horizon:
            raise GridMismatchError("signals in a covering must share a horizon")
        edges.update(s.endpoints())
    return sorted(e for e in edges if Fraction(0) <= e <= horizon)


def sample_on_covering(signal: BooleanSignal, edges: Sequence[Fraction]) -> np.ndarray:
    """Constant truth value of the signal on each covering cell."""
    out = np.zeros(len(edges) - 1, dtype=bool)
    idx = 0
    for lo, hi in signal.intervals:
        while edges[idx] < lo:
            idx += 1
        while idx < len(edges) - 1 and edges[idx] < hi:
            out[idx] = True
            idx += 1
    return out


def signal_from_covering(bits: Sequence[bool], edges: Sequence[Fraction], horizon: Fraction) -> BooleanSignal:
    pairs = []
    start = None
    for k, bit in enumerate(bits):
        if bit and start is None:
            start = edges[k]
        elif not bit and start is not None:
            pairs.append((start, edges[k]))
            start = None
    if start is not None:
        pairs.append((start, edges[-1]))
    return BooleanSignal.from_intervals(horizon, pairs)


# ---------------------------------------------------------------------------
# Quantitative signals
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuantSignal:
    """Piecewise-constant extended-real signal on a uniform grid."""

    step: Fraction
    values: np.ndarray

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("values must be a non-empty 1-D sequence")
        if np.isnan(values).any():
            raise ValueError("quantitative signals must not contain NaN")
        object.__setattr__(self, "values", values)

    @staticmethod
    def of(step: TimeLike, values) -> "QuantSignal":
        return QuantSignal(as_time(step), np.asarray(values, dtype=np.float64))

    @property
    def horizon(self) -> Fraction:
        return self.step * (len(self.values) - 1)

    def value_at_index(self, k: int) -> float:
        return float(self.values[k])


def _check_same_grid(a: QuantSignal, b: QuantSignal) -> None:
    if a.step != b.step or len(a.values) != len(b.values):
        raise GridMismatchError(
            f"grids differ: step {a.step} x {len(a.values)} vs {b.step} x {len(b.values)}"
        )


def quant_neg(a: QuantSignal) -> QuantSignal:
    return QuantSignal(a.step, -a.values)


def quant_min(a: QuantSignal, b: QuantSignal) -> QuantSignal:
    _check_same_grid(a, b)
    return QuantSignal(a.step, np.minimum(a.values, b.values))


def quant_max(a: QuantSignal, b: QuantSignal) -> QuantSignal:
    _check_same_grid(a, b)
    return QuantSignal(a.step, np.maximum(a.values, b.values))


def quant_pointwise(op: str, a: QuantSignal, b: QuantSignal | None = None) -> QuantSignal:
    """Dispatch pointwise `neg`/`min`/`max` with grid checking."""
    if op == "neg":
        if b is not None:
            raise ValueError("neg is unary")
        return quant_neg(a)
    if b is None:
        raise ValueError(f"{op} is binary")
    if op == "min":
        return quant_min(a, b)
    if op == "max":
        return quant_max(a, b)
    raise ValueError(f"unknown pointwise op {op!r}")


def snap_bounds(t1: Fraction, t2: Fraction, step: Fraction) -> tuple[int, int]:
    """Snap an interval to grid indices: lower bound up, upper bound down.

    Emits :class:`GridSnapWarning` when snapping moves either bound.
    """
    k1 = math.ceil(t1 / step)
    k2 = math.floor(t2 / step)
    if k1 * step != t1 or k2 * step != t2:
        warnings.warn(
            f"until bounds [{t1}, {t2}] snapped to grid multiples "
            f"[{k1 * step}, {k2 * step}] of step {step}",
            GridSnapWarning,
            stacklevel=3,
        )
    return k1, k2


def until_values(v1: np.ndarray, v2: np.ndarray, k1: int, k2: int) -> np.ndarray:
    """Grid until on the last axis of equally shaped value arrays.

    ``out[..., k] = max over k' in [k+k1, k+k2] of
    min(v2[..., k'], min over k'' in [k, k'] of v1[..., k''])``.
    The output loses ``k2`` trailing samples.
    """
    if v1.shape != v2.shape:
        raise GridMismatchError("until operands must share a shape")
    m = v1.shape[-1]
    if not 0 <= k1 <= k2:
        raise ValueError(f"need 0 <= k1 <= k2, got [{k1}, {k2}]")
    if k2 >= m:
        raise ValueError(f"window end {k2} exceeds the {m}-sample horizon")
    win1 = np.lib.stride_tricks.sliding_window_view(v1, k2 + 1, axis=-1)
    win2 = np.lib.stride_tricks.sliding_window_view(v2, k2 + 1, axis=-1)
    prefix = np.minimum.accumulate(win1, axis=-1)
    return np.max(np.minimum(win2[..., k1:], prefix[..., k1:]), axis=-1)


def window_max(values: np.ndarray, k1: int, k2: int) -> np.ndarray:
    """Sliding forward-window maximum; implements the grid `eventually`."""
    m = values.shape[-1]
    if not 0 <= k1 <= k2:
        raise ValueError(f"need 0 <= k1 <= k2, got [{k1}, {k2}]")
    if k2 >= m:
        raise ValueError(f"window end {k2} exceeds the {m}-sample horizon")
    win = np.lib.stride_tricks.sliding_window_view(values, k2 + 1, axis=-1)
    return np.max(win[..., k1:], axis=-1)


def window_min(values: np.ndarray, k1: int, k2: int) -> np.ndarray:
    return -window_max(-values, k1, k2)


def quant_until(r1: QuantSignal, r2: QuantSignal, t1: TimeLike, t2: TimeLike) -> QuantSignal:
    """Grid until of two quantitative signals; shrinks the horizon by ``t2``."""
    _check_same_grid(r1, r2)
    t1, t2 = as_time(t1), as_time(t2)
    if t1 < 0 or t2 < t1:
        raise ValueError(f"need 0 <= t1 <= t2, got [{t1}, {t2}]")
    k1, k2 = snap_bounds(t1, t2, r1.step)
    if k1 > k2:
        raise ValueError(f"window [{t1}, {t2}] contains no grid point of step {r1.step}")
    return QuantSignal(r1.step, until_values(r1.values, r2.values, k1, k2))


def until_values_brute(v1: Sequence[float], v2: Sequence[float], k1: int, k2: int) -> list[float]:
    """Literal nested sup/min/inf evaluation; reference oracle for tests."""
    m = len(v1)
    out = []
    for k in range(m - k2):
        best = NEG_INF
        for kp in range(k + k1, k + k2 + 1):
            inner = min(v1[k : kp + 1])
            best = max(best, min(v2[kp], inner))
        out.append(best)
    return out
