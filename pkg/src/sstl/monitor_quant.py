"""Quantitative (robustness) monitoring on the sampling grid.

Bottom-up evaluation mirrors the Boolean monitor but carries extended-real
value arrays.  Temporal operators consume look-ahead, so each nested window
shrinks the output horizon by its upper bound; a formula deeper than the
trace raises :class:`HorizonError`.

The surround operator runs a per-time fixpoint: starting from the operand-1
robustness (minus infinity outside the ``d2``-ball), every sweep lowers each
location to the minimum of itself and, over its neighbours, the better of
the neighbour's current value and the neighbour's admissible-boundary score.
The iteration is monotone decreasing and reaches its fixpoint within
hop-diameter + 1 value-changing sweeps, both of which are asserted on every
call.  All probe locations and time samples are batched through the same
sweeps.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

import numpy as np

from . import logic
from .errors import EqualityAtomError, HorizonError
from .logic import Formula
from .models import Trace
from .monitor_bool import atom_margin, check_schema
from .signals import NEG_INF, POS_INF, QuantSignal, snap_bounds, until_values, window_max, window_min
from .space import SpaceModel, external_boundary, locations_in_range

_PROBE_CHUNK = 64


@dataclass(frozen=True, eq=False)
class QuantResult:
    """Per-location robustness signals plus the score at time zero."""

    locations: tuple[str, ...]
    signals: dict[str, QuantSignal]

    @property
    def robustness_at_zero(self) -> dict[str, float]:
        return {loc: sig.value_at_index(0) for loc, sig in self.signals.items()}

    def robustness_at(self, location: str, index: int = 0) -> float:
        sig = self.signals[location]
        if not 0 <= index < len(sig.values):
            raise HorizonError(
                f"grid index {index} outside the monitored horizon "
                f"({len(sig.values)} samples after temporal shrinking)"
            )
        return sig.value_at_index(index)


@dataclass
class FixpointState:
    """Bookkeeping for one batched fixpoint run.

    ``current``/``previous`` hold one extended-real value per (probe,
    location, sample); ``iteration`` counts value-changing sweeps.
    """

    current: np.ndarray
    previous: np.ndarray | None = None
    iteration: int = 0

    def advance(self, updated: np.ndarray, bound: int) -> bool:
        """Record a sweep; returns False once the fixpoint is reached."""
        if not np.all(updated <= self.current):
            raise AssertionError("surround fixpoint is not monotone decreasing")
        if np.array_equal(updated, self.current):
            return False
        self.previous = self.current
        self.current = updated
        self.iteration += 1
        if self.iteration > bound:
            raise AssertionError(
                f"surround fixpoint needed {self.iteration} sweeps, "
                f"bound is hop diameter + 1 = {bound}"
            )
        return True


def monitor_quant(
    formula: Formula, trace: Trace, space: SpaceModel, oracle: bool = False
) -> QuantResult:
    """Evaluate the robustness degree of ``formula`` at every location.

    Raises :class:`EqualityAtomError` for equality atoms (their robustness
    is ill-defined), :class:`SchemaError` on variable/location mismatches
    and :class:`HorizonError` when the temporal depth exceeds the trace.
    With ``oracle=True`` every surround fixpoint is cross-checked against
    subset enumeration (small spaces only); a mismatch raises
    ``AssertionError``.
    """
    check_schema(formula, trace, space)
    if logic.has_equality_atom(formula):
        raise EqualityAtomError(
            "equality atoms are only supported by the Boolean semantics"
        )
    if logic.temporal_depth(formula) > trace.horizon:
        raise HorizonError(
            f"formula needs {logic.temporal_depth(formula)} time units of trace "
            f"but the horizon is {trace.horizon}"
        )
    values = _evaluate(formula, trace, space, trace.n_samples - 1, oracle)
    step = trace.step
    signals = {
        loc: QuantSignal(step, values[i]) for i, loc in enumerate(space.locations)
    }
    return QuantResult(tuple(space.locations), signals)


def robustness_at_index(
    formula: Formula, trace: Trace, space: SpaceModel, index: int = 0
) -> dict[str, float]:
    """Robustness at one grid time, skipping columns no operator will read.

    Equivalent to ``monitor_quant(...).robustness_at(loc, index)`` but only
    evaluates the time window each subformula actually contributes to; the
    statistical harness uses this to keep per-run monitoring cheap.
    """
    check_schema(formula, trace, space)
    if logic.has_equality_atom(formula):
        raise EqualityAtomError(
            "equality atoms are only supported by the Boolean semantics"
        )
    if index < 0 or logic.temporal_depth(formula) + index * trace.step > trace.horizon:
        raise HorizonError(
            f"no grid sample {index} after shrinking by the formula depth"
        )
    values = _evaluate(formula, trace, space, index, oracle=False)
    return {loc: float(values[i, index]) for i, loc in enumerate(space.locations)}


def _evaluate(formula, trace, space, max_index, oracle) -> np.ndarray:
    """Bottom-up evaluation of each node on the grid window it contributes
    to: a parent needing columns ``lo..hi`` asks a temporal child for
    ``lo+k1..hi+k2``.  Windows clip at the trace end; the caller has already
    checked the formula depth fits."""
    env = {name: trace.var(name) for name in logic.variables(formula)}
    memo: dict[tuple[Formula, int, int], np.ndarray] = {}

    def recurse(node: Formula, lo: int, hi: int) -> np.ndarray:
        hi = min(hi, trace.n_samples - 1)
        key = (node, lo, hi)
        if key in memo:
            return memo[key]
        result = _eval_node(node, recurse, env, trace, space, lo, hi)
        if oracle and isinstance(node, logic.Surround):
            left, right = _align(recurse(node.left, lo, hi), recurse(node.right, lo, hi))
            _check_surround_oracle(space, left, right, node.d1, node.d2, result)
        memo[key] = result
        return result

    return recurse(formula, 0, max_index)


def _check_surround_oracle(space, rho1, rho2, d1, d2, result) -> None:
    for k in range(result.shape[-1]):
        map1 = {loc: float(rho1[i, k]) for i, loc in enumerate(space.locations)}
        map2 = {loc: float(rho2[i, k]) for i, loc in enumerate(space.locations)}
        for i, probe in enumerate(space.locations):
            expected = brute_force_surround(space, probe, map1, map2, d1, d2)
            if expected != result[i, k]:
                raise AssertionError(
                    f"surround mismatch at {probe}, sample {k}: "
                    f"fixpoint={result[i, k]}, enumeration={expected}"
                )


def _align(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # operands keep a common prefix when their depths differ
    n = min(a.shape[-1], b.shape[-1])
    return a[..., :n], b[..., :n]


def _snap_window(node, step, n_samples) -> tuple[int, int]:
    k1, k2 = snap_bounds(node.t1, node.t2, step)
    if k1 > k2:
        raise HorizonError(
            f"window [{node.t1}, {node.t2}] contains no grid point of step {step}"
        )
    if k2 >= n_samples:
        raise HorizonError(
            f"temporal window reaches {k2} steps ahead but the trace has "
            f"{n_samples} samples"
        )
    return k1, k2


def _check_window(node, k2: int, child_length: int) -> None:
    if k2 >= child_length:
        raise HorizonError(
            f"temporal window reaches {k2} steps ahead but only "
            f"{child_length} samples remain"
        )


def _eval_node(node, recurse, env, trace: Trace, space: SpaceModel, lo: int, hi: int) -> np.ndarray:
    n_loc = space.n_locations
    if isinstance(node, logic.BoolConst):
        fill = POS_INF if node.value else NEG_INF
        return np.full((n_loc, hi - lo + 1), fill)
    if isinstance(node, logic.Atomic):
        margins = np.asarray(atom_margin(node.cmp, env), dtype=np.float64)
        return margins[:, lo : hi + 1]
    if isinstance(node, logic.Not):
        return -recurse(node.child, lo, hi)
    if isinstance(node, logic.And):
        return np.minimum(*_align(recurse(node.left, lo, hi), recurse(node.right, lo, hi)))
    if isinstance(node, logic.Or):
        return np.maximum(*_align(recurse(node.left, lo, hi), recurse(node.right, lo, hi)))
    if isinstance(node, logic.Until):
        k1, k2 = _snap_window(node, trace.step, trace.n_samples)
        # the left operand is scanned from the evaluation time itself
        left, right = _align(
            recurse(node.left, lo, hi + k2), recurse(node.right, lo, hi + k2)
        )
        _check_window(node, k2, left.shape[-1])
        return until_values(left, right, k1, k2)
    if isinstance(node, (logic.Eventually, logic.Globally)):
        k1, k2 = _snap_window(node, trace.step, trace.n_samples)
        child = recurse(node.child, lo + k1, hi + k2)
        width = k2 - k1 + 1
        _check_window(node, width - 1, child.shape[-1])
        reduce = window_max if isinstance(node, logic.Eventually) else window_min
        return reduce(child, 0, width - 1)
    if isinstance(node, logic.Somewhere):
        return _range_reduce(space, recurse(node.child, lo, hi), node.d1, node.d2, is_max=True)
    if isinstance(node, logic.Everywhere):
        return _range_reduce(space, recurse(node.child, lo, hi), node.d1, node.d2, is_max=False)
    if isinstance(node, logic.Surround):
        left, right = _align(recurse(node.left, lo, hi), recurse(node.right, lo, hi))
        return surround_fixpoint_all(space, left, right, node.d1, node.d2)
    raise TypeError(f"not a formula node: {node!r}")


def _range_reduce(space: SpaceModel, child: np.ndarray, d1, d2, is_max: bool) -> np.ndarray:
    """Max (somewhere) or min (everywhere) of the child over each range set.

    Empty range sets give the identity of the reduction: minus infinity for
    the existential reading, plus infinity for the universal one.
    """
    mask = space.range_mask(float(d1), float(d2))
    out = np.full(child.shape, NEG_INF if is_max else POS_INF)
    for p in range(space.n_locations):
        rows = child[mask[p]]
        if rows.size:
            out[p] = rows.max(axis=0) if is_max else rows.min(axis=0)
    return out


# ---------------------------------------------------------------------------
# Surround: batched fixpoint and its enumeration oracle
# ---------------------------------------------------------------------------


def surround_fixpoint_all(
    space: SpaceModel,
    rho1: np.ndarray,
    rho2: np.ndarray,
    d1,
    d2,
    probes: np.ndarray | None = None,
    collect: dict | None = None,
) -> np.ndarray:
    """Quantitative surround for every probe via the decreasing fixpoint.

    ``rho1``/``rho2`` hold operand robustness as ``(location, sample)``
    arrays.  For each probe the operands are padded to minus infinity
    outside the ``d2``-ball and outside the ``[d1, d2]`` ring respectively,
    and the sweeps run over the whole location set; an isolated location
    keeps its operand-1 score (the minimum over no neighbours is plus
    infinity).  Returns a ``(probe, sample)`` array.
    """
    n = space.n_locations
    m = rho1.shape[-1]
    if probes is None:
        probes = np.arange(n)
    mask1 = space.range_mask(0.0, float(d2))[probes]
    mask2 = space.range_mask(float(d1), float(d2))[probes]
    nbr_idx, _ = space.neighbour_index()
    bound = space.hop_diameter + 1
    # keep the gathered neighbour tensor around 64 MB
    per_probe = n * nbr_idx.shape[1] * m
    chunk_size = int(np.clip(8_000_000 // max(per_probe, 1), 1, _PROBE_CHUNK))

    out = np.empty((len(probes), m))
    for start in range(0, len(probes), chunk_size):
        sel = slice(start, min(start + chunk_size, len(probes)))
        chunk = probes[sel]
        pc = len(chunk)
        s1 = np.where(mask1[sel][:, :, None], rho1[None, :, :], NEG_INF)
        s2 = np.where(mask2[sel][:, :, None], rho2[None, :, :], NEG_INF)
        # sentinel row +inf: padded neighbour slots are neutral for the min
        pad_x = np.full((pc, 1, m), POS_INF)
        pad_s2 = np.full((pc, 1, m), NEG_INF)
        s2_nbr = np.concatenate([s2, pad_s2], axis=1)[:, nbr_idx, :]

        state = FixpointState(current=s1)
        while True:
            x_padded = np.concatenate([state.current, pad_x], axis=1)
            challenge = np.maximum(x_padded[:, nbr_idx, :], s2_nbr)
            updated = np.minimum(state.current, challenge.min(axis=2))
            if not state.advance(updated, bound):
                break
        if collect is not None:
            collect.setdefault("iterations", []).append(state.iteration)
            collect.setdefault("bound", bound)
        out[sel] = state.current[np.arange(pc), chunk, :]
    return out


def quant_surround(
    space: SpaceModel,
    probe: str,
    rho1: Mapping[str, float],
    rho2: Mapping[str, float],
    d1,
    d2,
) -> float:
    """Surround score of one probe from per-location operand scores."""
    vals1 = np.array([[rho1[loc]] for loc in space.locations])
    vals2 = np.array([[rho2[loc]] for loc in space.locations])
    result = surround_fixpoint_all(
        space, vals1, vals2, d1, d2, probes=np.array([space.index_of(probe)])
    )
    return float(result[0, 0])


def brute_force_surround(
    space: SpaceModel,
    probe: str,
    rho1: Mapping[str, float],
    rho2: Mapping[str, float],
    d1,
    d2,
    cap: int = 20,
) -> float:
    """Literal best-region semantics of the quantitative surround.

    Maximises, over every region ``A`` inside the ``d2``-ball that contains
    the probe and whose external boundary stays within the ``[d1, d2]``
    ring, the worse of the region's operand-1 minimum and the boundary's
    operand-2 minimum.  No admissible region gives minus infinity, and an
    empty boundary contributes plus infinity.  Exponential; oracle use only.
    """
    ball = sorted(locations_in_range(space, probe, 0.0, float(d2)))
    ring = locations_in_range(space, probe, float(d1), float(d2))
    others = [loc for loc in ball if loc != probe]
    if len(others) > cap:
        raise ValueError(f"enumeration over {len(others) + 1} locations exceeds the cap")
    best = NEG_INF
    for size in range(len(others) + 1):
        for extra in combinations(others, size):
            region = {probe, *extra}
            boundary = external_boundary(space, region)
            if not boundary <= ring:
                continue
            inner = min(rho1[a] for a in region)
            outer = min((rho2[b] for b in boundary), default=POS_INF)
            best = max(best, min(inner, outer))
    return best
