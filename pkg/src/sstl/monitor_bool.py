"""Boolean monitoring over the formula tree.

Evaluation is bottom-up and produces one Boolean signal per location for
every subformula.  Temporal operators clip their look-ahead window at the
signal horizon, so evidence beyond the trace is treated as absent; the
quantitative monitor instead shrinks its output horizon (see the format
notes in the README).

Spatial operators are evaluated for all probe locations at once: child
signals are sampled on their joint minimal interval covering, giving one
boolean matrix ``(location, cell)`` per operand, and the per-cell set
computations run vectorised across probe chunks.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import logic
from .errors import HorizonError, SchemaError, SSTLError
from .logic import Formula
from .models import Trace
from .signals import (
    BooleanSignal,
    bool_and,
    bool_not,
    bool_or,
    bool_until,
    joint_covering,
    sample_on_covering,
    signal_from_covering,
)
from .space import SpaceModel

_PROBE_CHUNK = 64


@dataclass(frozen=True, eq=False)
class BoolResult:
    """Per-location truth signals plus the verdict at time zero."""

    locations: tuple[str, ...]
    signals: dict[str, BooleanSignal]

    @property
    def satisfaction_at_zero(self) -> dict[str, bool]:
        return {loc: sig.value_at(0) for loc, sig in self.signals.items()}

    def satisfied_at(self, location: str, t=0) -> bool:
        return self.signals[location].value_at(t)


def check_schema(formula: Formula, trace: Trace, space: SpaceModel) -> None:
    if tuple(trace.locations) != tuple(space.locations):
        raise SchemaError("trace locations do not match the space model")
    missing = sorted(logic.variables(formula) - set(trace.variables))
    if missing:
        raise SchemaError(f"trace has no variable {missing[0]!r}")


def eval_expr(expr: logic.Expr, env: Mapping[str, np.ndarray]) -> np.ndarray:
    """Evaluate an arithmetic expression over per-variable value arrays."""
    if isinstance(expr, logic.Var):
        return env[expr.name]
    if isinstance(expr, logic.Const):
        shape = next(iter(env.values())).shape if env else ()
        return np.full(shape, float(expr.value))
    left = eval_expr(expr.left, env)
    right = eval_expr(expr.right, env)
    if expr.op == "+":
        return left + right
    if expr.op == "-":
        return left - right
    if expr.op == "*":
        return left * right
    if np.any(right == 0.0):
        raise SSTLError("division by zero while evaluating an atomic expression")
    return left / right


def atom_truth(cmp: logic.Comparison, env: Mapping[str, np.ndarray]) -> np.ndarray:
    left = eval_expr(cmp.left, env)
    right = eval_expr(cmp.right, env)
    op = {
        "<=": np.less_equal,
        "<": np.less,
        ">=": np.greater_equal,
        ">": np.greater,
        "=": np.equal,
    }[cmp.op]
    return op(left, right)


def atom_margin(cmp: logic.Comparison, env: Mapping[str, np.ndarray]) -> np.ndarray:
    """Secondary signal of an atom: the signed slack of its comparison."""
    left = eval_expr(cmp.left, env)
    right = eval_expr(cmp.right, env)
    if cmp.op in ("<=", "<"):
        return right - left
    if cmp.op in (">=", ">"):
        return left - right
    raise SSTLError("equality atoms have no robustness margin")


def monitor_bool(
    formula: Formula, trace: Trace, space: SpaceModel, oracle: bool = False
) -> BoolResult:
    """Evaluate the Boolean semantics of ``formula`` at every location.

    Raises :class:`SchemaError` on variable/location mismatches and
    :class:`HorizonError` when the formula looks further ahead than the
    trace extends even from time zero.  With ``oracle=True`` every surround
    evaluation is cross-checked against subset enumeration (small spaces
    only) and a mismatch raises ``AssertionError``.
    """
    check_schema(formula, trace, space)
    if logic.temporal_depth(formula) > trace.horizon:
        raise HorizonError(
            f"formula needs {logic.temporal_depth(formula)} time units of trace "
            f"but the horizon is {trace.horizon}"
        )
    env = {name: trace.var(name) for name in logic.variables(formula)}
    horizon = trace.step * trace.n_samples
    memo: dict[Formula, list[BooleanSignal]] = {}

    def recurse(node: Formula) -> list[BooleanSignal]:
        if node in memo:
            return memo[node]
        result = _eval_node(node, recurse, env, trace, space, horizon)
        if oracle and isinstance(node, logic.Surround):
            _check_surround_oracle(
                space, recurse(node.left), recurse(node.right), node.d1, node.d2, result
            )
        memo[node] = result
        return result

    signals = recurse(formula)
    return BoolResult(tuple(space.locations), dict(zip(space.locations, signals)))


def _check_surround_oracle(space, child1, child2, d1, d2, result) -> None:
    edges, _, (bits1, bits2) = _covering_bits(space, [child1, child2])
    for cell in range(len(edges) - 1):
        sat1 = {loc: bool(bits1[i, cell]) for i, loc in enumerate(space.locations)}
        sat2 = {loc: bool(bits2[i, cell]) for i, loc in enumerate(space.locations)}
        for i, probe in enumerate(space.locations):
            expected = surround_by_enumeration(space, sat1, sat2, probe, d1, d2)
            got = result[i].value_at(edges[cell])
            if expected != got:
                raise AssertionError(
                    f"surround mismatch at {probe} on [{edges[cell]}, {edges[cell + 1]}): "
                    f"fixpoint={got}, enumeration={expected}"
                )


def _eval_node(node, recurse, env, trace: Trace, space: SpaceModel, horizon: Fraction):
    if isinstance(node, logic.BoolConst):
        const = BooleanSignal.const(horizon, node.value)
        return [const] * space.n_locations
    if isinstance(node, logic.Atomic):
        truth = atom_truth(node.cmp, env)
        return [BooleanSignal.from_samples(trace.step, row) for row in truth]
    if isinstance(node, logic.Not):
        return [bool_not(s) for s in recurse(node.child)]
    if isinstance(node, logic.And):
        return [bool_and(a, b) for a, b in zip(recurse(node.left), recurse(node.right))]
    if isinstance(node, logic.Or):
        return [bool_or(a, b) for a, b in zip(recurse(node.left), recurse(node.right))]
    if isinstance(node, logic.Until):
        return [
            bool_until(a, b, node.t1, node.t2)
            for a, b in zip(recurse(node.left), recurse(node.right))
        ]
    if isinstance(node, logic.Eventually):
        true_sig = BooleanSignal.const(horizon, True)
        return [bool_until(true_sig, s, node.t1, node.t2) for s in recurse(node.child)]
    if isinstance(node, logic.Globally):
        true_sig = BooleanSignal.const(horizon, True)
        return [
            bool_not(bool_until(true_sig, bool_not(s), node.t1, node.t2))
            for s in recurse(node.child)
        ]
    if isinstance(node, logic.Somewhere):
        return bool_somewhere_all(space, recurse(node.child), node.d1, node.d2)
    if isinstance(node, logic.Everywhere):
        return bool_everywhere_all(space, recurse(node.child), node.d1, node.d2)
    if isinstance(node, logic.Surround):
        return bool_surround_all(space, recurse(node.left), recurse(node.right), node.d1, node.d2)
    raise TypeError(f"not a formula node: {node!r}")


# ---------------------------------------------------------------------------
# Spatial operators, batched over probe locations
# ---------------------------------------------------------------------------


def _covering_bits(space: SpaceModel, groups: Sequence[Sequence[BooleanSignal]]):
    horizon = groups[0][0].horizon
    every = [s for group in groups for s in group]
    edges = joint_covering(every, horizon)
    matrices = [
        np.stack([sample_on_covering(s, edges) for s in group]) for group in groups
    ]
    return edges, horizon, matrices


def bool_somewhere_all(
    space: SpaceModel, child: Sequence[BooleanSignal], d1, d2
) -> list[BooleanSignal]:
    """Disjunction of the child signal over each probe's range set.

    An empty range set yields constant false: there is no witness.
    """
    edges, horizon, (bits,) = _covering_bits(space, [child])
    mask = space.range_mask(float(d1), float(d2))
    hits = mask.astype(np.float32) @ bits.astype(np.float32)
    out = hits > 0.5
    return [signal_from_covering(row, edges, horizon) for row in out]


def bool_everywhere_all(
    space: SpaceModel, child: Sequence[BooleanSignal], d1, d2
) -> list[BooleanSignal]:
    """Conjunction over each probe's range set; empty sets are vacuously true."""
    edges, horizon, (bits,) = _covering_bits(space, [child])
    mask = space.range_mask(float(d1), float(d2))
    misses = mask.astype(np.float32) @ (~bits).astype(np.float32)
    out = misses < 0.5
    return [signal_from_covering(row, edges, horizon) for row in out]


def _neighbour_any(matrix: np.ndarray, nbr_idx: np.ndarray) -> np.ndarray:
    """OR over graph neighbours along axis 1 of a (probe, location, cell) array."""
    padded = np.concatenate(
        [matrix, np.zeros((matrix.shape[0], 1, matrix.shape[2]), dtype=bool)], axis=1
    )
    return padded[:, nbr_idx, :].any(axis=2)


def bool_surround_all(
    space: SpaceModel,
    child1: Sequence[BooleanSignal],
    child2: Sequence[BooleanSignal],
    d1,
    d2,
) -> list[BooleanSignal]:
    """Surround verdict for every probe location.

    Per covering cell and probe, start from the candidate region ``V``
    (operand-1 locations within ``d2``) and the admissible boundary ``Q``
    (operand-2 locations within ``[d1, d2]``), then repeatedly delete from
    ``V`` any location adjacent to a bad frontier location until the
    frontier dies out; the probe satisfies the operator iff it survives.
    """
    edges, horizon, (bits1, bits2) = _covering_bits(space, [child1, child2])
    n = space.n_locations
    mask_v = space.range_mask(0.0, float(d2))
    mask_q = space.range_mask(float(d1), float(d2))
    nbr_idx, _ = space.neighbour_index()

    out = np.zeros((n, len(edges) - 1), dtype=bool)
    for start in range(0, n, _PROBE_CHUNK):
        probes = np.arange(start, min(start + _PROBE_CHUNK, n))
        v = mask_v[probes][:, :, None] & bits1[None, :, :]
        q = mask_q[probes][:, :, None] & bits2[None, :, :]
        region = v | q
        frontier = _neighbour_any(region, nbr_idx) & ~region
        guard = 0
        while frontier.any():
            removed = _neighbour_any(frontier, nbr_idx) & v
            if not removed.any():
                break
            v &= ~removed
            frontier = removed & ~q
            guard += 1
            if guard > n + 1:
                raise AssertionError("surround deletion loop failed to terminate")
        out[probes] = v[np.arange(len(probes)), probes, :]
    return [signal_from_covering(row, edges, horizon) for row in out]


def surround_by_enumeration(
    space: SpaceModel,
    sat1: Mapping[str, bool],
    sat2: Mapping[str, bool],
    probe: str,
    d1,
    d2,
    cap: int = 20,
) -> bool:
    """Literal subset-enumeration semantics of the surround operator.

    Checks every region ``A`` inside the ``d2``-ball around ``probe`` that
    contains the probe: all of ``A`` must satisfy the first operand and its
    external boundary must lie within ``[d1, d2]`` and satisfy the second.
    Exponential; intended as a test oracle and for the ``--oracle`` flag.
    """
    from itertools import combinations

    from .space import external_boundary, locations_in_range

    ball = sorted(locations_in_range(space, probe, 0.0, float(d2)))
    ring = locations_in_range(space, probe, float(d1), float(d2))
    others = [loc for loc in ball if loc != probe]
    if len(others) > cap:
        raise ValueError(f"enumeration over {len(others) + 1} locations exceeds the cap")
    if not sat1.get(probe, False):
        return False
    for size in range(len(others) + 1):
        for extra in combinations(others, size):
            region = {probe, *extra}
            if not all(sat1.get(a, False) for a in region):
                continue
            boundary = external_boundary(space, region)
            if not boundary <= ring:
                continue
            if all(sat2.get(b, False) for b in boundary):
                return True
    return False
