"""Shared generators for random spaces, traces and formulas."""
from fractions import Fraction

import numpy as np
import pytest

from sstl import logic
from sstl.logic import (
    And,
    Atomic,
    BoolConst,
    Comparison,
    Const,
    Eventually,
    Everywhere,
    Globally,
    Not,
    Or,
    Somewhere,
    Surround,
    Until,
    Var,
)
from sstl.models import Trace
from sstl.space import build_space


def random_space(rng, max_nodes=8, min_nodes=2, integer_weights=False):
    """Connected-ish random graph; weights >= 1 keep the hop/weighted diameter
    relation of the convergence bound valid."""
    n = int(rng.integers(min_nodes, max_nodes + 1))
    locations = [f"n{i}" for i in range(n)]
    edges = []
    for j in range(1, n):
        # random spanning tree keeps most graphs connected
        i = int(rng.integers(0, j))
        edges.append((i, j))
    extra = int(rng.integers(0, n))
    for _ in range(extra):
        i, j = rng.integers(0, n, size=2)
        i, j = int(i), int(j)
        if i == j:
            continue
        if (min(i, j), max(i, j)) in {(min(a, b), max(a, b)) for a, b in edges}:
            continue
        edges.append((i, j))
    if integer_weights:
        weights = rng.integers(1, 4, size=len(edges)).astype(float)
    else:
        weights = 1.0 + 2.0 * rng.random(len(edges))
    return build_space(
        locations, [(f"n{i}", f"n{j}", float(w)) for (i, j), w in zip(edges, weights)]
    )


def random_trace(rng, space, n_samples, n_vars=2, step=Fraction(1, 2), scale=4.0):
    values = scale * (rng.random((space.n_locations, n_samples, n_vars)) - 0.5)
    variables = tuple(f"v{i}" for i in range(n_vars))
    return Trace(tuple(space.locations), variables, step, values)


def random_formula(rng, depth, step, max_depth_budget, n_vars=2):
    """Random formula whose temporal depth stays within the given budget.

    Time bounds are multiples of the sampling step, so the Boolean and grid
    semantics see the same windows; thresholds are irrational-ish to avoid
    robustness values that are exactly zero.
    """
    def atom():
        var = Var(f"v{int(rng.integers(0, n_vars))}")
        threshold = Const(Fraction(int(rng.integers(-1900, 1900)), 1000))
        op = str(rng.choice(["<=", "<", ">=", ">"]))
        return Atomic(Comparison(op, var, threshold))

    if depth == 0:
        return atom()
    kind = rng.choice(
        ["atom", "not", "and", "or", "until", "F", "G", "somewhere", "everywhere", "surround"]
    )
    sub = lambda: random_formula(rng, depth - 1, step, max_depth_budget, n_vars)
    if kind == "atom":
        return atom()
    if kind == "not":
        return Not(sub())
    if kind == "and":
        return And(sub(), sub())
    if kind == "or":
        return Or(sub(), sub())
    if kind in ("until", "F", "G"):
        lo_k = int(rng.integers(0, 3))
        hi_k = lo_k + int(rng.integers(0, 3))
        lo, hi = lo_k * step, hi_k * step
        child = sub()
        if kind == "until":
            left = sub()
            candidate = Until(left, child, lo, hi)
        elif kind == "F":
            candidate = Eventually(child, lo, hi)
        else:
            candidate = Globally(child, lo, hi)
        if logic.temporal_depth(candidate) > max_depth_budget:
            return atom()
        return candidate
    d_lo = Fraction(int(rng.integers(0, 5)), 2)
    d_hi = d_lo + Fraction(int(rng.integers(0, 7)), 2)
    if kind == "somewhere":
        return Somewhere(sub(), d_lo, d_hi)
    if kind == "everywhere":
        return Everywhere(sub(), d_lo, d_hi)
    return Surround(sub(), sub(), d_lo, d_hi)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
