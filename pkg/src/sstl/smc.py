"""Statistical model checking on top of the monitors.

Each run simulates one trace, monitors the Boolean verdict and the
robustness score at the probe location, and the harness aggregates Bernoulli
statistics (Wilson confidence interval), robustness moments and conditional
means.  Run ``i`` always draws from the stream seeded by
``(master_seed, *prefix, i)``, so results are independent of batching and of
the worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.stats import norm

from .logic import Formula
from .models import Trace
from .monitor_bool import monitor_bool
from .monitor_quant import robustness_at_index
from .space import SpaceModel

_BATCH = 50


@dataclass(frozen=True)
class SMCEstimate:
    """Satisfaction-probability estimate with robustness statistics."""

    runs: int
    successes: int
    p_hat: float
    ci_low: float
    ci_high: float
    alpha: float
    rob_mean: float
    rob_std: float
    rob_mean_given_true: float | None
    rob_mean_given_false: float | None
    verdicts: tuple[bool, ...]
    robustness: tuple[float, ...]


@dataclass(frozen=True)
class SweepResult:
    """One estimate per parameter value plus the probability/robustness correlation."""

    points: tuple[tuple[float, SMCEstimate], ...]
    pearson_r: float | None


def wilson_interval(successes: int, runs: int, alpha: float) -> tuple[float, float]:
    """Wilson score interval for a Bernoulli proportion; stable near 0 and 1."""
    if runs < 1:
        raise ValueError("need at least one run")
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    z = float(norm.ppf(1 - alpha / 2))
    p = successes / runs
    denom = 1 + z * z / runs
    centre = (p + z * z / (2 * runs)) / denom
    half = z * math.sqrt(p * (1 - p) / runs + z * z / (4 * runs * runs)) / denom
    # the interval always contains the raw proportion; keep that exact under
    # float rounding
    return min(max(0.0, centre - half), p), max(min(1.0, centre + half), p)


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float | None:
    """Pearson correlation, or None when either series is constant."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.size != y.size or x.size < 2:
        raise ValueError("need two same-length series")
    sx = x - x.mean()
    sy = y - y.mean()
    nx = math.sqrt(float(sx @ sx))
    ny = math.sqrt(float(sy @ sy))
    if nx == 0.0 or ny == 0.0:
        return None
    return float(sx @ sy) / (nx * ny)


def _run_seeds(master_seed: int, prefix: tuple[int, ...], indices: Iterable[int]):
    return [(int(master_seed), *prefix, int(i)) for i in indices]


def _monitor_chunk(args) -> list[tuple[bool, float]]:
    generator, formula, space, location, seeds = args
    many = getattr(generator, "many", None)
    traces: list[Trace] = many(seeds) if many is not None else [generator(s) for s in seeds]
    out = []
    for trace in traces:
        verdict = monitor_bool(formula, trace, space).satisfaction_at_zero[location]
        rob = robustness_at_index(formula, trace, space, 0)[location]
        out.append((bool(verdict), float(rob)))
    return out


def estimate(
    generator: Callable,
    formula: Formula,
    space: SpaceModel,
    location: str,
    n_runs: int,
    alpha: float = 0.05,
    master_seed: int = 0,
    jobs: int = 1,
    seed_prefix: tuple[int, ...] = (),
) -> SMCEstimate:
    """Monitor ``n_runs`` independent traces and aggregate the statistics.

    ``generator`` maps a seed tuple to a :class:`Trace`; if it provides a
    ``many(seeds)`` method, runs are simulated in vectorised batches.  The
    aggregation is a reduction over run indices, so the result does not
    depend on ``jobs``.
    """
    if n_runs < 1:
        raise ValueError("need at least one run")
    space.index_of(location)
    chunks = [
        (generator, formula, space, location,
         _run_seeds(master_seed, seed_prefix, range(start, min(start + _BATCH, n_runs))))
        for start in range(0, n_runs, _BATCH)
    ]
    if jobs > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_monitor_chunk, chunks))
    else:
        results = [_monitor_chunk(c) for c in chunks]
    records = [r for chunk in results for r in chunk]

    verdicts = tuple(v for v, _ in records)
    robustness = tuple(r for _, r in records)
    successes = sum(verdicts)
    rob = np.asarray(robustness)
    ci_low, ci_high = wilson_interval(successes, n_runs, alpha)
    sat = rob[np.asarray(verdicts, dtype=bool)]
    unsat = rob[~np.asarray(verdicts, dtype=bool)]
    # a constant sample (e.g. all +inf for a trivially true formula) has
    # spread zero; plain std would produce inf - inf there
    rob_std = 0.0 if np.all(rob == rob[0]) else float(rob.std())
    return SMCEstimate(
        runs=n_runs,
        successes=successes,
        p_hat=successes / n_runs,
        ci_low=ci_low,
        ci_high=ci_high,
        alpha=alpha,
        rob_mean=float(rob.mean()),
        rob_std=rob_std,
        rob_mean_given_true=float(sat.mean()) if sat.size else None,
        rob_mean_given_false=float(unsat.mean()) if unsat.size else None,
        verdicts=verdicts,
        robustness=robustness,
    )


def sweep(
    generator_family: Callable[[float], Callable],
    formula: Formula,
    space: SpaceModel,
    location: str,
    parameter_values: Sequence[float],
    n_runs: int,
    alpha: float = 0.05,
    master_seed: int = 0,
    jobs: int = 1,
) -> SweepResult:
    """Estimate across a parameter grid and correlate p_hat with rob_mean.

    ``generator_family(value)`` returns the per-run generator for one sweep
    point.  Values must be strictly increasing and at least three points are
    needed for the correlation to be meaningful; a constant series yields
    ``pearson_r = None``.
    """
    values = [float(v) for v in parameter_values]
    if len(values) < 3:
        raise ValueError("a sweep needs at least three parameter values")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError("sweep parameter values must be strictly increasing")
    points = []
    for idx, value in enumerate(values):
        generator = generator_family(value)
        est = estimate(
            generator, formula, space, location, n_runs,
            alpha=alpha, master_seed=master_seed, jobs=jobs, seed_prefix=(idx,),
        )
        points.append((value, est))
    r = pearson([e.p_hat for _, e in points], [e.rob_mean for _, e in points])
    return SweepResult(points=tuple(points), pearson_r=r)
