"""Reference trace generators and trace file I/O.

The main generator integrates a two-species reaction-diffusion system on a
K x K four-neighbour grid with explicit fixed-step Euler stepping; a positive
noise intensity switches it to Euler-Maruyama with independent per-cell
Gaussian increments.  Cell ``(i, j)`` couples to its 2-4 lattice neighbours
through the neighbourhood mean of each species.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import IntegrationError, TraceFormatError
from .signals import as_time
from .space import SpaceModel, regular_grid


@dataclass(frozen=True, eq=False)
class Trace:
    """Spatio-temporal trace on a uniform time grid.

    ``values[l, k, v]`` is variable ``v`` at location index ``l`` and time
    ``k * step``; the layout matches ``SpaceModel.locations`` row order.
    """

    locations: tuple[str, ...]
    variables: tuple[str, ...]
    step: Fraction
    values: np.ndarray  # (locations, samples, variables)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 3:
            raise ValueError("trace values must have shape (locations, samples, variables)")
        if values.shape[0] != len(self.locations) or values.shape[2] != len(self.variables):
            raise ValueError("trace shape does not match location/variable lists")
        if values.shape[1] < 1:
            raise ValueError("a trace needs at least one sample")
        object.__setattr__(self, "values", values)

    @property
    def n_samples(self) -> int:
        return self.values.shape[1]

    @property
    def horizon(self) -> Fraction:
        return self.step * (self.n_samples - 1)

    def times(self) -> list[Fraction]:
        return [self.step * k for k in range(self.n_samples)]

    def var(self, name: str) -> np.ndarray:
        try:
            v = self.variables.index(name)
        except ValueError:
            raise KeyError(f"trace has no variable {name!r}") from None
        return self.values[:, :, v]

    def location_index(self, location: str) -> int:
        try:
            return self.locations.index(location)
        except ValueError:
            raise KeyError(f"trace has no location {location!r}") from None


@dataclass(frozen=True)
class TuringParams:
    """Reaction-diffusion run configuration.

    ``epsilon = 0`` gives the deterministic system; otherwise each cell of
    each species receives an independent ``epsilon * sqrt(dt) * N(0,1)``
    increment per step (unit cell size).
    """

    k: int = 32
    r1: float = 1.0
    r2: float = -12.0
    r3: float = -1.0
    r4: float = 16.0
    diff1: float = 5.6
    diff2: float = 25.5
    dt: float = 0.01
    t_end: float = 50.0
    sample_step: float = 0.5
    init_low: float = 0.0
    init_high: float = 16.0
    epsilon: float = 0.0
    seed: int | tuple[int, ...] = 0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("grid size must be at least 2")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.init_low > self.init_high:
            raise ValueError("init_low must not exceed init_high")
        if self.epsilon < 0:
            raise ValueError("noise intensity must be non-negative")
        steps = self.sample_step / self.dt
        if self.sample_step <= 0 or abs(steps - round(steps)) > 1e-9:
            raise ValueError("sample_step must be a positive multiple of dt")
        total = self.t_end / self.sample_step
        if self.t_end <= 0 or abs(total - round(total)) > 1e-9:
            raise ValueError("t_end must be a positive multiple of sample_step")

    @property
    def steps_per_sample(self) -> int:
        return round(self.sample_step / self.dt)

    @property
    def n_samples(self) -> int:
        return round(self.t_end / self.sample_step) + 1

    def grid(self) -> SpaceModel:
        return regular_grid(self.k)


def _neighbour_stats(k: int) -> np.ndarray:
    """Number of lattice neighbours per cell: 4 inside, 3 on edges, 2 at corners."""
    counts = np.full((k, k), 4.0)
    counts[0, :] -= 1
    counts[-1, :] -= 1
    counts[:, 0] -= 1
    counts[:, -1] -= 1
    return counts


def _neighbour_mean(field: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Mean over existing lattice neighbours; ``field`` is (..., K, K)."""
    total = np.zeros_like(field)
    total[..., 1:, :] += field[..., :-1, :]
    total[..., :-1, :] += field[..., 1:, :]
    total[..., :, 1:] += field[..., :, :-1]
    total[..., :, :-1] += field[..., :, 1:]
    return total / counts


def simulate_turing(params: TuringParams) -> Trace:
    """Integrate one run and return the trace sampled every ``sample_step``."""
    return simulate_turing_many(params, [params.seed])[0]


def simulate_turing_many(params: TuringParams, seeds: Sequence) -> list[Trace]:
    """Integrate several runs with per-run random streams, batched per step.

    Each run draws from its own generator seeded by ``SeedSequence(seed)``;
    initial conditions come first, then one noise block per sample interval,
    so a run's trace depends only on its seed, not on the batch around it.
    """
    k = params.k
    n_runs = len(seeds)
    if n_runs == 0:
        return []
    rngs = [np.random.default_rng(np.random.SeedSequence(s)) for s in seeds]
    counts = _neighbour_stats(k)

    state = np.empty((n_runs, 2, k, k))
    for r, rng in enumerate(rngs):
        state[r] = rng.uniform(params.init_low, params.init_high, size=(2, k, k))

    n_samples = params.n_samples
    block = params.steps_per_sample
    out = np.empty((n_runs, n_samples, 2, k, k))
    out[:, 0] = state

    dt = params.dt
    noise_scale = params.epsilon * math.sqrt(dt)
    # divergence surfaces as overflow right before the finiteness check
    # raises a proper error, so the low-level warnings are noise
    with np.errstate(over="ignore", invalid="ignore"):
        for sample in range(1, n_samples):
            if noise_scale > 0.0:
                noise = np.stack(
                    [rng.standard_normal((block, 2, k, k)) for rng in rngs], axis=0
                )
            for s in range(block):
                xa = state[:, 0]
                xb = state[:, 1]
                dxa = params.r1 * xa * xb - xa + params.r2 + params.diff1 * (
                    _neighbour_mean(xa, counts) - xa
                )
                dxb = params.r3 * xa * xb + params.r4 + params.diff2 * (
                    _neighbour_mean(xb, counts) - xb
                )
                state[:, 0] = xa + dt * dxa
                state[:, 1] = xb + dt * dxb
                if noise_scale > 0.0:
                    state += noise_scale * noise[:, s]
                # concentrations cannot go negative; without this projection
                # the spot regions drive species A through zero and the
                # explicit scheme diverges
                np.maximum(state, 0.0, out=state)
            if not np.isfinite(state).all():
                bad = np.flatnonzero(~np.isfinite(state.reshape(n_runs, -1)).all(axis=1))
                t_bad = sample * params.sample_step
                raise IntegrationError(
                    f"state diverged by t={t_bad:g} (run {bad[0]}); "
                    "reduce dt or the noise intensity",
                    time=t_bad,
                )
            out[:, sample] = state

    locations = tuple(f"{i}_{j}" for i in range(1, k + 1) for j in range(1, k + 1))
    step = as_time(params.sample_step)
    traces = []
    for r in range(n_runs):
        # (samples, species, K, K) -> (cells, samples, species)
        values = out[r].reshape(n_samples, 2, k * k).transpose(2, 0, 1)
        traces.append(Trace(locations, ("xA", "xB"), step, values.copy()))
    return traces


@dataclass(frozen=True)
class TuringGenerator:
    """Per-run trace source for the statistical harness."""

    params: TuringParams

    def __call__(self, seed) -> Trace:
        return simulate_turing(replace(self.params, seed=tuple(seed)))

    def many(self, seeds: Iterable) -> list[Trace]:
        return simulate_turing_many(self.params, [tuple(s) for s in seeds])


# ---------------------------------------------------------------------------
# Trace files
# ---------------------------------------------------------------------------


def write_trace(trace: Trace, path) -> None:
    """CSV with header ``location,time,<var...>`` and one row per (location, time)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("location,time," + ",".join(trace.variables) + "\n")
        times = [float(t) for t in trace.times()]
        for l, loc in enumerate(trace.locations):
            for s, t in enumerate(times):
                row = ",".join(repr(float(v)) for v in trace.values[l, s])
                fh.write(f"{loc},{t!r},{row}\n")


def read_trace(path, space: SpaceModel) -> Trace:
    """Parse a trace CSV and check it against the space model.

    Every location of the space must appear with the same uniform time grid;
    missing cells, unknown locations and ragged grids are rejected with the
    offending line number.
    """
    per_location: dict[str, dict[Fraction, list[float]]] = {}
    variables: tuple[str, ...] | None = None
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        fields = header.split(",")
        if len(fields) < 3 or fields[0] != "location" or fields[1] != "time":
            raise TraceFormatError("expected header 'location,time,<variables>'", line=1)
        variables = tuple(fields[2:])
        for lineno, raw in enumerate(fh, start=2):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2 + len(variables):
                raise TraceFormatError(
                    f"expected {2 + len(variables)} fields, found {len(parts)}", line=lineno
                )
            loc = parts[0]
            if loc not in space._index:
                raise TraceFormatError(f"unknown location {loc!r}", line=lineno)
            try:
                t = Fraction(parts[1])
                row = [float(x) for x in parts[2:]]
            except (ValueError, ZeroDivisionError):
                raise TraceFormatError(f"malformed number in {line!r}", line=lineno) from None
            per_location.setdefault(loc, {})[t] = row

    missing = [loc for loc in space.locations if loc not in per_location]
    if missing:
        raise TraceFormatError(f"no samples for location {missing[0]!r}")
    times = sorted(per_location[space.locations[0]])
    if not times:
        raise TraceFormatError("empty trace")
    if times[0] != 0:
        raise TraceFormatError("trace must start at time 0")
    step = times[1] - times[0] if len(times) > 1 else Fraction(1)
    for k, t in enumerate(times):
        if t != step * k:
            raise TraceFormatError(f"ragged time grid at t={t}")
    values = np.empty((len(space.locations), len(times), len(variables)))
    for l, loc in enumerate(space.locations):
        cells = per_location[loc]
        if sorted(cells) != times:
            raise TraceFormatError(f"location {loc!r} does not cover the common time grid")
        for s, t in enumerate(times):
            values[l, s] = cells[t]
    return Trace(tuple(space.locations), variables, step, values)
