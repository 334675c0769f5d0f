"""Weighted undirected graph space models with precomputed all-pairs distances.

A space is a finite set of named locations connected by positively weighted,
undirected edges.  All shortest-path distances are computed once at
construction; every later query (distance ranges, external boundaries,
neighbourhood scans in the monitors) reads the cached matrix.  Disconnected
pairs carry ``inf`` and never satisfy a range predicate.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import GraphError

Edge = tuple[str, str, float]


@dataclass(frozen=True, eq=False)
class SpaceModel:
    """Immutable weighted graph plus its distance matrix.

    Attributes
    ----------
    locations : tuple[str, ...]
        Ordered location ids.  The order fixes the row/column layout of
        ``dist`` and of every per-location array the monitors produce.
    edges : tuple[Edge, ...]
        Undirected edges, each listed once as ``(src, dst, weight)``.
    dist : np.ndarray
        ``(L, L)`` matrix of shortest-path costs, ``inf`` for disconnected
        pairs, zero diagonal.
    diameter : float
        Largest finite entry of ``dist`` (0.0 for a single location).
    hop_diameter : int
        Largest finite hop count between connected locations; bounds the
        number of sweeps any neighbourhood fixpoint needs to converge.
    grid_shape : tuple[int, int] | None
        Set when the model was built by :func:`regular_grid`; lets the
        monitors use lattice-shaped fast paths.
    """

    locations: tuple[str, ...]
    edges: tuple[Edge, ...]
    dist: np.ndarray
    diameter: float
    hop_diameter: int
    grid_shape: tuple[int, int] | None = None
    _index: dict[str, int] = field(repr=False, default_factory=dict)
    _adjacency: tuple[tuple[int, ...], ...] = field(repr=False, default=())

    def index_of(self, location: str) -> int:
        try:
            return self._index[location]
        except KeyError:
            raise GraphError(f"unknown location {location!r}") from None

    @property
    def n_locations(self) -> int:
        return len(self.locations)

    def neighbours(self, location: str) -> frozenset[str]:
        i = self.index_of(location)
        return frozenset(self.locations[j] for j in self._adjacency[i])

    def neighbour_index(self) -> tuple[np.ndarray, np.ndarray]:
        """Padded neighbour table for vectorised sweeps.

        Returns ``(idx, valid)`` of shape ``(L, max_degree)``; padding rows
        point at the extra index ``L`` so callers can append a sentinel row.
        """
        n = self.n_locations
        max_deg = max((len(a) for a in self._adjacency), default=0)
        max_deg = max(max_deg, 1)
        idx = np.full((n, max_deg), n, dtype=np.intp)
        valid = np.zeros((n, max_deg), dtype=bool)
        for i, nbrs in enumerate(self._adjacency):
            idx[i, : len(nbrs)] = nbrs
            valid[i, : len(nbrs)] = True
        return idx, valid

    def range_mask(self, d1: float, d2: float) -> np.ndarray:
        """Boolean ``(L, L)`` matrix; entry ``[i, j]`` is true when location
        ``j`` lies at finite distance within ``[d1, d2]`` of location ``i``."""
        finite = np.isfinite(self.dist)
        return finite & (self.dist >= d1) & (self.dist <= d2)


def build_space(locations: Sequence[str], edges: Iterable[Edge]) -> SpaceModel:
    """Validate the graph and precompute distances and diameters.

    Raises
    ------
    GraphError
        On an empty location list, duplicate ids, self-loops, repeated
        edges, non-positive weights, or edges naming unknown locations.
    """
    locations = tuple(str(loc) for loc in locations)
    if not locations:
        raise GraphError("a space needs at least one location")
    index: dict[str, int] = {}
    for i, loc in enumerate(locations):
        if loc in index:
            raise GraphError(f"duplicate location id {loc!r}")
        index[loc] = i

    n = len(locations)
    adjacency: list[set[int]] = [set() for _ in range(n)]
    clean_edges: list[Edge] = []
    seen_pairs: set[tuple[int, int]] = set()
    for src, dst, weight in edges:
        if src not in index:
            raise GraphError(f"edge references unknown location {src!r}")
        if dst not in index:
            raise GraphError(f"edge references unknown location {dst!r}")
        weight = float(weight)
        if not (weight > 0.0) or not math.isfinite(weight):
            raise GraphError(f"edge {src!r}-{dst!r} has non-positive weight {weight}")
        i, j = index[src], index[dst]
        if i == j:
            raise GraphError(f"self-loop on {src!r}")
        key = (min(i, j), max(i, j))
        if key in seen_pairs:
            raise GraphError(f"edge {src!r}-{dst!r} listed twice")
        seen_pairs.add(key)
        adjacency[i].add(j)
        adjacency[j].add(i)
        clean_edges.append((src, dst, weight))

    dist = _all_pairs(n, clean_edges, index, weighted=True)
    hops = _all_pairs(n, clean_edges, index, weighted=False)
    finite = dist[np.isfinite(dist)]
    diameter = float(finite.max()) if finite.size else 0.0
    hop_diameter = int(hops[np.isfinite(hops)].max()) if n else 0

    return SpaceModel(
        locations=locations,
        edges=tuple(clean_edges),
        dist=dist,
        diameter=diameter,
        hop_diameter=hop_diameter,
        _index=index,
        _adjacency=tuple(tuple(sorted(a)) for a in adjacency),
    )


def _all_pairs(n: int, edges: list[Edge], index: dict[str, int], weighted: bool) -> np.ndarray:
    if not edges:
        out = np.full((n, n), np.inf)
        np.fill_diagonal(out, 0.0)
        return out
    rows = [index[s] for s, _, _ in edges]
    cols = [index[d] for _, d, _ in edges]
    data = [w for _, _, w in edges]
    graph = coo_matrix((data, (rows, cols)), shape=(n, n))
    return dijkstra(graph, directed=False, unweighted=not weighted)


def regular_grid(k: int, delta: float = 1.0) -> SpaceModel:
    """K x K four-neighbour lattice with uniform edge weight ``delta``.

    Location ids encode one-based cell coordinates as ``"i_j"``.
    """
    if k < 1:
        raise GraphError("grid size must be at least 1")
    if not (delta > 0):
        raise GraphError("grid spacing must be positive")
    locations = [f"{i}_{j}" for i in range(1, k + 1) for j in range(1, k + 1)]
    edges: list[Edge] = []
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            if i < k:
                edges.append((f"{i}_{j}", f"{i + 1}_{j}", delta))
            if j < k:
                edges.append((f"{i}_{j}", f"{i}_{j + 1}", delta))
    space = build_space(locations, edges)
    return dataclasses.replace(space, grid_shape=(k, k))


def locations_in_range(space: SpaceModel, location: str, d1: float, d2: float) -> frozenset[str]:
    """All locations at finite distance ``d`` from ``location`` with ``d1 <= d <= d2``.

    Bounds are inclusive on both ends; the location itself qualifies when
    ``d1 == 0``.  Disconnected locations never qualify.
    """
    if d1 < 0 or d2 < d1:
        raise ValueError(f"need 0 <= d1 <= d2, got [{d1}, {d2}]")
    row = space.dist[space.index_of(location)]
    hit = np.isfinite(row) & (row >= d1) & (row <= d2)
    return frozenset(space.locations[i] for i in np.flatnonzero(hit))


def external_boundary(space: SpaceModel, region: Iterable[str]) -> frozenset[str]:
    """Locations outside ``region`` sharing an edge with a member of it."""
    inside = {space.index_of(loc) for loc in region}
    out: set[int] = set()
    for i in inside:
        out.update(j for j in space._adjacency[i] if j not in inside)
    return frozenset(space.locations[i] for i in out)


def read_graph(path) -> SpaceModel:
    """Load a space from the TSV graph format.

    The file holds a ``#locations`` header followed by one id per line, then
    ``#edges`` followed by ``src<TAB>dst<TAB>weight`` lines (undirected,
    each edge listed once).  Blank lines are ignored.
    """
    locations: list[str] = []
    edges: list[Edge] = []
    section = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line == "#locations":
                section = "locations"
                continue
            if line == "#edges":
                section = "edges"
                continue
            if section == "locations":
                locations.append(line)
            elif section == "edges":
                parts = line.split("\t")
                if len(parts) != 3:
                    raise GraphError(f"{path}: line {lineno}: expected src<TAB>dst<TAB>weight")
                try:
                    weight = float(parts[2])
                except ValueError:
                    raise GraphError(f"{path}: line {lineno}: bad weight {parts[2]!r}") from None
                edges.append((parts[0], parts[1], weight))
            else:
                raise GraphError(f"{path}: line {lineno}: content before #locations header")
    return build_space(locations, edges)


def write_graph(space: SpaceModel, path) -> None:
    """Write the TSV graph format read by :func:`read_graph`."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("#locations\n")
        for loc in space.locations:
            fh.write(loc + "\n")
        fh.write("#edges\n")
        for src, dst, weight in space.edges:
            fh.write(f"{src}\t{dst}\t{weight!r}\n")
