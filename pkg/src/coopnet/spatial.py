"""Spatial substrate: arenas, node placement, mobility, and neighbor graphs.

Positions are float64 arrays of shape (n, 2) in meters.  One simulation slot
is the time unit, so a speed in m/s is also a per-slot step length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ArenaConfig:
    """Rectangular arena with either periodic (torus) or reflecting walls."""

    width: float
    height: float
    boundary: str = "torus"

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("arena must have positive width and height")
        if self.boundary not in ("torus", "reflect"):
            raise ValueError(f"unknown boundary rule {self.boundary!r}")

    @property
    def size(self) -> np.ndarray:
        return np.array([self.width, self.height])

    def wrap(self, positions: np.ndarray) -> np.ndarray:
        """Map raw coordinates back into the arena.

        Torus arenas wrap modulo the side lengths; reflecting arenas fold the
        excursion back inside (a triangle wave with period twice the side).
        """
        pos = np.asarray(positions, dtype=float)
        size = self.size
        if self.boundary == "torus":
            out = np.mod(pos, size)
            # np.mod of a tiny negative can round up to the modulus itself
            out[out >= size] = 0.0
            return out
        folded = np.mod(pos, 2.0 * size)
        return np.where(folded > size, 2.0 * size - folded, folded)

    def displacement(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Shortest vector(s) from a to b under the arena's metric."""
        d = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
        if self.boundary == "torus":
            size = self.size
            d = d - size * np.round(d / size)
        return d

    def distance(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        d = self.displacement(a, b)
        return np.sqrt(np.sum(d * d, axis=-1))

    def diameter(self) -> float:
        """Largest possible node separation under the arena's metric."""
        if self.boundary == "torus":
            return math.hypot(self.width / 2.0, self.height / 2.0)
        return math.hypot(self.width, self.height)


def place_uniform(n: int, arena: ArenaConfig, rng: np.random.Generator) -> np.ndarray:
    """Drop n nodes independently and uniformly over the arena."""
    if n < 1:
        raise ValueError("need at least one node")
    return rng.random((n, 2)) * arena.size


def step_random_direction(
    positions: np.ndarray,
    speed: float,
    rng: np.random.Generator,
    arena: ArenaConfig,
    heading: np.ndarray | None = None,
) -> np.ndarray:
    """Advance every node one slot in an independently drawn direction.

    Each node moves exactly ``speed`` meters along a heading drawn uniformly
    from [0, 2*pi); pass ``heading`` explicitly to pin the directions.
    """
    if speed < 0:
        raise ValueError("speed must be non-negative")
    pos = np.atleast_2d(np.asarray(positions, dtype=float))
    if heading is None:
        heading = rng.uniform(0.0, TWO_PI, len(pos))
    theta = np.broadcast_to(np.asarray(heading, dtype=float), (len(pos),))
    delta = speed * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    out = arena.wrap(pos + delta)
    return out.reshape(np.shape(positions))


def truncated_pareto(
    rng: np.random.Generator, exponent: float, lo: float, hi: float, size=None
) -> np.ndarray:
    """Sample a power law with tail exponent ``exponent`` truncated to [lo, hi].

    The complementary CDF is proportional to x**(-exponent) inside the
    support, so a log-log survival plot has slope -exponent until truncation
    takes over.  ``lo == hi`` degenerates to a point mass.
    """
    if exponent <= 0:
        raise ValueError("exponent must be positive")
    if not (0 < lo <= hi):
        raise ValueError("need 0 < lo <= hi")
    u = rng.random(size)
    if lo == hi:
        return np.broadcast_to(np.float64(lo), np.shape(u)).copy()
    a = -exponent
    return (lo**a - u * (lo**a - hi**a)) ** (1.0 / a)


@dataclass(frozen=True)
class LevyParams:
    """Levy walk: power-law flights at constant speed, power-law pauses.

    Flight lengths (meters) follow a truncated power law with tail exponent
    ``alpha`` on [flight_min, flight_max]; pause durations (slots) follow one
    with exponent ``beta`` on [1, pause_max].  ``pause_max`` below one slot
    disables pausing entirely.
    """

    alpha: float = 0.9
    beta: float = 0.9
    velocity: float = 5.0
    flight_min: float = 1.0
    flight_max: float = 1000.0
    pause_max: float = 10.0

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if not (0 < self.flight_min <= self.flight_max):
            raise ValueError("need 0 < flight_min <= flight_max")
        if self.velocity < 0:
            raise ValueError("velocity must be non-negative")
        if self.pause_max < 0:
            raise ValueError("pause_max must be non-negative")


_PAUSE_MIN_SLOTS = 1.0


@dataclass
class LevyState:
    """Per-node walk bookkeeping: meters left to fly, slots left to pause."""

    flight_left: np.ndarray
    pause_left: np.ndarray
    heading: np.ndarray

    @classmethod
    def fresh(cls, n: int) -> "LevyState":
        return cls(np.zeros(n), np.zeros(n), np.zeros(n))


def step_levy(
    state: LevyState,
    positions: np.ndarray,
    params: LevyParams,
    rng: np.random.Generator,
    arena: ArenaConfig,
) -> np.ndarray:
    """Advance one slot of the Levy walk, mutating ``state``.

    Nodes mid-pause sit still and burn one slot.  Everyone else flies
    ``velocity`` meters along the current flight (truncated at the flight's
    end); a node with no flight left draws a new length and heading first,
    and a node that just finished a flight draws a pause.
    """
    pos = np.array(positions, dtype=float)
    pausing = state.pause_left > 0

    starters = ~pausing & (state.flight_left <= 0)
    k = int(starters.sum())
    if k:
        state.flight_left[starters] = truncated_pareto(
            rng, params.alpha, params.flight_min, params.flight_max, k
        )
        state.heading[starters] = rng.uniform(0.0, TWO_PI, k)

    movers = ~pausing & (state.flight_left > 0)
    if movers.any():
        step = np.minimum(params.velocity, state.flight_left[movers])
        theta = state.heading[movers]
        pos[movers] += step[:, None] * np.stack([np.cos(theta), np.sin(theta)], axis=1)
        state.flight_left[movers] -= step

    ended = movers & (state.flight_left <= 0)
    m = int(ended.sum())
    if m and params.pause_max >= _PAUSE_MIN_SLOTS:
        state.pause_left[ended] = truncated_pareto(
            rng, params.beta, _PAUSE_MIN_SLOTS, params.pause_max, m
        )

    state.pause_left[pausing] -= 1.0
    return arena.wrap(pos)


class Static:
    """Mobility model that never moves anyone."""

    speed = 0.0
    is_static = True

    def init_state(self, n: int) -> None:
        return None

    def advance(self, positions, state, rng, arena):
        return positions

    def __repr__(self):
        return "Static()"


@dataclass(frozen=True)
class RandomDirection:
    """Fresh uniform heading every slot, fixed step length."""

    speed: float = 5.0

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError("speed must be non-negative")

    @property
    def is_static(self) -> bool:
        return self.speed == 0

    def init_state(self, n: int) -> None:
        return None

    def advance(self, positions, state, rng, arena):
        return step_random_direction(positions, self.speed, rng, arena)


@dataclass(frozen=True)
class LevyWalk:
    """Levy walk mobility wrapper around :func:`step_levy`."""

    params: LevyParams = LevyParams()

    @property
    def speed(self) -> float:
        return self.params.velocity

    @property
    def is_static(self) -> bool:
        return self.params.velocity == 0

    def init_state(self, n: int) -> LevyState:
        return LevyState.fresh(n)

    def advance(self, positions, state, rng, arena):
        return step_levy(state, positions, self.params, rng, arena)


class NeighborGraph:
    """Undirected, irreflexive neighbor lists in compressed-row form.

    ``indices[indptr[i]:indptr[i+1]]`` holds node i's neighbors in ascending
    order.  Every edge appears in both endpoint rows.
    """

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self.indptr = indptr
        self.indices = indices
        self._csr = None
        self._rows = None

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "NeighborGraph":
        """Build from an iterable of (i, j) pairs, one entry per edge."""
        pairs = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs)
        pairs = pairs.reshape(-1, 2).astype(np.int64)
        if len(pairs):
            if pairs.min() < 0 or pairs.max() >= n:
                raise ValueError("edge endpoint out of range")
            if (pairs[:, 0] == pairs[:, 1]).any():
                raise ValueError("self-loops are not allowed")
        src = np.concatenate([pairs[:, 0], pairs[:, 1]])
        dst = np.concatenate([pairs[:, 1], pairs[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, indptr, dst)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def mean_degree(self) -> float:
        return float(self.degrees.mean()) if self.n else 0.0

    def n_edges(self) -> int:
        return len(self.indices) // 2

    def has_edge(self, i: int, j: int) -> bool:
        row = self.neighbors(i)
        k = np.searchsorted(row, j)
        return k < len(row) and row[k] == j

    def edge_pairs(self) -> np.ndarray:
        """All edges once, as an (m, 2) array with i < j, lexicographic."""
        rows, cols = self.edge_arrays()
        keep = rows < cols
        return np.stack([rows[keep], cols[keep]], axis=1)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Directed expansion (center, neighbor) aligned with ``indices``."""
        if self._rows is None:
            self._rows = np.repeat(np.arange(self.n), self.degrees)
        return self._rows, self.indices

    def neighbor_sum(self, values: np.ndarray) -> np.ndarray:
        """Per-node sum of ``values`` over open neighborhoods."""
        if self._csr is None:
            data = np.ones(len(self.indices))
            self._csr = sparse.csr_matrix(
                (data, self.indices, self.indptr), shape=(self.n, self.n)
            )
        return self._csr @ np.asarray(values, dtype=float)


def brute_force_pairs(
    positions: np.ndarray, cutoff: float, arena: ArenaConfig
) -> np.ndarray:
    """All node pairs within ``cutoff``, by exhaustive O(n^2) comparison."""
    pos = np.asarray(positions, dtype=float)
    n = len(pos)
    ii, jj = np.triu_indices(n, 1)
    d = arena.distance(pos[ii], pos[jj])
    keep = d <= cutoff
    return np.stack([ii[keep], jj[keep]], axis=1)


def _kdtree_pairs(
    positions: np.ndarray, cutoff: float, arena: ArenaConfig
) -> np.ndarray:
    """Candidate pairs within ``cutoff`` via a kd-tree, sorted (i, j), i < j."""
    pos = np.asarray(positions, dtype=float)
    if arena.boundary == "torus":
        tree = cKDTree(pos, boxsize=[arena.width, arena.height])
    else:
        tree = cKDTree(pos)
    pairs = tree.query_pairs(cutoff, output_type="ndarray")
    if len(pairs) == 0:
        return pairs.reshape(0, 2)
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    order = np.lexsort((hi, lo))
    return np.stack([lo[order], hi[order]], axis=1)


def pairs_within(
    positions: np.ndarray, cutoff: float, arena: ArenaConfig, method: str = "kdtree"
) -> np.ndarray:
    """Node pairs at arena distance <= cutoff, in canonical (i < j) order.

    Both methods return the identical pair set; the brute-force path exists
    as an independent cross-check of the indexed one.
    """
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    if method == "kdtree":
        return _kdtree_pairs(positions, cutoff, arena)
    if method == "brute":
        return brute_force_pairs(positions, cutoff, arena)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class UnitDisk:
    """Deterministic connectivity: link iff distance <= radius."""

    radius: float = 75.0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class QuasiUnitDisk:
    """Random connectivity: certain below r_inner, impossible above r_outer.

    Inside the band the link probability decays as
    ``((r_outer - x) / (r_outer - r_inner)) ** zeta``, continuous at both
    band edges.  ``complement_band`` switches to the complementary form
    ``1 - (...) ** zeta``, which instead rises with distance and jumps at
    r_inner; it is kept selectable for side-by-side comparison.
    """

    r_inner: float = 40.0
    r_outer: float = 75.0
    zeta: float = 0.3
    complement_band: bool = False

    def __post_init__(self):
        if not (0 < self.r_inner < self.r_outer):
            raise ValueError("need 0 < r_inner < r_outer")
        if self.zeta <= 0:
            raise ValueError("zeta must be positive")


def quasi_connect_probability(distance, model: QuasiUnitDisk):
    """Per-pair link probability at the given distance(s)."""
    x = np.asarray(distance, dtype=float)
    span = model.r_outer - model.r_inner
    band = np.clip((model.r_outer - x) / span, 0.0, 1.0) ** model.zeta
    if model.complement_band:
        band = 1.0 - band
    p = np.where(x < model.r_inner, 1.0, np.where(x > model.r_outer, 0.0, band))
    return p if p.shape else float(p)


def connect_unit_disk(
    positions: np.ndarray,
    radius: float,
    arena: ArenaConfig,
    method: str = "kdtree",
) -> NeighborGraph:
    """Unit-disk graph: every pair within ``radius`` is linked."""
    pairs = pairs_within(positions, radius, arena, method)
    return NeighborGraph.from_pairs(len(positions), pairs)


def connect_quasi_unit_disk(
    positions: np.ndarray,
    model: QuasiUnitDisk,
    arena: ArenaConfig,
    rng: np.random.Generator,
    method: str = "kdtree",
) -> NeighborGraph:
    """Quasi-unit-disk graph with one symmetric coin per candidate pair.

    Pairs are visited in canonical (i < j) order so the same RNG state always
    yields the same graph regardless of the candidate search method.
    """
    pairs = pairs_within(positions, model.r_outer, arena, method)
    pos = np.asarray(positions, dtype=float)
    if len(pairs) == 0:
        return NeighborGraph.from_pairs(len(pos), pairs)
    d = arena.distance(pos[pairs[:, 0]], pos[pairs[:, 1]])
    p = quasi_connect_probability(d, model)
    keep = rng.random(len(pairs)) < p
    return NeighborGraph.from_pairs(len(pos), pairs[keep])


def clustering_coefficient(graph: NeighborGraph, node: int) -> float:
    """Fraction of a node's neighbor pairs that are themselves linked.

    Zero by convention for degree 0 or 1.
    """
    nbrs = graph.neighbors(node)
    k = len(nbrs)
    if k <= 1:
        return 0.0
    links = 0
    for a in range(k):
        row = graph.neighbors(nbrs[a])
        links += np.searchsorted(row, nbrs[a + 1 :], side="right").sum() - np.searchsorted(
            row, nbrs[a + 1 :], side="left"
        ).sum()
    return 2.0 * links / (k * (k - 1))


def clustering_coefficients(graph: NeighborGraph) -> np.ndarray:
    return np.array([clustering_coefficient(graph, i) for i in range(graph.n)])
