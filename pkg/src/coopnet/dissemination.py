"""Packet buffers, broadcast dynamics, and coverage accounting.

Buffers are boolean arrays of shape (n_nodes, n_packets): ``received`` marks
what a node holds, ``transmitted`` what it has already sent at least once.
Both only ever gain True entries, and transmitted stays a subset of received.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spatial import NeighborGraph


@dataclass
class DisseminationState:
    """Mutable packet bookkeeping for one run."""

    received: np.ndarray
    transmitted: np.ndarray
    seeder: np.ndarray
    source_packet: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.received.shape[0]

    @property
    def n_packets(self) -> int:
        return self.received.shape[1]

    def received_counts(self) -> np.ndarray:
        return self.received.sum(axis=1)

    def pending(self) -> int:
        """Total node-packet pairs still missing across the network."""
        return int(self.received.size - self.received.sum())

    def delivered_fraction(self) -> float:
        return float(self.received.sum() / self.received.size)


def init_sources(
    n_nodes: int, n_sources: int, rng: np.random.Generator
) -> tuple[DisseminationState, np.ndarray, np.ndarray]:
    """Start an epidemic-style run: each source holds only its own packet.

    Picks ``n_sources`` distinct nodes, assigns packet k to the k-th source,
    and returns (state, coop, frozen) where exactly the sources cooperate
    and start out frozen.
    """
    if not (1 <= n_sources <= n_nodes):
        raise ValueError("need 1 <= n_sources <= n_nodes")
    chosen = np.sort(rng.choice(n_nodes, size=n_sources, replace=False))
    received = np.zeros((n_nodes, n_sources), dtype=bool)
    received[chosen, np.arange(n_sources)] = True
    source_packet = np.full(n_nodes, -1, dtype=np.int64)
    source_packet[chosen] = np.arange(n_sources)
    coop = np.zeros(n_nodes, dtype=bool)
    coop[chosen] = True
    state = DisseminationState(
        received, np.zeros_like(received), np.zeros(n_nodes, dtype=bool), source_packet
    )
    return state, coop, coop.copy()


def init_seeders(
    n_nodes: int,
    n_seeders: int,
    n_packets: int,
    initial_coop_ratio: float,
    rng: np.random.Generator,
) -> tuple[DisseminationState, np.ndarray, np.ndarray]:
    """Start a content-download run: seeders hold the full catalogue.

    Seeders are permanently frozen cooperators; every other node starts with
    an empty buffer and cooperates with probability ``initial_coop_ratio``.
    """
    if not (1 <= n_seeders <= n_nodes):
        raise ValueError("need 1 <= n_seeders <= n_nodes")
    if n_packets < 1:
        raise ValueError("need at least one packet")
    if not (0.0 <= initial_coop_ratio <= 1.0):
        raise ValueError("initial_coop_ratio must lie in [0, 1]")
    chosen = np.sort(rng.choice(n_nodes, size=n_seeders, replace=False))
    seeder = np.zeros(n_nodes, dtype=bool)
    seeder[chosen] = True
    received = np.zeros((n_nodes, n_packets), dtype=bool)
    received[seeder] = True
    coop = rng.random(n_nodes) < initial_coop_ratio
    coop[seeder] = True
    state = DisseminationState(
        received,
        np.zeros_like(received),
        seeder,
        np.full(n_nodes, -1, dtype=np.int64),
    )
    return state, coop, seeder.copy()


def choose_packet(
    received_row: np.ndarray, transmitted_row: np.ndarray, rng: np.random.Generator
):
    """Pick what one node sends this slot.

    Uniform over packets held but never sent; if everything held was already
    sent at least once, uniform over the whole buffer; None when empty.
    """
    fresh = received_row & ~transmitted_row
    pool = fresh if fresh.any() else received_row
    ids = np.flatnonzero(pool)
    if len(ids) == 0:
        return None
    return int(ids[rng.integers(len(ids))])


@dataclass
class BroadcastResult:
    """What one slot of broadcasting did, for payoffs and metrics."""

    useful: np.ndarray
    senders: np.ndarray
    packet_choice: np.ndarray


def broadcast_step(
    graph: NeighborGraph,
    coop: np.ndarray,
    state: DisseminationState,
    rng: np.random.Generator,
) -> BroadcastResult:
    """One synchronous broadcast slot; mutates ``state`` buffers.

    Usefulness is judged on the buffers as they stood at the start of the
    slot: ``useful[j, i]`` is True iff j cooperates, is i's neighbor, and
    holds at least one packet i lacks (never for j == i).  Every cooperator
    with a non-empty buffer then transmits one packet to all its neighbors;
    seeders draw uniformly over the whole catalogue, everyone else prefers
    packets not yet sent.  There is no collision loss.
    """
    coop = np.asarray(coop, dtype=bool)
    n, m = state.received.shape
    centers, nbrs = graph.edge_arrays()

    novel = np.zeros(len(centers), dtype=bool)
    if len(centers):
        novel = (state.received[nbrs] & ~state.received[centers]).any(axis=1)
    useful = np.zeros((n, n), dtype=bool)
    flags = coop[nbrs] & novel
    useful[nbrs[flags], centers[flags]] = True

    # one random score per node-packet pair keeps the draw count fixed
    scores = rng.random((n, m))
    prefer = state.received & ~state.transmitted
    prefer[state.seeder] = False
    pool = np.where(prefer.any(axis=1)[:, None], prefer, state.received)
    choice = np.argmax(np.where(pool, scores, -1.0), axis=1)

    senders = coop & state.received.any(axis=1)
    state.transmitted[senders, choice[senders]] = True
    if len(centers):
        hit = senders[nbrs]
        state.received[centers[hit], choice[nbrs[hit]]] = True

    return BroadcastResult(useful, senders, np.where(senders, choice, -1))


def release_sources(state: DisseminationState, frozen: np.ndarray) -> np.ndarray:
    """Unfreeze sources that have sent their own packet at least once."""
    frozen = np.asarray(frozen, dtype=bool).copy()
    is_source = state.source_packet >= 0
    sent_own = np.zeros_like(frozen)
    if is_source.any():
        idx = np.flatnonzero(is_source)
        sent_own[idx] = state.transmitted[idx, state.source_packet[idx]]
    frozen &= ~(is_source & sent_own)
    return frozen


@dataclass(frozen=True)
class CoverageMetrics:
    """Distributional summary of how far the catalogue has spread."""

    counts: np.ndarray
    ecdf_support: np.ndarray
    ecdf: np.ndarray
    pending: int
    delivered_fraction: float


def coverage_metrics(state: DisseminationState) -> CoverageMetrics:
    """Per-node packet counts plus their right-continuous ECDF over 0..M."""
    counts = state.received_counts()
    support = np.arange(state.n_packets + 1)
    ecdf = (counts[None, :] <= support[:, None]).mean(axis=1)
    return CoverageMetrics(
        counts=counts,
        ecdf_support=support,
        ecdf=ecdf,
        pending=state.pending(),
        delivered_fraction=state.delivered_fraction(),
    )
