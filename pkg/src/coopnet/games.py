"""Public-goods payoffs on neighbor graphs and Fermi imitation updates.

Strategies are boolean arrays (True = cooperator).  All payoff functions are
pure: they read the graph and strategy vector and return floats, so the same
inputs always give the same outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spatial import NeighborGraph

VARIANTS = (
    "classical_fixed",
    "classical_diversified",
    "wireless_framework",
    "dissemination",
)


@dataclass(frozen=True)
class GameParams:
    """Knobs shared by every payoff variant.

    ``synergy`` is the public-goods multiplier r, ``cost`` the per-slot
    contribution c of a cooperator, ``kappa`` the Fermi noise temperature,
    and ``noise_sigma`` the standard deviation of additive Gaussian payoff
    noise (0 disables it).  ``gated_update`` restricts imitation to strictly
    richer neighbors; ``unnormalized_benefit`` makes the wireless-framework
    benefit count each cooperator at full cost instead of its degree share.
    """

    synergy: float = 2.0
    cost: float = 1.0
    kappa: float = 1.0
    noise_sigma: float = 0.0
    variant: str = "wireless_framework"
    gated_update: bool = True
    unnormalized_benefit: bool = False

    def __post_init__(self):
        if self.synergy < 0:
            raise ValueError("synergy must be non-negative")
        if self.cost <= 0:
            raise ValueError("cost must be positive")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown payoff variant {self.variant!r}")


def normalized_synergy(synergy: float, mean_degree: float) -> float:
    """Synergy rescaled by mean group size: eta = r / (<k> + 1)."""
    return synergy / (mean_degree + 1.0)


def fermi_probability(payoff_self, payoff_neighbor, kappa: float):
    """Probability of copying the neighbor under the Fermi rule.

    1 / (1 + exp((pi_self - pi_neighbor) / kappa)); large payoff gaps
    saturate smoothly to 0 or 1 instead of overflowing.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    z = (np.asarray(payoff_self, dtype=float) - payoff_neighbor) / kappa
    out = 1.0 / (1.0 + np.exp(np.clip(z, -700.0, 700.0)))
    return out if out.shape else float(out)


def payoff_classical_fixed(
    group_size: int, n_cooperators: int, synergy: float, cost: float, is_cooperator: bool
) -> float:
    """Single fixed-contribution game: everyone pays in via the pot share.

    A group of ``group_size`` players with ``n_cooperators`` contributors
    pays each member r * (n_C / N) * c; cooperators additionally paid c in.
    """
    if group_size < 1:
        raise ValueError("group must have at least one member")
    if not (0 <= n_cooperators <= group_size):
        raise ValueError("cooperator count out of range")
    share = synergy * (n_cooperators / group_size) * cost
    return share - cost if is_cooperator else share


def _closed_sum(graph: NeighborGraph, values: np.ndarray) -> np.ndarray:
    return graph.neighbor_sum(values) + values


def payoff_classical_fixed_all(
    graph: NeighborGraph, coop: np.ndarray, synergy: float, cost: float
) -> np.ndarray:
    """Fixed-contribution payoffs accumulated over all neighborhood games.

    Node i joins one game per member of its closed neighborhood; the game
    centered on j spans j's closed neighborhood.
    """
    coop = np.asarray(coop, dtype=bool)
    sizes = graph.degrees + 1.0
    n_coop_closed = _closed_sum(graph, coop.astype(float))
    share = synergy * cost * n_coop_closed / sizes
    games_joined = sizes
    return _closed_sum(graph, share) - cost * coop * games_joined


def payoff_classical_diversified(
    graph: NeighborGraph, coop: np.ndarray, node: int, synergy: float, cost: float
) -> float:
    """Degree-diversified payoff of one node, by direct summation.

    In the game centered on j every cooperating member x chips in
    c / (k_x + 1); the pot is multiplied by r and split over the k_j + 1
    members.  Node i plays the games centered on its closed neighborhood and
    pays c / (k_i + 1) into each, totalling c when cooperating.
    """
    coop = np.asarray(coop, dtype=bool)
    deg = graph.degrees
    total = 0.0
    centers = np.append(graph.neighbors(node), node)
    for j in centers:
        members = np.append(graph.neighbors(j), j)
        pot = sum(cost / (deg[x] + 1.0) for x in members if coop[x])
        total += synergy * pot / (deg[j] + 1.0)
    if coop[node]:
        total -= cost
    return total


def payoff_classical_diversified_all(
    graph: NeighborGraph, coop: np.ndarray, synergy: float, cost: float
) -> np.ndarray:
    """Vectorized degree-diversified payoffs for every node."""
    coop = np.asarray(coop, dtype=bool)
    sizes = graph.degrees + 1.0
    contrib = cost * coop / sizes
    pot_share = synergy * _closed_sum(graph, contrib) / sizes
    return _closed_sum(graph, pot_share) - cost * coop


def payoff_wireless_framework(
    graph: NeighborGraph,
    coop: np.ndarray,
    synergy: float,
    cost: float,
    unnormalized: bool = False,
) -> np.ndarray:
    """One shared-medium game per node over its closed neighborhood.

    Each cooperator y radiates a degree-shared contribution c / (k_y + 1)
    that node x collects from its closed neighborhood, amplified by r; a
    cooperator pays c in total.  With ``unnormalized=True`` the degree
    sharing is dropped and every cooperating member counts at full cost c.
    """
    coop = np.asarray(coop, dtype=bool)
    if unnormalized:
        benefit = synergy * cost * _closed_sum(graph, coop.astype(float))
    else:
        contrib = cost * coop / (graph.degrees + 1.0)
        benefit = synergy * _closed_sum(graph, contrib)
    return benefit - cost * coop


def cooperator_cost(n_coop_neighbors, cost: float):
    """Per-slot transmission cost shared across local cooperators.

    c / (n^C + 1): the more cooperating neighbors, the cheaper each
    cooperator's slot, the +1 counting the node itself.
    """
    n = np.asarray(n_coop_neighbors, dtype=float)
    if (n < 0).any():
        raise ValueError("cooperator counts must be non-negative")
    out = cost / (n + 1.0)
    return out if out.shape else float(out)


def dissemination_benefit(
    graph: NeighborGraph,
    coop: np.ndarray,
    useful: np.ndarray,
    node: int,
    synergy: float,
    cost: float,
) -> float:
    """Usefulness-weighted benefit of one node, by direct summation.

    ``useful[j, i]`` says whether j currently holds a packet i lacks (and is
    cooperating); the producer always leaves the diagonal zero because a node
    cannot be novel to itself.  Contributions are weighted by each sender's
    shared cost c / (n^C_j + 1) and amplified by r / (n^C_i + 1).
    """
    coop = np.asarray(coop, dtype=bool)
    n_coop = graph.neighbor_sum(coop.astype(float))
    total = 0.0
    for j in np.append(graph.neighbors(node), node):
        if useful[j, node]:
            total += cost / (n_coop[j] + 1.0)
    return synergy * total / (n_coop[node] + 1.0)


def dissemination_benefit_all(
    graph: NeighborGraph,
    coop: np.ndarray,
    useful: np.ndarray,
    synergy: float,
    cost: float,
) -> np.ndarray:
    """Vectorized usefulness-weighted benefits for every node."""
    coop = np.asarray(coop, dtype=bool)
    n_coop = graph.neighbor_sum(coop.astype(float))
    weight = cost / (n_coop + 1.0)
    centers, nbrs = graph.edge_arrays()
    vals = weight[nbrs] * useful[nbrs, centers]
    # bincount yields int64 when the weights array is empty
    benefit = np.bincount(centers, weights=vals, minlength=graph.n).astype(float)
    benefit += weight * useful[np.arange(graph.n), np.arange(graph.n)]
    return synergy * benefit / (n_coop + 1.0)


def dissemination_payoffs(
    graph: NeighborGraph,
    coop: np.ndarray,
    useful: np.ndarray,
    params: GameParams,
    rng: np.random.Generator,
    with_benefit: bool = False,
):
    """Dissemination-game payoffs: benefit minus shared cost, plus noise.

    Cooperators pay cooperator_cost(n^C_i, c); defectors pay nothing.  When
    ``params.noise_sigma`` > 0, i.i.d. Gaussian noise is added to every
    node's payoff.  Returns the payoff vector, or (payoffs, benefits) when
    ``with_benefit`` is set.
    """
    coop = np.asarray(coop, dtype=bool)
    benefit = dissemination_benefit_all(graph, coop, useful, params.synergy, params.cost)
    n_coop = graph.neighbor_sum(coop.astype(float))
    payoffs = benefit - cooperator_cost(n_coop, params.cost) * coop
    if params.noise_sigma > 0:
        payoffs = payoffs + rng.normal(0.0, params.noise_sigma, graph.n)
    return (payoffs, benefit) if with_benefit else payoffs


def strategy_update(
    graph: NeighborGraph,
    coop: np.ndarray,
    frozen: np.ndarray,
    payoffs: np.ndarray,
    params: GameParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """Synchronous Fermi imitation sweep; returns the next strategy vector.

    Every node draws one uniform neighbor and one acceptance coin, so the
    RNG stream advances identically regardless of who actually updates.
    Frozen and isolated nodes never change.  With gating, a neighbor whose
    payoff is not strictly higher is never copied.
    """
    coop = np.asarray(coop, dtype=bool)
    frozen = np.asarray(frozen, dtype=bool)
    payoffs = np.asarray(payoffs, dtype=float)
    n = graph.n
    deg = graph.degrees
    u_pick = rng.random(n)
    u_adopt = rng.random(n)
    has_nbr = deg > 0
    if len(graph.indices) == 0:
        return coop.copy()
    offset = np.floor(u_pick * np.maximum(deg, 1)).astype(np.int64)
    slot = graph.indptr[:-1] + np.minimum(offset, np.maximum(deg - 1, 0))
    picked = np.where(
        has_nbr, graph.indices[np.clip(slot, 0, len(graph.indices) - 1)], np.arange(n)
    )
    adopt_p = fermi_probability(payoffs, payoffs[picked], params.kappa)
    adopt = (u_adopt < adopt_p) & has_nbr & ~frozen
    if params.gated_update:
        adopt &= payoffs[picked] > payoffs
    return np.where(adopt, coop[picked], coop)
