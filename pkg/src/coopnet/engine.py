"""Slot-stepped simulation engine tying mobility, games, and packets together.

Each slot runs, in order: mobility, neighbor-graph construction, broadcast
(when packets are in play), payoffs, a synchronous strategy update, metrics,
and a termination check.  A run is a pure function of (config, seed): the
single generator seeded at the start drives every random decision in a fixed
order, so identical inputs reproduce identical results bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import dissemination as dis
from . import games, spatial

SCENARIOS = ("framework_pgg", "info_dissemination", "content_download")

ALL_SAME_STRATEGY = "all_same_strategy"
DISSEMINATION_COMPLETE = "dissemination_complete"
MAX_SLOTS = "max_slots"

# consecutive stalled slots before a frozen-cooperator run is declared settled
STALL_SLOTS = 50


class SimConfigError(ValueError):
    """Raised when a simulation configuration fails validation."""


def _default_arena() -> spatial.ArenaConfig:
    return spatial.ArenaConfig(1000.0, 1000.0, "torus")


@dataclass(frozen=True)
class SimConfig:
    """Everything a run needs besides the master seed inside it.

    ``eta`` optionally replaces ``game.synergy``: when set, the multiplier is
    resolved as eta * (<k> + 1) from the first slot's graph, so sweeps can be
    phrased in the normalized coordinate directly.
    """

    scenario: str
    n_nodes: int
    game: games.GameParams = games.GameParams()
    arena: spatial.ArenaConfig = field(default_factory=_default_arena)
    mobility: object = field(default_factory=spatial.Static)
    connectivity: object = field(default_factory=spatial.UnitDisk)
    eta: float | None = None
    n_sources: int | None = None
    n_seeders: int | None = None
    n_packets: int | None = None
    initial_coop_ratio: float = 0.5
    max_slots: int | None = None
    seed: int = 0
    sources_stay_frozen: bool = False

    def __post_init__(self):
        problems = []
        if self.scenario not in SCENARIOS:
            problems.append(f"unknown scenario {self.scenario!r}")
        if self.n_nodes < 1:
            problems.append("n_nodes must be at least 1")
        if self.eta is not None and self.eta < 0:
            problems.append("eta must be non-negative")
        if not (0.0 <= self.initial_coop_ratio <= 1.0):
            problems.append("initial_coop_ratio must lie in [0, 1]")
        if self.max_slots is not None and self.max_slots < 1:
            problems.append("max_slots must be at least 1")
        if self.scenario == "info_dissemination":
            n_src = self.n_sources if self.n_sources is not None else 0
            if not (1 <= n_src <= self.n_nodes):
                problems.append("info_dissemination needs 1 <= n_sources <= n_nodes")
        if self.scenario == "content_download":
            n_seed = self.n_seeders if self.n_seeders is not None else 0
            if not (1 <= n_seed <= self.n_nodes):
                problems.append("content_download needs 1 <= n_seeders <= n_nodes")
            if (self.n_packets or 0) < 1:
                problems.append("content_download needs n_packets >= 1")
        if problems:
            raise SimConfigError("; ".join(problems))

    @property
    def slot_budget(self) -> int:
        if self.max_slots is not None:
            return self.max_slots
        return 300 if self.scenario == "content_download" else 5000

    def uses_packets(self) -> bool:
        return self.scenario in ("info_dissemination", "content_download")


@dataclass
class SimState:
    """Mutable world snapshot the slot loop advances in place."""

    slot: int
    positions: np.ndarray
    graph: spatial.NeighborGraph
    coop: np.ndarray
    frozen: np.ndarray
    payoffs: np.ndarray
    packets: dis.DisseminationState | None
    stall_streak: int = 0


@dataclass
class RunResult:
    """Per-slot series plus end-of-run summary for one (config, seed) run.

    Series have one entry per elapsed slot, recorded after that slot's
    update.  ``deliveries`` counts new node-packet receptions per slot.
    """

    scenario: str
    seed: int
    n_nodes: int
    slots: int
    termination: str
    coop_fraction: np.ndarray
    initial_coop_fraction: float
    mean_degree_slot0: float
    synergy: float
    eta: float
    total_benefit: np.ndarray
    pending: np.ndarray | None = None
    deliveries: np.ndarray | None = None
    received_counts: np.ndarray | None = None

    def final_coop_fraction(self) -> float:
        return float(self.coop_fraction[-1]) if self.slots else self.initial_coop_fraction


def check_termination(state: SimState, config: SimConfig) -> str | None:
    """Decide whether the run is over after the current slot.

    Packet runs end first on an empty pending count.  Without frozen nodes,
    strategy uniformity is absorbing and ends the run.  With frozen
    cooperators present, uniformity is impossible, so the run ends only
    after every non-frozen node has defected and no cooperating neighbor
    has shown a payoff advantage for STALL_SLOTS consecutive slots.  The
    slot budget is the last resort.
    """
    if state.packets is not None and state.packets.pending() == 0:
        return DISSEMINATION_COMPLETE
    if not state.frozen.any():
        if state.coop.all() or not state.coop.any():
            return ALL_SAME_STRATEGY
    elif state.stall_streak >= STALL_SLOTS:
        return ALL_SAME_STRATEGY
    if state.slot >= config.slot_budget:
        return MAX_SLOTS
    return None


def _cooperator_advantage(
    graph: spatial.NeighborGraph,
    coop: np.ndarray,
    frozen: np.ndarray,
    payoffs: np.ndarray,
) -> bool:
    """True when some non-frozen node sees a strictly richer cooperator."""
    centers, nbrs = graph.edge_arrays()
    if len(centers) == 0:
        return False
    mask = ~frozen[centers] & coop[nbrs]
    return bool(np.any(payoffs[nbrs[mask]] > payoffs[centers[mask]]))


def _build_graph(config: SimConfig, positions, rng) -> spatial.NeighborGraph:
    con = config.connectivity
    if isinstance(con, spatial.UnitDisk):
        return spatial.connect_unit_disk(positions, con.radius, config.arena)
    if isinstance(con, spatial.QuasiUnitDisk):
        return spatial.connect_quasi_unit_disk(positions, con, config.arena, rng)
    raise SimConfigError(f"unknown connectivity model {con!r}")


def _init_world(config: SimConfig, rng) -> SimState:
    n = config.n_nodes
    positions = spatial.place_uniform(n, config.arena, rng)
    if config.scenario == "framework_pgg":
        coop = rng.random(n) < config.initial_coop_ratio
        frozen = np.zeros(n, dtype=bool)
        packets = None
    elif config.scenario == "info_dissemination":
        packets, coop, frozen = dis.init_sources(n, config.n_sources, rng)
    else:
        packets, coop, frozen = dis.init_seeders(
            n, config.n_seeders, config.n_packets, config.initial_coop_ratio, rng
        )
    return SimState(
        slot=0,
        positions=positions,
        graph=spatial.NeighborGraph.from_pairs(n, np.empty((0, 2), dtype=np.int64)),
        coop=coop,
        frozen=frozen,
        payoffs=np.zeros(n),
        packets=packets,
    )


def _slot_payoffs(config, params, state, useful, rng):
    """Payoffs and benefits for the current strategies, noise included."""
    g, coop = state.graph, state.coop
    if params.variant == "dissemination":
        payoffs, benefit = games.dissemination_payoffs(
            g, coop, useful, params, rng, with_benefit=True
        )
        return payoffs, benefit
    if params.variant == "wireless_framework":
        payoffs = games.payoff_wireless_framework(
            g, coop, params.synergy, params.cost, params.unnormalized_benefit
        )
        benefit = payoffs + params.cost * coop
    elif params.variant == "classical_diversified":
        payoffs = games.payoff_classical_diversified_all(g, coop, params.synergy, params.cost)
        benefit = payoffs + params.cost * coop
    else:
        payoffs = games.payoff_classical_fixed_all(g, coop, params.synergy, params.cost)
        benefit = payoffs + params.cost * coop * (g.degrees + 1.0)
    if params.noise_sigma > 0:
        payoffs = payoffs + rng.normal(0.0, params.noise_sigma, g.n)
    return payoffs, benefit


def run(config: SimConfig) -> RunResult:
    """Execute one run to termination and collect its series.

    Deterministic in (config, seed); see the module docstring for the slot
    ordering.  Static mobility with deterministic connectivity reuses the
    slot-0 graph instead of rebuilding it every slot.
    """
    rng = np.random.default_rng(np.random.SeedSequence(config.seed))
    state = _init_world(config, rng)
    params = config.game
    if config.scenario == "framework_pgg" and params.variant == "dissemination":
        raise SimConfigError("framework_pgg carries no packets for the dissemination variant")
    if config.uses_packets() and params.variant != "dissemination":
        params = replace(params, variant="dissemination")

    mob_state = config.mobility.init_state(config.n_nodes)
    reuse_graph = config.mobility.is_static and isinstance(
        config.connectivity, spatial.UnitDisk
    )

    fc_series: list[float] = []
    pending_series: list[int] = []
    deliveries_series: list[int] = []
    total_benefit = np.zeros(config.n_nodes)
    initial_fc = float(state.coop.mean())
    mean_degree0 = 0.0
    synergy = params.synergy
    termination = MAX_SLOTS

    while True:
        state.slot += 1
        state.positions = config.mobility.advance(
            state.positions, mob_state, rng, config.arena
        )
        if state.slot == 1 or not reuse_graph:
            state.graph = _build_graph(config, state.positions, rng)
        if state.slot == 1:
            mean_degree0 = state.graph.mean_degree()
            if config.eta is not None:
                synergy = config.eta * (mean_degree0 + 1.0)
                params = replace(params, synergy=synergy)

        useful = None
        pending_before = state.packets.pending() if state.packets is not None else 0
        if state.packets is not None:
            useful = dis.broadcast_step(state.graph, state.coop, state.packets, rng).useful

        state.payoffs, benefit = _slot_payoffs(config, params, state, useful, rng)
        total_benefit += benefit

        stalled = (
            state.frozen.any()
            and not state.coop[~state.frozen].any()
            and not _cooperator_advantage(state.graph, state.coop, state.frozen, state.payoffs)
        )
        state.stall_streak = state.stall_streak + 1 if stalled else 0

        state.coop = games.strategy_update(
            state.graph, state.coop, state.frozen, state.payoffs, params, rng
        )
        if (
            config.scenario == "info_dissemination"
            and not config.sources_stay_frozen
            and state.frozen.any()
        ):
            state.frozen = dis.release_sources(state.packets, state.frozen)

        fc_series.append(float(state.coop.mean()))
        if state.packets is not None:
            pending_now = state.packets.pending()
            pending_series.append(pending_now)
            deliveries_series.append(pending_before - pending_now)

        cause = check_termination(state, config)
        if cause is not None:
            termination = cause
            break

    eta = games.normalized_synergy(synergy, mean_degree0)
    return RunResult(
        scenario=config.scenario,
        seed=config.seed,
        n_nodes=config.n_nodes,
        slots=state.slot,
        termination=termination,
        coop_fraction=np.asarray(fc_series),
        initial_coop_fraction=initial_fc,
        mean_degree_slot0=mean_degree0,
        synergy=synergy,
        eta=eta,
        total_benefit=total_benefit,
        pending=np.asarray(pending_series) if state.packets is not None else None,
        deliveries=np.asarray(deliveries_series) if state.packets is not None else None,
        received_counts=(
            state.packets.received_counts() if state.packets is not None else None
        ),
    )


def steady_state_fraction(result: RunResult, window: int | None = None) -> float:
    """Long-run cooperator fraction of a finished run.

    Runs absorbed into a uniform strategy report their final value.  All
    others average the trailing window, which defaults to the last tenth of
    the elapsed slots and never less than ten (capped at the series length).
    """
    if result.slots < 1:
        return result.initial_coop_fraction
    if result.termination == ALL_SAME_STRATEGY:
        return float(result.coop_fraction[-1])
    if window is None:
        window = min(result.slots, max(10, -(-result.slots // 10)))
    elif not (1 <= window <= result.slots):
        raise ValueError("window must lie in [1, slots elapsed]")
    return float(result.coop_fraction[-window:].mean())
