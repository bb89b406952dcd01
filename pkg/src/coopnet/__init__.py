"""Evolutionary public-goods games on mobile wireless networks.

The package simulates slot-stepped populations of mobile nodes that play
public-goods games with their radio neighbors, imitate richer neighbors
under the Fermi rule, and (in the packet scenarios) broadcast content whose
novelty feeds back into the payoffs.  A mean-field analytics layer predicts
payoffs and neighbor turnover without simulation.
"""

from .analytics import (
    MeetingGeometry,
    cooperator_payoff_estimate,
    defector_payoff_estimate,
    meeting_fractions_quadrature,
    meeting_monte_carlo,
    meeting_probabilities_quadrature,
    neighbor_fractions,
    transition_propensity,
    useful_neighbor_probability,
)
from .dissemination import (
    BroadcastResult,
    CoverageMetrics,
    DisseminationState,
    broadcast_step,
    choose_packet,
    coverage_metrics,
    init_seeders,
    init_sources,
    release_sources,
)
from .engine import (
    RunResult,
    SimConfig,
    SimConfigError,
    SimState,
    check_termination,
    run,
    steady_state_fraction,
)
from .games import (
    GameParams,
    cooperator_cost,
    dissemination_benefit,
    dissemination_payoffs,
    fermi_probability,
    normalized_synergy,
    payoff_classical_diversified,
    payoff_classical_fixed,
    payoff_wireless_framework,
    strategy_update,
)
from .harness import (
    ConfigError,
    SweepSpec,
    emit_outputs,
    parse_config,
    run_sweep,
)
from .spatial import (
    ArenaConfig,
    LevyParams,
    LevyState,
    LevyWalk,
    NeighborGraph,
    QuasiUnitDisk,
    RandomDirection,
    Static,
    UnitDisk,
    clustering_coefficient,
    clustering_coefficients,
    connect_quasi_unit_disk,
    connect_unit_disk,
    pairs_within,
    place_uniform,
    quasi_connect_probability,
    step_levy,
    step_random_direction,
    truncated_pareto,
)

__version__ = "0.1.0"
