"""Payoff formulas and Fermi updates against hand evaluation and oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coopnet import (
    GameParams,
    NeighborGraph,
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
from coopnet.games import (
    dissemination_benefit_all,
    payoff_classical_diversified_all,
    payoff_classical_fixed_all,
)

import payoff_oracles as oracle


def graph_from_adj(adj):
    pairs = [(i, j) for i in range(len(adj)) for j in adj[i] if i < j]
    return NeighborGraph.from_pairs(len(adj), pairs)


def line_graph(n):
    return NeighborGraph.from_pairs(n, [(i, i + 1) for i in range(n - 1)])


# ---------------------------------------------------------------- fermi rule

def test_fermi_equal_payoffs_is_half():
    assert fermi_probability(2.0, 2.0, 1.0) == 0.5


def test_fermi_unit_gap_closed_form():
    assert fermi_probability(0.0, 1.0, 1.0) == pytest.approx(1.0 / (1.0 + math.exp(-1.0)))
    assert fermi_probability(0.0, 1.0, 1.0) == pytest.approx(0.7310585786300049)


def test_fermi_small_kappa_saturates():
    assert fermi_probability(0.0, 1.0, 1e-9) == pytest.approx(1.0)
    assert fermi_probability(1.0, 0.0, 1e-9) == pytest.approx(0.0)


def test_fermi_huge_gap_does_not_overflow():
    with np.errstate(over="raise"):
        assert fermi_probability(-1e9, 1e9, 1.0) == pytest.approx(1.0, abs=1e-300)
        assert fermi_probability(1e9, -1e9, 1.0) == pytest.approx(0.0, abs=1e-300)


def test_fermi_rejects_bad_kappa():
    with pytest.raises(ValueError):
        fermi_probability(0.0, 1.0, 0.0)


@given(
    st.floats(-1e6, 1e6, allow_nan=False),
    st.floats(-1e6, 1e6, allow_nan=False),
    st.floats(1e-3, 1e3, allow_nan=False),
)
def test_fermi_complementarity(a, b, kappa):
    total = fermi_probability(a, b, kappa) + fermi_probability(b, a, kappa)
    assert total == pytest.approx(1.0, abs=1e-12)


# ------------------------------------------------------- classical variants

def test_classical_fixed_empty_pool():
    assert payoff_classical_fixed(4, 0, 2.0, 1.0, False) == 0.0


def test_classical_fixed_hand_values():
    assert payoff_classical_fixed(5, 3, 2.0, 1.0, False) == pytest.approx(1.2)
    assert payoff_classical_fixed(5, 3, 2.0, 1.0, True) == pytest.approx(0.2)


def test_classical_fixed_r_equals_group():
    for n in (2, 5, 9):
        assert payoff_classical_fixed(n, n, float(n), 1.0, True) == pytest.approx(n - 1.0)


def test_classical_fixed_validates_counts():
    with pytest.raises(ValueError):
        payoff_classical_fixed(0, 0, 2.0, 1.0, False)
    with pytest.raises(ValueError):
        payoff_classical_fixed(3, 4, 2.0, 1.0, False)


def test_classical_diversified_all_defectors():
    g = line_graph(4)
    coop = np.zeros(4, dtype=bool)
    for i in range(4):
        assert payoff_classical_diversified(g, coop, i, 2.0, 1.0) == 0.0


def test_classical_diversified_isolated_cooperator():
    g = NeighborGraph.from_pairs(1, [])
    assert payoff_classical_diversified(g, np.array([True]), 0, 2.0, 1.0) == pytest.approx(1.0)


def test_classical_diversified_linked_pair():
    g = line_graph(2)
    coop = np.array([True, True])
    for i in (0, 1):
        assert payoff_classical_diversified(g, coop, i, 2.0, 1.0) == pytest.approx(1.0)


def test_wireless_framework_all_defectors():
    g = line_graph(5)
    pays = payoff_wireless_framework(g, np.zeros(5, dtype=bool), 3.0, 1.0)
    assert np.all(pays == 0.0)


def test_wireless_framework_isolated_cooperator():
    g = NeighborGraph.from_pairs(1, [])
    pays = payoff_wireless_framework(g, np.array([True]), 3.0, 1.0)
    assert pays[0] == pytest.approx(2.0)


def test_wireless_framework_linked_pair():
    g = line_graph(2)
    pays = payoff_wireless_framework(g, np.array([True, True]), 3.0, 1.0)
    assert pays == pytest.approx([2.0, 2.0])


def test_wireless_framework_unnormalized_counts_full_cost():
    g = line_graph(2)
    pays = payoff_wireless_framework(g, np.array([True, True]), 3.0, 1.0, unnormalized=True)
    assert pays == pytest.approx([5.0, 5.0])


def test_wireless_framework_cost_and_benefit_identities():
    rng = np.random.default_rng(7)
    for _ in range(25):
        n = int(rng.integers(2, 9))
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4]
        g = NeighborGraph.from_pairs(n, pairs)
        coop = rng.random(n) < 0.5
        r, c = 2.5, 1.0
        pays = payoff_wireless_framework(g, coop, r, c)
        benefit = pays + c * coop
        total_cost = (benefit - pays).sum()
        assert total_cost == pytest.approx(c * coop.sum())
        floor = r * c / (g.degrees + 1.0)
        assert np.all(benefit[coop] >= floor[coop] - 1e-12)


# -------------------------------------------------- dissemination formulas

def test_cooperator_cost_values():
    assert cooperator_cost(0, 1.0) == 1.0
    assert cooperator_cost(3, 1.0) == 0.25
    assert cooperator_cost(5, 0.0) == 0.0


def test_cooperator_cost_rejects_negative():
    with pytest.raises(ValueError):
        cooperator_cost(-1, 1.0)


def test_dissemination_benefit_no_useful_neighbors():
    g = line_graph(3)
    useful = np.zeros((3, 3), dtype=bool)
    coop = np.array([True, False, True])
    for i in range(3):
        assert dissemination_benefit(g, coop, useful, i, 2.0, 1.0) == 0.0


def test_dissemination_benefit_single_useful_sender():
    # pair graph: node 1 cooperates (no cooperating neighbor of its own),
    # node 0 defects but has one cooperating neighbor holding novelty
    g = line_graph(2)
    coop = np.array([False, True])
    useful = np.array([[False, False], [True, False]])
    assert dissemination_benefit(g, coop, useful, 0, 2.0, 1.0) == pytest.approx(1.0)


def test_dissemination_benefit_isolated_cooperator():
    g = NeighborGraph.from_pairs(1, [])
    useful = np.zeros((1, 1), dtype=bool)
    assert dissemination_benefit(g, np.array([True]), useful, 0, 2.0, 1.0) == 0.0


def test_dissemination_regular_graph_closed_form():
    # with every node cooperating and usefulness saturated (diagonal
    # included, as supplied), a k-regular graph pays r*c/(k+1) everywhere
    ring = NeighborGraph.from_pairs(5, [(i, (i + 1) % 5) for i in range(5)])
    k4 = NeighborGraph.from_pairs(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    for g, k in ((ring, 2), (k4, 3)):
        coop = np.ones(g.n, dtype=bool)
        useful = np.ones((g.n, g.n), dtype=bool)
        bens = dissemination_benefit_all(g, coop, useful, 2.0, 1.0)
        assert bens == pytest.approx(np.full(g.n, 2.0 * 1.0 / (k + 1.0)))


def test_dissemination_payoffs_noiseless_values():
    g = line_graph(2)
    params = GameParams(synergy=4.0, variant="dissemination")
    rng = np.random.default_rng(0)
    useful = np.array([[False, True], [True, False]])
    coop = np.array([True, True])
    pays, bens = dissemination_payoffs(g, coop, useful, params, rng, with_benefit=True)
    assert bens[0] == pytest.approx(1.0)
    assert pays[0] == pytest.approx(0.5)
    defect = np.array([False, False])
    assert np.all(dissemination_payoffs(g, defect, np.zeros((2, 2)), params, rng) == 0.0)


def test_dissemination_noise_centers_on_noiseless_value():
    g = line_graph(2)
    params = GameParams(synergy=4.0, variant="dissemination", noise_sigma=0.1)
    clean = GameParams(synergy=4.0, variant="dissemination")
    rng = np.random.default_rng(123)
    useful = np.array([[False, True], [True, False]])
    coop = np.array([True, True])
    base = dissemination_payoffs(g, coop, useful, clean, rng)
    draws = np.array(
        [dissemination_payoffs(g, coop, useful, params, rng)[0] for _ in range(10_000)]
    )
    assert abs(draws.mean() - base[0]) < 3 * 0.1 / math.sqrt(10_000)


def test_normalized_synergy():
    assert normalized_synergy(3.0, 5.0) == pytest.approx(0.5)


def test_game_params_validation():
    with pytest.raises(ValueError):
        GameParams(synergy=-0.1)
    with pytest.raises(ValueError):
        GameParams(kappa=0.0)
    with pytest.raises(ValueError):
        GameParams(variant="bogus")


# ---------------------------------------------------------- strategy update

def test_frozen_cooperator_never_flips():
    g = line_graph(3)
    coop = np.array([True, False, False])
    frozen = np.array([True, False, False])
    payoffs = np.array([-5.0, 10.0, 10.0])
    params = GameParams()
    for seed in range(50):
        out = strategy_update(g, coop, frozen, payoffs, params, np.random.default_rng(seed))
        assert out[0]


def test_gated_update_ignores_poorer_and_equal_neighbors():
    g = line_graph(2)
    frozen = np.zeros(2, dtype=bool)
    params = GameParams(gated_update=True)
    for payoffs in ([2.0, 1.0], [2.0, 2.0]):
        for seed in range(50):
            out = strategy_update(
                g,
                np.array([True, True]),
                frozen,
                np.array(payoffs),
                params,
                np.random.default_rng(seed),
            )
            assert out[0]


def test_ungated_update_can_copy_poorer_neighbor():
    g = line_graph(2)
    params = GameParams(gated_update=False)
    flipped = False
    for seed in range(200):
        out = strategy_update(
            g,
            np.array([True, False]),
            np.zeros(2, dtype=bool),
            np.array([2.0, 1.0]),
            params,
            np.random.default_rng(seed),
        )
        flipped |= not out[0]
    assert flipped


def test_much_richer_neighbor_always_copied():
    g = line_graph(2)
    params = GameParams()
    for seed in range(200):
        out = strategy_update(
            g,
            np.array([True, False]),
            np.zeros(2, dtype=bool),
            np.array([0.0, 1e4]),
            params,
            np.random.default_rng(seed),
        )
        assert not out[0]


def test_isolated_node_keeps_strategy():
    g = NeighborGraph.from_pairs(3, [(0, 1)])
    coop = np.array([True, False, True])
    payoffs = np.array([0.0, 5.0, -1.0])
    for seed in range(20):
        out = strategy_update(
            g, coop, np.zeros(3, dtype=bool), payoffs, GameParams(), np.random.default_rng(seed)
        )
        assert out[2]


def test_update_is_translation_invariant():
    rng = np.random.default_rng(11)
    g = NeighborGraph.from_pairs(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)])
    coop = np.array([True, False, True, True, False, False])
    frozen = np.zeros(6, dtype=bool)
    payoffs = rng.normal(size=6)
    params = GameParams()
    for seed in range(30):
        a = strategy_update(g, coop, frozen, payoffs, params, np.random.default_rng(seed))
        b = strategy_update(g, coop, frozen, payoffs + 137.5, params, np.random.default_rng(seed))
        assert np.array_equal(a, b)


# ----------------------------------------------------- oracle cross-checks

def test_vectorized_payoffs_match_oracles_small_graphs():
    # graphs up to 4 nodes here; the 5-node exhaustive sweep runs in the
    # acceptance suite
    checked = 0
    for n, adj in oracle.connected_graphs(4):
        g = graph_from_adj(adj)
        for coop in oracle.strategy_masks(n):
            mask = np.array(coop, dtype=bool)
            got = payoff_classical_fixed_all(g, mask, 2.0, 1.0)
            assert got == pytest.approx(oracle.oracle_classical_fixed(adj, coop, 2.0, 1.0), abs=1e-12)
            got = payoff_classical_diversified_all(g, mask, 2.0, 1.0)
            assert got == pytest.approx(
                oracle.oracle_classical_diversified(adj, coop, 2.0, 1.0), abs=1e-12
            )
            got = payoff_wireless_framework(g, mask, 2.0, 1.0)
            assert got == pytest.approx(
                oracle.oracle_wireless_framework(adj, coop, 2.0, 1.0), abs=1e-12
            )
            useful = oracle.random_useful_matrix(n, seed=checked)
            got = dissemination_benefit_all(g, mask, np.array(useful, dtype=bool), 2.0, 1.0)
            assert got == pytest.approx(
                oracle.oracle_dissemination_benefit(adj, coop, useful, 2.0, 1.0), abs=1e-12
            )
            checked += 1
    assert checked > 100


def test_per_node_helpers_match_vectorized():
    rng = np.random.default_rng(5)
    for _ in range(10):
        n = int(rng.integers(2, 7))
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5]
        g = NeighborGraph.from_pairs(n, pairs)
        coop = rng.random(n) < 0.5
        useful = rng.random((n, n)) < 0.5
        np.fill_diagonal(useful, False)
        for i in range(n):
            assert payoff_classical_diversified(g, coop, i, 2.0, 1.0) == pytest.approx(
                payoff_classical_diversified_all(g, coop, 2.0, 1.0)[i]
            )
            assert dissemination_benefit(g, coop, useful, i, 2.0, 1.0) == pytest.approx(
                dissemination_benefit_all(g, coop, useful, 2.0, 1.0)[i]
            )
