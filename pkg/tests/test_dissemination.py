"""Packet buffers, broadcast slots, and coverage bookkeeping."""

import numpy as np
import pytest

from coopnet import (
    DisseminationState,
    NeighborGraph,
    broadcast_step,
    choose_packet,
    coverage_metrics,
    init_seeders,
    init_sources,
    release_sources,
)


def star(n_leaves):
    return NeighborGraph.from_pairs(n_leaves + 1, [(0, i + 1) for i in range(n_leaves)])


def path(n):
    return NeighborGraph.from_pairs(n, [(i, i + 1) for i in range(n - 1)])


# ------------------------------------------------------------ initial states

def test_init_sources_one_packet_each():
    state, coop, frozen = init_sources(400, 50, np.random.default_rng(0))
    assert state.received.shape == (400, 50)
    assert state.received.sum() == 50
    src = np.flatnonzero(state.source_packet >= 0)
    assert len(src) == 50
    assert np.array_equal(np.sort(state.source_packet[src]), np.arange(50))
    for i in src:
        assert state.received[i, state.source_packet[i]]
    assert np.array_equal(coop, frozen)
    assert coop.sum() == 50
    assert not state.transmitted.any()
    assert not state.seeder.any()


def test_init_sources_single():
    state, coop, _ = init_sources(10, 1, np.random.default_rng(1))
    assert state.n_packets == 1
    assert state.received.sum() == 1
    assert coop.sum() == 1


def test_init_sources_frozen_is_a_copy():
    _, coop, frozen = init_sources(20, 5, np.random.default_rng(2))
    frozen[:] = False
    assert coop.sum() == 5


def test_init_sources_validation():
    with pytest.raises(ValueError):
        init_sources(10, 0, np.random.default_rng(0))
    with pytest.raises(ValueError):
        init_sources(10, 11, np.random.default_rng(0))


def test_init_seeders_catalogue_and_pending():
    state, coop, frozen = init_seeders(400, 30, 100, 0.5, np.random.default_rng(3))
    assert state.pending() == 370 * 100
    assert np.array_equal(frozen, state.seeder)
    assert state.seeder.sum() == 30
    assert state.received[state.seeder].all()
    assert not state.received[~state.seeder].any()
    assert not state.transmitted.any()
    assert coop[state.seeder].all()
    assert np.all(state.source_packet == -1)


def test_init_seeders_coop_ratio_is_binomial():
    rng = np.random.default_rng(4)
    state, coop, _ = init_seeders(400, 30, 100, 0.5, rng)
    others = coop[~state.seeder].sum()
    assert abs(others - 185) <= 3 * np.sqrt(370 * 0.25)


def test_init_seeders_validation():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        init_seeders(10, 0, 5, 0.5, rng)
    with pytest.raises(ValueError):
        init_seeders(10, 2, 0, 0.5, rng)
    with pytest.raises(ValueError):
        init_seeders(10, 2, 5, 1.5, rng)


# ------------------------------------------------------------- packet choice

def test_choose_packet_prefers_unsent():
    rng = np.random.default_rng(5)
    received = np.array([False, True, True, True])
    transmitted = np.array([False, True, True, False])
    for _ in range(20):
        assert choose_packet(received, transmitted, rng) == 3


def test_choose_packet_falls_back_to_retransmission():
    rng = np.random.default_rng(6)
    received = np.zeros(10, dtype=bool)
    received[7] = True
    transmitted = received.copy()
    assert choose_packet(received, transmitted, rng) == 7


def test_choose_packet_empty_buffer_returns_none():
    rng = np.random.default_rng(7)
    assert choose_packet(np.zeros(4, dtype=bool), np.zeros(4, dtype=bool), rng) is None


def test_choose_packet_uniform_over_fresh():
    rng = np.random.default_rng(8)
    received = np.array([True, True, True, True])
    transmitted = np.array([True, False, False, False])
    picks = {choose_packet(received, transmitted, rng) for _ in range(200)}
    assert picks == {1, 2, 3}


# ------------------------------------------------------------ broadcast slot

def test_star_center_floods_all_leaves():
    g = star(6)
    coop = np.ones(7, dtype=bool)
    received = np.zeros((7, 10), dtype=bool)
    received[0, 5] = True
    state = DisseminationState(
        received, np.zeros_like(received), np.zeros(7, dtype=bool), np.full(7, -1)
    )
    res = broadcast_step(g, coop, state, np.random.default_rng(9))
    assert state.received[:, 5].all()
    assert state.transmitted[0, 5]
    assert res.senders[0] and res.senders.sum() == 1
    assert res.packet_choice[0] == 5
    assert np.all(res.packet_choice[1:] == -1)


def test_useful_matrix_semantics():
    # 0 holds a packet 1 lacks; usefulness needs cooperation and novelty
    g = path(3)
    state, coop, _ = init_sources(3, 1, np.random.default_rng(2))
    src = int(np.flatnonzero(state.source_packet >= 0)[0])
    coop = np.ones(3, dtype=bool)
    res = broadcast_step(g, coop, state, np.random.default_rng(0))
    for j in g.neighbors(src):
        assert res.useful[src, j]
    assert not res.useful.diagonal().any()
    assert not res.useful[:, src].any()


def test_useful_judged_on_start_of_slot_buffers():
    g = path(3)
    received = np.zeros((3, 1), dtype=bool)
    received[0, 0] = True
    state = DisseminationState(
        received, np.zeros_like(received), np.zeros(3, dtype=bool), np.full(3, -1)
    )
    coop = np.ones(3, dtype=bool)
    res = broadcast_step(g, coop, state, np.random.default_rng(1))
    assert state.received[1, 0] and not state.received[2, 0]
    assert res.useful[0, 1] and not res.useful[1, 2]


def test_defectors_never_transmit():
    g = star(5)
    received = np.zeros((6, 3), dtype=bool)
    received[0] = True
    state = DisseminationState(
        received, np.zeros_like(received), np.zeros(6, dtype=bool), np.full(6, -1)
    )
    coop = np.zeros(6, dtype=bool)
    res = broadcast_step(g, coop, state, np.random.default_rng(3))
    assert not res.senders.any()
    assert not res.useful.any()
    assert state.received.sum() == 3
    assert not state.transmitted.any()


def test_transmitted_stays_subset_of_received():
    rng = np.random.default_rng(10)
    state, coop, _ = init_seeders(40, 5, 8, 0.5, rng)
    pos_pairs = [(i, j) for i in range(40) for j in range(i + 1, 40) if rng.random() < 0.15]
    g = NeighborGraph.from_pairs(40, pos_pairs)
    for _ in range(30):
        broadcast_step(g, coop, state, rng)
        assert not (state.transmitted & ~state.received).any()
    assert state.received.sum() > 5 * 8


def test_seeders_draw_from_whole_catalogue():
    # a non-seeder with one unsent packet always picks it; a seeder in the
    # same buffer state keeps drawing uniformly and eventually repeats old ones
    m = 5
    g = path(2)
    seeder_repeated = False
    for seed in range(60):
        received = np.ones((2, m), dtype=bool)
        transmitted = np.ones((2, m), dtype=bool)
        transmitted[:, 2] = False
        state = DisseminationState(
            received, transmitted, np.array([True, False]), np.full(2, -1)
        )
        res = broadcast_step(g, np.ones(2, dtype=bool), state, np.random.default_rng(seed))
        assert res.packet_choice[1] == 2
        seeder_repeated |= res.packet_choice[0] != 2
    assert seeder_repeated


def test_isolated_sender_still_marks_transmission():
    g = NeighborGraph.from_pairs(2, [])
    received = np.zeros((2, 2), dtype=bool)
    received[0, 1] = True
    state = DisseminationState(
        received, np.zeros_like(received), np.zeros(2, dtype=bool), np.full(2, -1)
    )
    res = broadcast_step(g, np.ones(2, dtype=bool), state, np.random.default_rng(4))
    assert res.senders[0]
    assert state.transmitted[0, 1]
    assert state.received.sum() == 1


def test_single_packet_floods_at_graph_distance():
    # all-cooperator flooding of one packet advances exactly one hop per slot
    g = path(6)
    state, coop, _ = init_sources(6, 1, np.random.default_rng(11))
    coop = np.ones(6, dtype=bool)
    src = int(np.flatnonzero(state.source_packet >= 0)[0])
    for step in range(1, 6):
        broadcast_step(g, coop, state, np.random.default_rng(step))
        holds = np.flatnonzero(state.received[:, 0])
        expect = [i for i in range(6) if abs(i - src) <= step]
        assert list(holds) == expect


# ------------------------------------------------------------ source release

def test_release_sources_requires_own_packet():
    state, coop, frozen = init_sources(6, 2, np.random.default_rng(12))
    a, b = np.flatnonzero(state.source_packet >= 0)
    state.transmitted[a, state.source_packet[a]] = True
    state.received[b, state.source_packet[a]] = True
    state.transmitted[b, state.source_packet[a]] = True  # someone else's packet
    out = release_sources(state, frozen)
    assert not out[a]
    assert out[b]
    assert frozen[a] and frozen[b]  # input untouched


def test_release_sources_ignores_non_sources():
    state, _, _ = init_seeders(5, 2, 3, 0.5, np.random.default_rng(13))
    frozen = state.seeder.copy()
    state.transmitted[state.seeder] = True
    out = release_sources(state, frozen)
    assert np.array_equal(out, frozen)


# ----------------------------------------------------------------- coverage

def test_coverage_metrics_small_example():
    received = np.array(
        [[False, False], [True, False], [True, True]]
    )
    state = DisseminationState(
        received, np.zeros_like(received), np.zeros(3, dtype=bool), np.full(3, -1)
    )
    cov = coverage_metrics(state)
    assert np.array_equal(cov.counts, [0, 1, 2])
    assert np.array_equal(cov.ecdf_support, [0, 1, 2])
    assert cov.ecdf == pytest.approx([1 / 3, 2 / 3, 1.0])
    assert cov.pending == 3
    assert cov.delivered_fraction == pytest.approx(0.5)


def test_coverage_ecdf_properties():
    rng = np.random.default_rng(14)
    state, coop, _ = init_seeders(50, 8, 12, 0.5, rng)
    g = NeighborGraph.from_pairs(
        50, [(i, j) for i in range(50) for j in range(i + 1, 50) if rng.random() < 0.1]
    )
    for _ in range(10):
        broadcast_step(g, coop, state, rng)
    cov = coverage_metrics(state)
    assert cov.ecdf[-1] == 1.0
    assert np.all(np.diff(cov.ecdf) >= 0.0)
    assert len(cov.ecdf) == 13
    assert cov.pending == state.pending()
