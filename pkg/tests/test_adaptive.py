import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from broadcast_aoi.adaptive import (
    AdaptiveState,
    Phase,
    SymbolKind,
    SymbolType,
    adaptive_step,
    select_symbol,
    simulate_adaptive,
)
from broadcast_aoi.analysis import theory_report
from broadcast_aoi.channel import ErasurePair
from broadcast_aoi.greedy import simulate_greedy
from broadcast_aoi.model import ChannelParams, DecodeEvent, SimConfig, User, mean_age

P2 = Phase.PHASE2


def test_select_symbol():
    assert select_symbol(AdaptiveState()).kind is SymbolKind.RATELESS_W1
    sym = select_symbol(AdaptiveState(P2, SymbolType.UNCODED, 3, 1, 9, 1))
    assert (sym.kind, sym.index, sym.w1_gen, sym.w2_gen) == (SymbolKind.UNCODED_W1, 4, 9, 1)
    sym = select_symbol(AdaptiveState(P2, SymbolType.CODED, 0, 1, 9, 1))
    assert (sym.kind, sym.index) == (SymbolKind.MIXED_W1W2, 1)


def test_phase1_user1_decode_enters_phase2():
    state, events = adaptive_step(AdaptiveState(k1=1, k2=0, w1_gen=3, w2_gen=3), ErasurePair(1, 0), t=7, K=2)
    assert events == [DecodeEvent(User.USER1, 7, 3)]
    assert state == AdaptiveState(P2, SymbolType.UNCODED, 0, 0, 8, 3)


def test_phase1_both_decode_starts_new_cycle():
    state, events = adaptive_step(AdaptiveState(k1=1, k2=1, w1_gen=3, w2_gen=3), ErasurePair(1, 1), t=7, K=2)
    assert {e.user for e in events} == {User.USER1, User.USER2}
    assert state == AdaptiveState(Phase.PHASE1, SymbolType.UNCODED, 0, 0, 8, 8)


def test_uncoded_user2_only_switches_to_coded():
    s = AdaptiveState(P2, SymbolType.UNCODED, 1, 1, 8, 3)
    state, events = adaptive_step(s, ErasurePair(0, 1), t=9, K=2)
    assert events == []
    assert state == AdaptiveState(P2, SymbolType.CODED, 1, 1, 8, 3)


@pytest.mark.parametrize("v", [(1, 0), (1, 1), (0, 0)])
def test_uncoded_other_feedback_stays_uncoded(v):
    s = AdaptiveState(P2, SymbolType.UNCODED, 0, 1, 8, 3)
    state, _ = adaptive_step(s, ErasurePair(*v), t=9, K=3)
    assert state.c is SymbolType.UNCODED
    assert state.k1 == v[0] and state.k2 == 1


def test_coded_user2_reaches_K_decodes_but_cycle_stays_open():
    s = AdaptiveState(P2, SymbolType.CODED, 0, 1, 8, 3)
    state, events = adaptive_step(s, ErasurePair(0, 1), t=12, K=2)
    assert events == [DecodeEvent(User.USER2, 12, 3)]
    assert state == AdaptiveState(P2, SymbolType.CODED, 0, 2, 8, 3)
    # phase 2b: user 1 finishes, cycle closes
    state, events = adaptive_step(state, ErasurePair(1, 0), t=13, K=2)
    assert events == [] and state.k1 == 1 and state.c is SymbolType.UNCODED
    state, events = adaptive_step(state, ErasurePair(1, 1), t=14, K=2)
    assert events == [DecodeEvent(User.USER1, 14, 8)]
    assert state == AdaptiveState(Phase.PHASE1, SymbolType.UNCODED, 0, 0, 15, 15)


def test_user1_decode_in_phase2_keeps_w2():
    s = AdaptiveState(P2, SymbolType.CODED, 1, 1, 8, 3)
    state, events = adaptive_step(s, ErasurePair(1, 0), t=20, K=2)
    assert events == [DecodeEvent(User.USER1, 20, 8)]
    assert state == AdaptiveState(P2, SymbolType.UNCODED, 0, 1, 21, 3)


@pytest.mark.parametrize(
    "K,p1,p2,seed",
    [(1, 0.5, 0.5, 0), (3, 0.6, 0.3, 1), (5, 0.9, 0.2, 2), (4, 0.3, 0.6, 3), (3, 1.0, 0.5, 4), (2, 0.5, 1.0, 5)],
)
def test_compiled_matches_reference(K, p1, p2, seed):
    cfg = SimConfig(K=K, horizon=4000, master_seed=seed)
    ch = ChannelParams(p1, p2)
    a = simulate_adaptive(cfg, ch, path_index=1)
    b = simulate_adaptive(cfg, ch, path_index=1, engine="reference")
    for name in ("ages1", "ages2", "events", "cycle_table", "kinds"):
        assert np.array_equal(getattr(a, name), getattr(b, name)), name


@settings(max_examples=200, deadline=None)
@given(
    K=st.integers(1, 5),
    feedback=st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=300),
)
def test_state_invariants_every_slot(K, feedback):
    state = AdaptiveState()
    for t, (x1, x2) in enumerate(feedback, start=1):
        before = state
        state, events = adaptive_step(before, ErasurePair(x1, x2), t, K)
        assert (state.phase is Phase.PHASE1) == (state.w1_gen == state.w2_gen)
        if state.phase is P2:
            assert state.w1_gen > state.w2_gen
        assert 0 <= state.k1 < K and 0 <= state.k2 <= K
        if state.w1_gen == before.w1_gen:
            assert state.k1 == before.k1 + x1
        else:
            assert state.w1_gen == t + 1 and state.k1 == 0 and x1 == 1
        carries_w2 = before.phase is Phase.PHASE1 or before.c is SymbolType.CODED
        if state.w2_gen == before.w2_gen:
            assert state.k2 == min(before.k2 + (x2 if carries_w2 else 0), K)
        # coded is only reachable from uncoded on (0, 1) or by staying coded on v1 = 0
        if state.phase is P2 and state.c is SymbolType.CODED:
            assert before.phase is P2 and x1 == 0
            assert before.c is SymbolType.CODED or x2 == 1
        if before.phase is Phase.PHASE1 and state.phase is P2:
            assert state.c is SymbolType.UNCODED
        assert sum(e.user is User.USER2 for e in events) <= 1


def test_age_recurrence(check_ages):
    check_ages(simulate_adaptive(SimConfig(K=5, horizon=20_000, master_seed=3), ChannelParams(0.7, 0.4)))


@pytest.mark.parametrize("K,p1,p2", [(10, 0.7, 0.4), (5, 0.5, 0.2), (3, 0.95, 0.9)])
def test_user1_coupled_with_greedy(K, p1, p2):
    cfg = SimConfig(K=K, horizon=50_000, master_seed=21)
    ch = ChannelParams(p1, p2)
    for i in range(3):
        a, g = simulate_adaptive(cfg, ch, i), simulate_greedy(cfg, ch, i)
        assert np.array_equal(a.ages1, g.ages1)
        assert np.array_equal(a.decode_slots(User.USER1), g.decode_slots(User.USER1))


def test_p1_one_never_codes():
    K = 3
    trace = simulate_adaptive(SimConfig(K=K, horizon=20_000, master_seed=0), ChannelParams(1.0, 0.6))
    assert not np.any(trace.kinds == SymbolKind.MIXED_W1W2)
    for slot in trace.decode_slots(User.USER2):
        assert trace.kinds[slot - 1] == SymbolKind.RATELESS_W1


def test_cycle_structure():
    K = 6
    cfg = SimConfig(K=K, horizon=200_000, master_seed=5)
    trace = simulate_adaptive(cfg, ChannelParams(0.7, 0.4))
    cycles = trace.cycle_table
    assert len(cycles) > 1000
    assert np.all(cycles[:, 0] >= K)
    assert np.all((cycles[:, 1] == 0) <= (cycles[:, 2] == 0))
    # cycles tile the path and user 2 decodes exactly once per closed cycle
    ends = np.cumsum(cycles.sum(axis=1))
    u2 = trace.decode_slots(User.USER2)
    assert len(u2) in (len(cycles), len(cycles) + 1)
    starts = np.concatenate([[1], ends[:-1] + 1])
    assert np.all((u2[:len(cycles)] >= starts) & (u2[:len(cycles)] <= ends))
    assert np.all(np.isin(ends, trace.decode_slots(User.USER1)))


def test_cycle_stage_means_against_theory():
    K = 10
    ch = ChannelParams(0.7, 0.4)
    cfg = SimConfig(K=K, horizon=100_000, master_seed=7)
    table = np.concatenate([simulate_adaptive(cfg, ch, i).cycle_table for i in range(15)])
    assert len(table) >= 10**4
    theory = theory_report(K, ch)
    assert table[:, 0].mean() == pytest.approx(K / ch.p1, rel=0.02)
    assert table[:, 1].mean() <= theory.sumz_mean
    assert table[:, 2].mean() <= K / ch.p1


def test_user2_age_linear_in_K():
    ch = ChannelParams(0.7, 0.4)
    m = {K: np.mean([mean_age(simulate_adaptive(SimConfig(K=K, master_seed=6), ch, i).ages2) for i in range(20)])
         for K in (10, 20)}
    assert 1.5 <= m[20] / m[10] <= 2.5
