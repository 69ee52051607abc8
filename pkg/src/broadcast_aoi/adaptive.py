"""Adaptive inter-update coding.

The scheme runs in cycles. In phase 1 both users chase the same update ``w1 = w2``
and the source sends rateless symbols of it. Once user 1 decodes, if user 2 has
not, the source moves user 1 on to a fresh update while user 2 keeps ``w2``
(phase 2). In phase 2 the source sends the next uncoded symbol ``w1(k1+1)``; if
user 2 caught that symbol and user 1 missed it, the source switches to mixing
``w1(k1+1)`` with a random combination of ``w2``, which user 1 can use (it already
knows ``w2``) and user 2 can use (it strips the known ``w1(k1+1)``). The cycle
closes when user 1 decodes with user 2 already done.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .channel import ErasurePair, derive_stream
from .model import ChannelParams, DecodeEvent, PathTrace, SimConfig, User, require_valid


class Phase(enum.IntEnum):
    PHASE1 = 1
    PHASE2 = 2


class SymbolType(enum.IntEnum):
    UNCODED = 1
    CODED = 2


class SymbolKind(enum.IntEnum):
    RATELESS_W1 = _kernels.RATELESS
    UNCODED_W1 = _kernels.UNCODED
    MIXED_W1W2 = _kernels.MIXED


@dataclass(frozen=True)
class SymbolDescriptor:
    kind: SymbolKind
    w1_gen: int
    w2_gen: int
    index: int | None = None  # 1-based w1 symbol index for the phase-2 kinds


@dataclass(frozen=True)
class AdaptiveState:
    phase: Phase = Phase.PHASE1
    c: SymbolType = SymbolType.UNCODED
    k1: int = 0
    k2: int = 0
    w1_gen: int = 1
    w2_gen: int = 1


def select_symbol(state: AdaptiveState) -> SymbolDescriptor:
    if state.phase is Phase.PHASE1:
        return SymbolDescriptor(SymbolKind.RATELESS_W1, state.w1_gen, state.w2_gen)
    kind = SymbolKind.UNCODED_W1 if state.c is SymbolType.UNCODED else SymbolKind.MIXED_W1W2
    return SymbolDescriptor(kind, state.w1_gen, state.w2_gen, state.k1 + 1)


def adaptive_step(state: AdaptiveState, v: ErasurePair, t: int, K: int) -> tuple[AdaptiveState, list[DecodeEvent]]:
    """Advance one slot given the feedback ``v`` for the symbol sent in slot ``t``."""
    k1, k2, c, phase = state.k1, state.k2, state.c, state.phase
    k1 = min(k1 + v.v1, K)
    # only rateless and mixed symbols carry w2 content
    if phase is Phase.PHASE1 or c is SymbolType.CODED:
        k2 = min(k2 + v.v2, K)
    if phase is Phase.PHASE2:
        if c is SymbolType.UNCODED:
            c = SymbolType.CODED if (v.v1, v.v2) == (0, 1) else SymbolType.UNCODED
        else:
            c = SymbolType.UNCODED if v.v1 else SymbolType.CODED

    events = []
    if k1 == K:
        events.append(DecodeEvent(User.USER1, t, state.w1_gen))
    if k2 == K and state.k2 < K:
        events.append(DecodeEvent(User.USER2, t, state.w2_gen))

    if k1 < K:
        return replace(state, c=c, k1=k1, k2=k2), events
    if k2 == K:
        return AdaptiveState(Phase.PHASE1, SymbolType.UNCODED, 0, 0, t + 1, t + 1), events
    if phase is Phase.PHASE1:
        return AdaptiveState(Phase.PHASE2, SymbolType.UNCODED, 0, k2, t + 1, state.w2_gen), events
    return replace(state, c=c, k1=0, k2=k2, w1_gen=t + 1), events


class CycleTracker:
    """Turns a stream of (state before, state after, events) into (T1, T2, T3) records."""

    def __init__(self):
        self.records: list[tuple[int, int, int]] = []
        self._start = 1
        self._entry = 0
        self._user2_done = 0

    def observe(self, t: int, before: AdaptiveState, after: AdaptiveState, events: list[DecodeEvent]) -> None:
        if any(ev.user is User.USER2 for ev in events):
            self._user2_done = t
        if before.phase is Phase.PHASE1 and after.phase is Phase.PHASE2:
            self._entry = t + 1
        if after.w2_gen != before.w2_gen:
            if before.phase is Phase.PHASE1:
                self.records.append((t - self._start + 1, 0, 0))
            else:
                self.records.append((
                    self._entry - self._start,
                    self._user2_done - self._entry + 1,
                    t - self._user2_done,
                ))
            self._start = t + 1


def simulate_adaptive(cfg: SimConfig, ch: ChannelParams, path_index: int = 0, engine: str = "compiled") -> PathTrace:
    """Simulate one adaptive-coding sample path, recording per-cycle stage lengths."""
    require_valid(cfg, ch)
    stream = derive_stream(cfg.master_seed, path_index)
    if engine == "compiled":
        v1, v2 = stream.take(cfg.horizon, ch)
        ages1, ages2, events, cycles, kinds = _kernels.adaptive_path(v1, v2, cfg.K)
        return PathTrace(ages1, ages2, events, cycles, kinds)
    if engine != "reference":
        raise ValueError(f"unknown engine {engine!r}")

    ages = np.empty((2, cfg.horizon), dtype=np.int64)
    kinds = np.empty(cfg.horizon, dtype=np.int8)
    age = [0, 0]
    rows = []
    tracker = CycleTracker()
    state = AdaptiveState()
    for t in range(1, cfg.horizon + 1):
        kinds[t - 1] = select_symbol(state).kind
        before = state
        state, events = adaptive_step(before, stream.next_pair(ch), t, cfg.K)
        tracker.observe(t, before, state, events)
        age[0] += 1
        age[1] += 1
        for ev in events:
            age[ev.user - 1] = ev.age
            rows.append((int(ev.user), ev.slot, ev.generation_slot))
        ages[:, t - 1] = age
    return PathTrace(
        ages[0],
        ages[1],
        np.array(rows, dtype=np.int64).reshape(-1, 3),
        np.array(tracker.records, dtype=np.int64).reshape(-1, 3),
        kinds,
    )
