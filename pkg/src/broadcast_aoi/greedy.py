"""Greedy baseline: rateless coding of one update at a time, restarting as soon as user 1 decodes.

User 2 listens to the same rateless stream. If it collects K symbols of the
in-flight update no later than user 1 does, it decodes that update; otherwise its
partial symbols are useless once the source switches and are discarded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .channel import ErasurePair, derive_stream
from .model import ChannelParams, DecodeEvent, PathTrace, SimConfig, User, require_valid


@dataclass(frozen=True)
class GreedyState:
    gen_slot: int = 1
    n1: int = 0
    n2: int = 0


def greedy_step(state: GreedyState, v: ErasurePair, t: int, K: int) -> tuple[GreedyState, list[DecodeEvent]]:
    n1 = min(state.n1 + v.v1, K)
    n2 = min(state.n2 + v.v2, K)
    events = []
    if n1 == K:
        events.append(DecodeEvent(User.USER1, t, state.gen_slot))
    if n2 == K and state.n2 < K:
        events.append(DecodeEvent(User.USER2, t, state.gen_slot))
    if n1 == K:
        return GreedyState(t + 1, 0, 0), events
    return GreedyState(state.gen_slot, n1, n2), events


def _trace_from_steps(steps, horizon: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ages = np.empty((2, horizon), dtype=np.int64)
    age = [0, 0]
    rows = []
    for i, events in enumerate(steps):
        t = i + 1
        age[0] += 1
        age[1] += 1
        for ev in events:
            age[ev.user - 1] = ev.age
            rows.append((int(ev.user), ev.slot, ev.generation_slot))
        ages[:, i] = age
    return ages[0], ages[1], np.array(rows, dtype=np.int64).reshape(-1, 3)


def simulate_greedy(cfg: SimConfig, ch: ChannelParams, path_index: int = 0, engine: str = "compiled") -> PathTrace:
    """Simulate one greedy sample path.

    ``engine="reference"`` drives :func:`greedy_step` slot by slot; the default
    runs the equivalent compiled loop.
    """
    require_valid(cfg, ch)
    stream = derive_stream(cfg.master_seed, path_index)
    if engine == "compiled":
        v1, v2 = stream.take(cfg.horizon, ch)
        ages1, ages2, events = _kernels.greedy_path(v1, v2, cfg.K)
        return PathTrace(ages1, ages2, events)
    if engine != "reference":
        raise ValueError(f"unknown engine {engine!r}")

    def steps():
        state = GreedyState()
        for t in range(1, cfg.horizon + 1):
            state, events = greedy_step(state, stream.next_pair(ch), t, cfg.K)
            yield events

    ages1, ages2, events = _trace_from_steps(steps(), cfg.horizon)
    return PathTrace(ages1, ages2, events)
