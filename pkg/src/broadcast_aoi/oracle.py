"""Rank-based ground truth for the equation-counting decoder model.

The simulators assume each delivered symbol that the scheme counts is a novel
equation. Here every broadcast symbol is materialized as a coefficient vector
over GF(256) and fed to a per-user Gaussian-elimination decoder, and the
counting model's decode events are checked against actual decodability.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .adaptive import AdaptiveState, SymbolKind, adaptive_step, select_symbol
from .channel import derive_generator, derive_stream
from .gf256 import INV, MUL
from .model import ChannelParams, SimConfig, User, require_valid

ORACLE_PURPOSE = 0


class KnowledgeBase:
    """Received equations of one user, kept in reduced row-echelon form.

    Variables come in blocks of ``K``, one block per update (keyed by the
    update's generation slot). Rows are uint8 coefficient vectors over all
    blocks currently in scope.
    """

    def __init__(self, K: int):
        self.K = K
        self.blocks: list[int] = []
        self.rows: list[np.ndarray] = []
        self.pivots: list[int] = []

    @property
    def num_vars(self) -> int:
        return self.K * len(self.blocks)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def __contains__(self, gen: int) -> bool:
        return gen in self.blocks

    def add_update(self, gen: int) -> None:
        if gen in self.blocks:
            return
        self.blocks.append(gen)
        pad = np.zeros(self.K, dtype=np.uint8)
        self.rows = [np.concatenate([r, pad]) for r in self.rows]

    def columns(self, gen: int) -> range:
        try:
            b = self.blocks.index(gen)
        except ValueError:
            raise KeyError(f"update {gen} not in scope") from None
        return range(b * self.K, (b + 1) * self.K)

    def vector(self, parts: dict[int, np.ndarray]) -> np.ndarray:
        """Full-width coefficient vector from per-update coefficient blocks, extending scope as needed."""
        for gen in parts:
            self.add_update(gen)
        vec = np.zeros(self.num_vars, dtype=np.uint8)
        for gen, coeffs in parts.items():
            cols = self.columns(gen)
            vec[cols.start:cols.stop] = coeffs
        return vec

    def absorb(self, coeffs: np.ndarray) -> bool:
        """Eliminate ``coeffs`` against the stored rows; keep it if anything is left. Returns novelty."""
        r = np.array(coeffs, dtype=np.uint8)
        for row, p in zip(self.rows, self.pivots):
            if r[p]:
                r ^= MUL[r[p]][row]
        nz = np.flatnonzero(r)
        if nz.size == 0:
            return False
        p = int(nz[0])
        r = MUL[INV[r[p]]][r]
        for i, row in enumerate(self.rows):
            if row[p]:
                self.rows[i] = row ^ MUL[row[p]][r]
        at = int(np.searchsorted(self.pivots, p))
        self.rows.insert(at, r)
        self.pivots.insert(at, p)
        return True

    def knows(self, col: int) -> bool:
        """Whether the unit vector on column ``col`` lies in the row space."""
        try:
            i = self.pivots.index(col)
        except ValueError:
            return False
        return np.count_nonzero(self.rows[i]) == 1

    def knows_symbol(self, gen: int, index: int) -> bool:
        return gen in self.blocks and self.knows(self.columns(gen)[index - 1])

    def is_decodable(self, gen: int) -> bool:
        return all(self.knows(c) for c in self.columns(gen))

    def drop_update(self, gen: int) -> None:
        """Eliminate an update's variables, keeping exactly the equations that do not involve them."""
        drop = list(self.columns(gen))
        dropped = set(drop)
        keep = [c for c in range(self.num_vars) if c not in dropped]
        rows, self.rows, self.pivots = self.rows, [], []
        for row in rows:
            self.absorb(row[drop + keep])
        n = len(drop)
        kept = [(r[n:], p - n) for r, p in zip(self.rows, self.pivots) if p >= n]
        self.rows = [r for r, _ in kept]
        self.pivots = [p for _, p in kept]
        self.blocks.remove(gen)

    def restrict_to(self, gens: set[int]) -> list[int]:
        dropped = [g for g in self.blocks if g not in gens]
        for g in dropped:
            self.drop_update(g)
        return dropped


@dataclass(frozen=True)
class OracleEvent:
    user: User
    slot: int
    generation_slot: int
    decodable: bool
    cause: str = ""


@dataclass(frozen=True)
class Degeneracy:
    """A delivered symbol the counting model counted but whose residual was zero."""

    user: User
    slot: int
    generation_slot: int
    kind: SymbolKind


@dataclass
class ConsistencyReport:
    K: int
    p1: float
    p2: float
    slots: int = 0
    cycles: int = 0
    events: list[OracleEvent] = field(default_factory=list)
    degeneracies: list[Degeneracy] = field(default_factory=list)
    user1_deliveries: int = 0
    user1_non_novel: int = 0
    mixed_to_user2: int = 0
    mixed_to_user2_novel: int = 0
    strip_failures: int = 0

    @property
    def disagreements(self) -> list[OracleEvent]:
        return [e for e in self.events if not e.decodable]

    @property
    def agreement_rate(self) -> float:
        if not self.events:
            return 1.0
        return 1.0 - len(self.disagreements) / len(self.events)

    @property
    def mismatch_rate(self) -> float:
        return 1.0 - self.agreement_rate

    @property
    def all_attributed(self) -> bool:
        return all(e.cause == "degenerate coefficients" for e in self.disagreements)


def _materialize(sym, K: int, rng: np.random.Generator) -> dict[int, np.ndarray]:
    if sym.kind is SymbolKind.RATELESS_W1:
        return {sym.w1_gen: rng.integers(0, 256, K, dtype=np.uint8)}
    unit = np.zeros(K, dtype=np.uint8)
    if sym.kind is SymbolKind.UNCODED_W1:
        unit[sym.index - 1] = 1
        return {sym.w1_gen: unit}
    unit[sym.index - 1] = rng.integers(1, 256)
    return {sym.w1_gen: unit, sym.w2_gen: rng.integers(0, 256, K, dtype=np.uint8)}


def run_verified_simulation(
    cfg: SimConfig,
    ch: ChannelParams,
    cycles: int | None = None,
    path_index: int = 0,
) -> ConsistencyReport:
    """Replay an adaptive path with real coefficient vectors and audit every decode event.

    The erasure stream is the one :func:`simulate_adaptive` uses for the same
    ``(master_seed, path_index)``, so the audited path is that path. Runs for
    ``cfg.horizon`` slots, or until ``cycles`` cycles have closed if given.
    """
    require_valid(cfg, ch)
    K = cfg.K
    stream = derive_stream(cfg.master_seed, path_index)
    rng = derive_generator(cfg.master_seed, path_index, ORACLE_PURPOSE)
    kbs = {User.USER1: KnowledgeBase(K), User.USER2: KnowledgeBase(K)}
    degenerate: dict[User, set[int]] = {User.USER1: set(), User.USER2: set()}
    report = ConsistencyReport(K, ch.p1, ch.p2)
    state = AdaptiveState()

    for t in range(1, cfg.horizon + 1):
        if cycles is not None and report.cycles >= cycles:
            break
        sym = select_symbol(state)
        parts = _materialize(sym, K, rng)
        v = stream.next_pair(ch)
        counted = {
            User.USER1: bool(v.v1),
            User.USER2: bool(v.v2) and state.k2 < K and sym.kind is not SymbolKind.UNCODED_W1,
        }
        target = {User.USER1: state.w1_gen, User.USER2: state.w2_gen}

        for user, delivered in ((User.USER1, v.v1), (User.USER2, v.v2)):
            if not delivered:
                continue
            kb = kbs[user]
            if user is User.USER1:
                report.user1_deliveries += 1
            if user is User.USER2 and sym.kind is SymbolKind.MIXED_W1W2:
                report.mixed_to_user2 += 1
                if not kb.knows_symbol(sym.w1_gen, sym.index):
                    report.strip_failures += 1
            novel = kb.absorb(kb.vector(parts))
            if user is User.USER1 and not novel:
                report.user1_non_novel += 1
            if user is User.USER2 and sym.kind is SymbolKind.MIXED_W1W2 and novel:
                report.mixed_to_user2_novel += 1
            if counted[user] and not novel:
                report.degeneracies.append(Degeneracy(user, t, target[user], sym.kind))
                degenerate[user].add(target[user])

        before = state
        state, events = adaptive_step(before, v, t, K)
        for ev in events:
            kb = kbs[ev.user]
            ok = kb.is_decodable(ev.generation_slot)
            cause = ""
            if not ok:
                implicated = degenerate[ev.user] & ({ev.generation_slot} | set(kb.blocks))
                cause = "degenerate coefficients" if implicated else "unexplained"
            report.events.append(OracleEvent(ev.user, t, ev.generation_slot, ok, cause))

        scope = {state.w1_gen, state.w2_gen}
        for user, kb in kbs.items():
            for g in kb.restrict_to(scope):
                degenerate[user].discard(g)
        if state.w2_gen != before.w2_gen:
            report.cycles += 1
        report.slots = t
    return report
