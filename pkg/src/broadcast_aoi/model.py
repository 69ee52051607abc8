"""Shared domain types and age-of-information bookkeeping.

Time is slotted. Slot ``t`` runs from 1 to ``horizon``; ages are sampled at the
end of each slot. An update that becomes the source's target "at t+1" is taken
to be generated at the beginning of slot ``t+1``, so a decode at the end of slot
``t`` of an update generated at ``tau`` resets the age to ``t - tau``. Before the
first decode the age is ``t`` (a virtual update delivered at t=0).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class ConfigError(ValueError):
    """Raised when a simulation is requested with an invalid configuration."""


class Scheme(str, enum.Enum):
    GREEDY = "greedy"
    ADAPTIVE = "adaptive"


class User(enum.IntEnum):
    USER1 = 1
    USER2 = 2


@dataclass(frozen=True)
class ChannelParams:
    """Per-slot delivery probabilities of the two independent erasure links."""

    p1: float
    p2: float

    def __post_init__(self):
        for name in ("p1", "p2"):
            value = getattr(self, name)
            if not (0.0 < value <= 1.0):
                raise ConfigError(f"{name}={value} outside (0, 1]")

    @property
    def q1(self) -> float:
        return 1.0 - self.p1

    @property
    def q2(self) -> float:
        return 1.0 - self.p2

    @property
    def weak_strong_swapped(self) -> bool:
        """True when user 1 is the weaker link (legal, but not the intended regime)."""
        return self.p1 < self.p2


@dataclass(frozen=True)
class SimConfig:
    K: int
    horizon: int = 100_000
    num_paths: int = 50
    master_seed: int = 0
    scheme: Scheme = Scheme.ADAPTIVE
    oracle_mode: bool = False


@dataclass(frozen=True)
class DecodeEvent:
    user: User
    slot: int
    generation_slot: int

    @property
    def age(self) -> int:
        return self.slot - self.generation_slot


@dataclass(frozen=True)
class CycleRecord:
    """Stage lengths of one adaptive updating cycle (phase 1, phase 2a, phase 2b)."""

    t1: int
    t2: int
    t3: int

    @property
    def length(self) -> int:
        return self.t1 + self.t2 + self.t3


@dataclass(frozen=True)
class PathTrace:
    """One simulated sample path.

    ``events`` is an ``(n, 3)`` integer array of ``(user, slot, generation_slot)``
    rows in slot order and ``cycle_table`` an ``(m, 3)`` array of ``(t1, t2, t3)``;
    the list-of-dataclass views are built on demand because long paths produce
    tens of thousands of events.
    """

    ages1: np.ndarray
    ages2: np.ndarray
    events: np.ndarray
    cycle_table: np.ndarray = field(default_factory=lambda: np.zeros((0, 3), dtype=np.int64))
    kinds: np.ndarray | None = None  # adaptive only: symbol kind sent in each slot

    @property
    def horizon(self) -> int:
        return len(self.ages1)

    @property
    def decode_events(self) -> list[DecodeEvent]:
        return [DecodeEvent(User(int(u)), int(s), int(g)) for u, s, g in self.events]

    @property
    def cycles(self) -> list[CycleRecord]:
        return [CycleRecord(int(a), int(b), int(c)) for a, b, c in self.cycle_table]

    def decode_slots(self, user: User) -> np.ndarray:
        return self.events[self.events[:, 0] == int(user), 1]


def mean_age(trace_ages: Sequence[int] | np.ndarray) -> float:
    """Time average of slot-sampled ages."""
    ages = np.asarray(trace_ages)
    if ages.size == 0:
        raise ValueError("empty trace")
    return float(ages.mean())


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_config(cfg: SimConfig, ch: ChannelParams) -> ValidationReport:
    report = ValidationReport()
    if cfg.K < 1:
        report.errors.append("K < 1")
    if cfg.horizon < 1:
        report.errors.append("horizon < 1")
    elif cfg.horizon < cfg.K:
        report.errors.append("horizon < K")
    if cfg.num_paths < 1:
        report.errors.append("num_paths < 1")
    if not 0 <= cfg.master_seed < 2**64:
        report.errors.append("master_seed outside 64-bit unsigned range")
    for name, p in (("p1", ch.p1), ("p2", ch.p2)):
        if not 0.0 < p <= 1.0:
            report.errors.append(f"{name} outside (0, 1]")
    if ch.p1 < ch.p2:
        report.warnings.append("p1 < p2")
    if ch.p1 == 1.0:
        report.warnings.append("p1 = 1: theory bounds degenerate")
    return report


def require_valid(cfg: SimConfig, ch: ChannelParams) -> ValidationReport:
    report = validate_config(cfg, ch)
    if not report.ok:
        raise ConfigError("; ".join(report.errors))
    return report
