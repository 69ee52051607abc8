"""Closed-form AoI moments and bounds, and samplers for the phase-2 renewal-reward process.

Phase 2 of the adaptive scheme is a two-state chain ("uncoded", "coded").
From "uncoded" the chain moves to "coded" only when user 2 hears the symbol and
user 1 misses it (prob. ``q1*p2``); from "coded" it returns on any user-1
delivery (prob. ``p1``). Each slot spent in "coded" earns one user-2 equation
with prob. ``p2``. Cutting the chain at returns to "uncoded" gives i.i.d. pairs
``(Z, W)`` of interval length and reward.

Where two versions of a moment are exposed (``*_paper`` and ``*_derived``), the
``*_derived`` one follows from the pair distribution itself and is the one the
Monte Carlo samplers agree with; the other is kept for comparison.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .model import ChannelParams


class RenewalPair(NamedTuple):
    z: int
    w: int


@dataclass(frozen=True)
class TheoryReport:
    K: int
    p1: float
    p2: float
    delta1: float
    q: float
    t1_mean: float
    t1_sq_paper: float
    t1_sq_derived: float
    z_mean: float
    z_sq_paper: float
    z_sq_derived: float
    t3_mean_bound: float
    t3_sq_bound: float
    degenerate: bool = False
    # None when degenerate (p1 = 1 makes the capped reward never fire)
    r: float | None = None
    n1bar_mean: float | None = None
    n1bar_sq: float | None = None
    sumz_mean: float | None = None
    sumz_sq_bound: float | None = None
    delta2_upper: float | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def delta1_closed_form(K: int, p1: float) -> float:
    return (K / p1) * (1.5 + (1.0 - p1) / K)


def delta1_renewal(K: int, p1: float) -> float:
    """E[T] + E[T^2]/(2E[T]) for T ~ NB(K, p1); the continuous-time renewal value."""
    m = K / p1
    return m + (m * m + K * (1 - p1) / p1**2) / (2 * m)


def greedy_rate(p1: float, p2: float) -> float:
    """Base of the greedy scheme's exponential growth in K for user 2."""
    return p1 * p2 / (1.0 - math.sqrt((1.0 - p1) * (1.0 - p2))) ** 2


def capped_zero_prob(ch: ChannelParams) -> float:
    """P[W = 0]: the renewal interval earns no user-2 equation."""
    p1, p2, q1, q2 = ch.p1, ch.p2, ch.q1, ch.q2
    return p1 + q1 * q2 + p1 * p2 * q1 * q2 / (1.0 - q1 * q2)


def z_moments(ch: ChannelParams) -> tuple[float, float, float]:
    """(E[Z], E[Z^2] as printed in the source analysis, E[Z^2] from the pair distribution)."""
    p1, p2, q1, q2 = ch.p1, ch.p2, ch.q1, ch.q2
    mean = 1.0 + q1 * p2 / p1
    sq_paper = 1.0 - p2 + 4.0 * p2 / p1**2
    # Z = 1 + V with V ~ Geom(p1) on {1,2,...}: E[(1+V)^2] = (p1^2 + p1 + 2)/p1^2
    sq_derived = p1 + q1 * q2 + q1 * p2 * (p1**2 + p1 + 2.0) / p1**2
    return mean, sq_paper, sq_derived


def theory_report(K: int, ch: ChannelParams, z_sq: str = "derived", t1_sq: str = "derived") -> TheoryReport:
    """Evaluate every closed-form quantity at one parameter point.

    ``z_sq`` and ``t1_sq`` pick which second-moment variant feeds the bound on
    the user-2 average age (``"derived"`` or ``"paper"``).
    """
    if z_sq not in ("derived", "paper") or t1_sq not in ("derived", "paper"):
        raise ValueError("variant must be 'derived' or 'paper'")
    p1 = ch.p1
    t1_mean = K / p1
    t1_sq_paper = K**2 / p1**2 + (1 - p1) * K / p1
    t1_sq_derived = K**2 / p1**2 + K * (1 - p1) / p1**2
    z_mean, z_sq_paper, z_sq_derived = z_moments(ch)
    base = dict(
        K=K,
        p1=ch.p1,
        p2=ch.p2,
        delta1=delta1_closed_form(K, p1),
        q=greedy_rate(ch.p1, ch.p2),
        t1_mean=t1_mean,
        t1_sq_paper=t1_sq_paper,
        t1_sq_derived=t1_sq_derived,
        z_mean=z_mean,
        z_sq_paper=z_sq_paper,
        z_sq_derived=z_sq_derived,
        t3_mean_bound=t1_mean,
        t3_sq_bound=t1_sq_derived,
    )
    r = capped_zero_prob(ch)
    if p1 >= 1.0 or r >= 1.0:
        return TheoryReport(**base, degenerate=True)

    n1bar_mean = K / (1 - r)
    n1bar_sq = K * (K + r) / (1 - r) ** 2
    zsq = z_sq_derived if z_sq == "derived" else z_sq_paper
    sumz_mean = n1bar_mean * z_mean
    sumz_sq_bound = 2.0 * (K * (K + 2 * r - 1) / (1 - r) ** 2 * z_mean**2 + n1bar_mean * zsq)
    t1sq = t1_sq_derived if t1_sq == "derived" else t1_sq_paper
    # E[(T1+T2+T3)^2] <= 3 (sum of second moments); E[T1+T2+T3] >= E[T1]
    cycle_mean = t1_mean + sumz_mean + t1_mean
    cycle_sq = 3.0 * (t1sq + sumz_sq_bound + t1_sq_derived)
    return TheoryReport(
        **base,
        r=r,
        n1bar_mean=n1bar_mean,
        n1bar_sq=n1bar_sq,
        sumz_mean=sumz_mean,
        sumz_sq_bound=sumz_sq_bound,
        delta2_upper=cycle_mean + cycle_sq / (2.0 * t1_mean),
    )


def stationary_distribution(ch: ChannelParams) -> tuple[float, float]:
    to_coded = ch.q1 * ch.p2
    total = ch.p1 + to_coded
    return ch.p1 / total, to_coded / total


def sample_renewal_pair(ch: ChannelParams, rng: np.random.Generator) -> RenewalPair:
    if rng.random() < ch.p1 + ch.q1 * ch.q2:
        return RenewalPair(1, 0)
    v = int(rng.geometric(ch.p1))
    return RenewalPair(1 + v, int(rng.binomial(v, ch.p2)))


def sample_renewal_pairs(ch: ChannelParams, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`sample_renewal_pair`; returns ``(z, w)`` int64 arrays."""
    excursion = rng.random(n) >= ch.p1 + ch.q1 * ch.q2
    v = np.where(excursion, rng.geometric(ch.p1, n), 0)
    w = rng.binomial(v, ch.p2)
    return (1 + v).astype(np.int64), w.astype(np.int64)


def run_phase2_chain(ch: ChannelParams, n_slots: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Drive the uncoded/coded chain with Bernoulli erasures; per-slot states (1 or 2) and rewards."""
    u = rng.random((n_slots, 2))
    v1 = (u[:, 0] < ch.p1).astype(np.uint8)
    v2 = (u[:, 1] < ch.p2).astype(np.uint8)
    return _kernels.phase2_chain(v1, v2)


def renewal_pairs_from_chain(states: np.ndarray, rewards: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cut a chain trajectory into complete excursions from "uncoded" back to "uncoded"."""
    starts = np.flatnonzero(states == _kernels.UNCODED)
    z = np.diff(starts)
    cum = np.concatenate([[0], np.cumsum(rewards, dtype=np.int64)])
    w = cum[starts[1:]] - cum[starts[:-1]]
    return z, w


def chain_occupancy(ch: ChannelParams, n_slots: int, rng: np.random.Generator) -> tuple[float, float]:
    states, _ = run_phase2_chain(ch, n_slots, rng)
    coded = float(np.mean(states == _kernels.MIXED))
    return 1.0 - coded, coded


@dataclass(frozen=True)
class RenewalCheck:
    """Empirical Z moments from sampled pairs next to both closed-form variants."""

    n: int
    z_mean: float
    z_sq: float
    z_mean_theory: float
    z_sq_derived: float
    z_sq_paper: float
    z_sq_tol: float

    @property
    def derived_matches(self) -> bool:
        return abs(self.z_sq - self.z_sq_derived) <= self.z_sq_tol * self.z_sq_derived

    @property
    def alt_matches(self) -> bool:
        return abs(self.z_sq - self.z_sq_paper) <= self.z_sq_tol * self.z_sq_paper


def renewal_check(ch: ChannelParams, n: int, rng: np.random.Generator, z_sq_tol: float = 0.02) -> RenewalCheck:
    z, _ = sample_renewal_pairs(ch, n, rng)
    mean, sq_paper, sq_derived = z_moments(ch)
    return RenewalCheck(n, float(z.mean()), float(np.mean(z.astype(float) ** 2)), mean, sq_derived, sq_paper, z_sq_tol)


@dataclass(frozen=True)
class StoppingTimeStats:
    samples: int
    n1_mean: float
    n1bar_mean: float
    n1bar_sq: float
    sumz_mean: float
    sumz_sq: float
    sumz_sq_indep: float
    ratio: float
    ratio_se: float
    n1bar_dominates: bool  # N1bar >= N1 on every sample


def _segments(z: np.ndarray, w: np.ndarray, K: int):
    """Split a pair sequence at each point where the capped reward count hits a multiple of K.

    Returns per-segment ``(start, N1bar, N1, sum of Z)`` for complete segments and
    the index where the incomplete tail begins.
    """
    wbar = np.minimum(w, 1)
    cwbar = np.cumsum(wbar)
    ends = np.flatnonzero((wbar == 1) & (cwbar % K == 0))
    if ends.size == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, np.int64), 0
    starts = np.concatenate([[0], ends[:-1] + 1])
    cz = np.concatenate([[0], np.cumsum(z)])
    cw = np.concatenate([[0], np.cumsum(w)])
    sums = cz[ends + 1] - cz[starts]
    # N1: first index in the segment where uncapped rewards reach K
    hit = np.searchsorted(cw, cw[starts] + K, side="left")
    n1 = hit - starts
    return starts, ends - starts + 1, n1, sums, int(ends[-1] + 1)


def stopping_time_stats(
    K: int,
    ch: ChannelParams,
    num_samples: int,
    rng: np.random.Generator,
    chunk: int = 1 << 21,
) -> StoppingTimeStats:
    """Empirical moments of the stopping times N1, N1bar and of the sum of Z up to N1bar.

    Also compares the second moment of the sum under the dependent stopping time
    with the same sum under an independent copy of it: each segment's length is
    reused to sum an equally long run of fresh, independent Z values.
    """
    if ch.p1 >= 1.0:
        raise ValueError("p1 = 1: capped rewards never fire, N1bar is infinite")
    n1bar_all, n1_all, sums_all = [], [], []
    got = 0
    tail_z = np.empty(0, np.int64)
    tail_w = np.empty(0, np.int64)
    while got < num_samples:
        z_new, w_new = sample_renewal_pairs(ch, chunk, rng)
        z = np.concatenate([tail_z, z_new])
        w = np.concatenate([tail_w, w_new])
        _, n1bar, n1, sums, cut = _segments(z, w, K)
        tail_z, tail_w = z[cut:], w[cut:]
        n1bar_all.append(n1bar)
        n1_all.append(n1)
        sums_all.append(sums)
        got += len(n1bar)
    n1bar = np.concatenate(n1bar_all)[:num_samples]
    n1 = np.concatenate(n1_all)[:num_samples]
    dep = np.concatenate(sums_all)[:num_samples].astype(float)

    indep = np.empty(len(n1bar))
    step = max(1, chunk // max(1, int(n1bar.max())))
    for lo in range(0, len(n1bar), step):
        lengths = n1bar[lo:lo + step]
        fresh_z, _ = sample_renewal_pairs(ch, int(lengths.sum()), rng)
        cz = np.concatenate([[0], np.cumsum(fresh_z)])
        bounds = np.concatenate([[0], np.cumsum(lengths)])
        indep[lo:lo + step] = cz[bounds[1:]] - cz[bounds[:-1]]

    a, b = dep**2, indep**2
    ma, mb = a.mean(), b.mean()
    ratio = ma / mb
    cov = np.cov(a, b)
    n = len(a)
    var = (cov[0, 0] / mb**2 - 2 * ma * cov[0, 1] / mb**3 + ma**2 * cov[1, 1] / mb**4) / n
    return StoppingTimeStats(
        samples=n,
        n1_mean=float(n1.mean()),
        n1bar_mean=float(n1bar.mean()),
        n1bar_sq=float(np.mean(n1bar.astype(float) ** 2)),
        sumz_mean=float(dep.mean()),
        sumz_sq=float(ma),
        sumz_sq_indep=float(mb),
        ratio=float(ratio),
        ratio_se=float(math.sqrt(max(var, 0.0))),
        n1bar_dominates=bool(np.all(n1bar >= n1)),
    )
