"""Many-path experiments and the two parameter sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .adaptive import simulate_adaptive
from .greedy import simulate_greedy
from .model import ChannelParams, Scheme, SimConfig, mean_age, require_valid

Z95 = 1.959963984540054


@dataclass(frozen=True)
class ExperimentSummary:
    scheme: Scheme
    K: int
    p1: float
    p2: float
    horizon: int
    num_paths: int
    seed: int
    delta1_hat: float
    delta2_hat: float
    ci1: float | None
    ci2: float | None
    path_means1: tuple[float, ...]
    path_means2: tuple[float, ...]
    # adaptive only: means over all completed cycles of all paths
    t1_mean: float | None = None
    t2_mean: float | None = None
    t3_mean: float | None = None
    num_cycles: int = 0


def ci_halfwidth(values) -> float | None:
    """95% normal-approximation half-width of the mean; None with fewer than two values."""
    x = np.asarray(values, dtype=float)
    if len(x) < 2:
        return None
    return float(Z95 * x.std(ddof=1) / math.sqrt(len(x)))


def run_experiment(cfg: SimConfig, ch: ChannelParams) -> ExperimentSummary:
    require_valid(cfg, ch)
    simulate = simulate_greedy if cfg.scheme is Scheme.GREEDY else simulate_adaptive
    m1, m2, cycles = [], [], []
    for i in range(cfg.num_paths):
        trace = simulate(cfg, ch, path_index=i)
        m1.append(mean_age(trace.ages1))
        m2.append(mean_age(trace.ages2))
        cycles.append(trace.cycle_table)

    stages: dict[str, float | None] = dict(t1_mean=None, t2_mean=None, t3_mean=None)
    table = np.concatenate(cycles)
    if cfg.scheme is Scheme.ADAPTIVE and len(table):
        stages = dict(zip(("t1_mean", "t2_mean", "t3_mean"), map(float, table.mean(axis=0))))
    return ExperimentSummary(
        scheme=cfg.scheme,
        K=cfg.K,
        p1=ch.p1,
        p2=ch.p2,
        horizon=cfg.horizon,
        num_paths=cfg.num_paths,
        seed=cfg.master_seed,
        delta1_hat=float(np.mean(m1)),
        delta2_hat=float(np.mean(m2)),
        ci1=ci_halfwidth(m1),
        ci2=ci_halfwidth(m2),
        path_means1=tuple(m1),
        path_means2=tuple(m2),
        num_cycles=len(table),
        **stages,
    )


def _sweep(points: Iterable[tuple[SimConfig, ChannelParams]]) -> list[ExperimentSummary]:
    points = list(points)
    return [
        run_experiment(replace(cfg, scheme=scheme), ch)
        for scheme in (Scheme.GREEDY, Scheme.ADAPTIVE)
        for cfg, ch in points
    ]


def sweep_p1(K: int, p2: float, p1_values: Iterable[float], base_cfg: SimConfig) -> list[ExperimentSummary]:
    """Both schemes at each p1; rows ordered scheme first, then p1 in the given order."""
    return _sweep((replace(base_cfg, K=K), ChannelParams(p1, p2)) for p1 in p1_values)


def sweep_K(p1: float, p2: float, K_values: Iterable[int], base_cfg: SimConfig) -> list[ExperimentSummary]:
    ch = ChannelParams(p1, p2)
    return _sweep((replace(base_cfg, K=K), ch) for K in K_values)
