"""Scenario execution and CDF / KS analysis of the decision statistic."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attacks import AttackSpec
from .detect import Decision, classify, decision_statistic
from .simulate import NetworkSpec, run_network


@dataclass(frozen=True)
class ScenarioConfig:
    label: str
    network: NetworkSpec
    attack1: AttackSpec
    attack2: AttackSpec
    n: int
    trials: int
    master_seed: int
    delta: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.delta <= 0:
            raise ValueError("delta must be positive")

    def override(self, **kwargs) -> "ScenarioConfig":
        from dataclasses import replace

        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


@dataclass(frozen=True)
class TrialRecord:
    scenario: str
    trial_index: int
    n: int
    seed: int
    statistic: float
    verdict: Decision

    def __post_init__(self):
        if self.statistic < 0:
            raise ValueError("statistic must be non-negative")


def run_scenario(cfg: ScenarioConfig) -> list[TrialRecord]:
    """Run all trials; records are keyed and ordered by trial index, so the
    output does not depend on execution order."""
    ch = cfg.network.observation_channel()
    records = []
    for t in range(cfg.trials):
        trace = run_network(
            cfg.network, cfg.attack1, cfg.attack2, cfg.n, cfg.master_seed, trial_index=t
        )
        d = decision_statistic(trace.y, ch)
        verdict = classify(d, cfg.delta)
        records.append(
            TrialRecord(
                scenario=cfg.label,
                trial_index=t,
                n=cfg.n,
                seed=cfg.master_seed,
                statistic=d,
                verdict=verdict.decision,
            )
        )
    return records


def empirical_cdf(samples) -> list[tuple[float, float]]:
    """Right-continuous step CDF as (value, cumulative fraction) pairs."""
    xs = np.sort(np.asarray(samples, dtype=float))
    if xs.size == 0:
        raise ValueError("need at least one sample")
    values, last_idx = np.unique(xs, return_index=True)
    counts = np.diff(np.append(last_idx, xs.size))
    fractions = np.cumsum(counts) / xs.size
    return list(zip(values.tolist(), fractions.tolist()))


def ks_two_sample(a, b) -> float:
    """Sup-norm distance between two empirical CDFs."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("both sample sets must be non-empty")
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(cdf_a - cdf_b).max())
