"""Coincidence-count simulation, background subtraction, and photon diagnostics.

Counts are modeled per setting as windowed Poisson totals: the signal
coincidences at mean efficiency * counts_per_setting * probability + background,
plus one independent background measurement per setting.  Each setting draws
from a sub-seed derived from (seed, input, projector), so results are
bit-reproducible regardless of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SourceConfig:
    """Statistical model of the photon source and detection chain.

    counts_per_setting is the expected signal coincidence total at unit
    probability and unit efficiency; background the expected accidental
    total per setting; efficiency folds in every loss between source and
    detector; window is the coincidence window in seconds.
    """

    counts_per_setting: float
    background: float = 0.0
    efficiency: float = 1.0
    window: float = 50e-9
    seed: int = 0

    def __post_init__(self):
        if self.counts_per_setting <= 0:
            raise ValueError("counts_per_setting must be positive")
        if self.background < 0:
            raise ValueError("background must be nonnegative")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError("efficiency must be in [0, 1]")
        if self.window <= 0:
            raise ValueError("coincidence window must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass(frozen=True)
class CountRecord:
    """Raw and background coincidence totals for one (input, projector) setting."""

    input_index: int
    meas_index: int
    raw_counts: int
    background_counts: int

    def __post_init__(self):
        if self.input_index < 1 or self.meas_index < 1:
            raise ValueError("setting indices are 1-based")
        if self.raw_counts < 0 or self.background_counts < 0:
            raise ValueError("counts must be nonnegative")


def _mean_table(probabilities: np.ndarray, cfg: SourceConfig) -> np.ndarray:
    p = np.asarray(probabilities, dtype=float)
    if p.ndim != 2 or p.shape[1] != 9 or not 1 <= p.shape[0] <= 9:
        raise ValueError(f"expected a (rows<=9, 9) probability table, got shape {p.shape}")
    if p.min() < -1e-9 or p.max() > 1.0 + 1e-9:
        raise ValueError("probabilities outside [0, 1] beyond tolerance")
    return cfg.efficiency * cfg.counts_per_setting * np.clip(p, 0.0, 1.0) + cfg.background


def simulate_counts(probabilities, cfg: SourceConfig):
    """Poisson-sampled CountRecords for a probability table (rows = inputs).

    A full 9 x 9 table yields the 81 process-tomography records; a single-row
    table yields the 9 records of a state-mode run.
    """
    means = _mean_table(probabilities, cfg)
    records = []
    for j in range(1, means.shape[0] + 1):
        for i in range(1, 10):
            rng = np.random.default_rng([cfg.seed, j, i])
            raw = int(rng.poisson(means[j - 1, i - 1]))
            bg = int(rng.poisson(cfg.background))
            records.append(CountRecord(j, i, raw, bg))
    return records


def exact_counts(probabilities, cfg: SourceConfig):
    """Noise-free records: rounded expected totals instead of Poisson draws."""
    means = _mean_table(probabilities, cfg)
    bg = int(round(cfg.background))
    return [
        CountRecord(j, i, int(round(means[j - 1, i - 1])), bg)
        for j in range(1, means.shape[0] + 1)
        for i in range(1, 10)
    ]


def subtract_background(records) -> np.ndarray:
    """Corrected counts max(raw - background, 0), in record order.

    Clamping introduces a small positive bias where the signal is near zero;
    accepted so downstream normalization never sees negative counts.
    """
    return np.array(
        [max(float(r.raw_counts - r.background_counts), 0.0) for r in records], dtype=float
    )


def anticorrelation_alpha(n_trigger: int, n_t1: int, n_t2: int, n_t12: int) -> float:
    """Heralded anti-correlation parameter N_T N_T12 / (N_T1 N_T2).

    0 for an ideal single-photon source, 1 for coherent light, >1 for
    bunched light.
    """
    if n_t1 <= 0 or n_t2 <= 0:
        raise ValueError("heralded singles counts must be positive")
    if n_trigger <= 0:
        raise ValueError("trigger count must be positive")
    if n_t12 < 0:
        raise ValueError("triple coincidence count must be nonnegative")
    return (float(n_t12) * float(n_trigger)) / (float(n_t1) * float(n_t2))


def cross_correlation_g2(
    n_coinc: int, n_signal: int, n_trigger: int, window: float, duration: float
) -> float:
    """Normalized signal-trigger cross-correlation from windowed totals.

    g2 = (coincidence rate) / (signal rate * trigger rate * window); equals 1
    for independent streams and exceeds 2 for non-classical pair sources.
    """
    if n_signal <= 0 or n_trigger <= 0:
        raise ValueError("singles counts must be positive")
    if window <= 0 or duration <= 0:
        raise ValueError("window and duration must be positive")
    if n_coinc < 0:
        raise ValueError("coincidence count must be nonnegative")
    return (float(n_coinc) * float(duration)) / (float(n_signal) * float(n_trigger) * window)
