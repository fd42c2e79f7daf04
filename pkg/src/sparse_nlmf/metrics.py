"""Squared deviation and Monte Carlo averaged MSD."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["TrialRecord", "MsdTrace", "squared_deviation", "average_msd_trace", "to_db"]


@dataclass
class TrialRecord:
    """Per-iteration ``||h_hat(n) - h||^2`` for one algorithm in one trial.

    Entry ``n`` is measured on the estimate *before* sample ``n`` is used, so
    entry 0 is the deviation of the initial estimate. A diverged record holds
    NaN from the failing iteration on.
    """

    algorithm_kind: str
    trial_index: int
    squared_deviation: np.ndarray
    diverged: bool = False


@dataclass
class MsdTrace:
    algorithm_kind: str
    average_msd: np.ndarray
    mc_count: int
    diverged_count: int = 0

    @property
    def average_msd_db(self) -> np.ndarray:
        return to_db(self.average_msd)


def squared_deviation(estimate: np.ndarray, truth: np.ndarray) -> float:
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimate.shape != truth.shape:
        raise ValueError(f"shape mismatch: {estimate.shape} vs {truth.shape}")
    diff = estimate - truth
    return float(diff @ diff)


def to_db(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(values)


def average_msd_trace(records: list[TrialRecord]) -> MsdTrace:
    """Pointwise mean over non-diverged trials.

    Diverged trials are left out and counted in ``diverged_count``. If every
    trial diverged the trace is all-NaN with ``mc_count == 0``.
    """
    if not records:
        raise ValueError("need at least one trial record")
    kinds = {r.algorithm_kind for r in records}
    if len(kinds) != 1:
        raise ValueError(f"records mix algorithms: {sorted(kinds)}")
    lengths = {r.squared_deviation.shape[0] for r in records}
    if len(lengths) != 1:
        raise ValueError(f"records have different lengths: {sorted(lengths)}")

    kept = [r for r in sorted(records, key=lambda r: r.trial_index) if not r.diverged]
    diverged = len(records) - len(kept)
    if not kept:
        return MsdTrace(kinds.pop(), np.full(lengths.pop(), np.nan), 0, diverged)
    stacked = np.stack([r.squared_deviation for r in kept])
    return MsdTrace(kinds.pop(), stacked.mean(axis=0), len(kept), diverged)
