"""Sparse adaptive channel estimation with the normalized least-mean-fourth family."""

from .algorithms import (
    AlgorithmKind,
    AlgorithmParams,
    DivergenceError,
    FilterState,
    step,
)
from .channel import NoiseModel, SparseChannelSpec
from .experiment import ExperimentConfig, ExperimentResult, run_monte_carlo, run_single_trial
from .metrics import MsdTrace, TrialRecord, average_msd_trace, squared_deviation

__version__ = "0.1.0"

__all__ = [
    "AlgorithmKind",
    "AlgorithmParams",
    "DivergenceError",
    "ExperimentConfig",
    "ExperimentResult",
    "FilterState",
    "MsdTrace",
    "NoiseModel",
    "SparseChannelSpec",
    "TrialRecord",
    "average_msd_trace",
    "run_monte_carlo",
    "run_single_trial",
    "squared_deviation",
    "step",
]
