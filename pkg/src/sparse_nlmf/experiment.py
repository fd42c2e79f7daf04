"""Monte Carlo experiments comparing the NLMF family on random sparse channels."""

from __future__ import annotations

import dataclasses
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

import numpy as np

from .algorithms import (
    STEP_FUNCTIONS,
    AlgorithmKind,
    AlgorithmParams,
    DivergenceError,
    FilterState,
)
from .channel import (
    NoiseModel,
    SparseChannelSpec,
    generate_channel,
    generate_training_sequence,
    observe,
    regressor_matrix,
)
from .metrics import MsdTrace, TrialRecord, average_msd_trace

__all__ = [
    "DEFAULT_ALGORITHMS",
    "ExperimentConfig",
    "ExperimentResult",
    "lambda_default",
    "trial_rngs",
    "run_single_trial",
    "run_monte_carlo",
]

DEFAULT_ALGORITHMS: tuple[AlgorithmKind, ...] = (
    AlgorithmKind.NLMF,
    AlgorithmKind.ZA_NLMF,
    AlgorithmKind.RZA_NLMF,
    AlgorithmKind.RL1_NLMF,
)

# Sample tap: called as tap(kind, n, x, d) before each algorithm consumes sample n.
SampleTap = Callable[[AlgorithmKind, int, np.ndarray, float], None]


def lambda_default(sigma_n_sq: float, k: int, algorithm_kind: AlgorithmKind | str) -> float:
    """Default regularization weight.

    ``5 * 10**(3*sigma_n_sq - 5) / k`` for ZA and RZA, ``5 * 10**(3*sigma_n_sq - 8) / k``
    for RL1 and 0 for the unpenalized filters. The division by ``k`` applies to
    the value, not to the exponent.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if sigma_n_sq < 0:
        raise ValueError(f"noise variance must be >= 0, got {sigma_n_sq}")
    kind = AlgorithmKind.parse(algorithm_kind)
    if kind in (AlgorithmKind.ZA_NLMF, AlgorithmKind.RZA_NLMF):
        return 5.0 * 10.0 ** (3.0 * sigma_n_sq - 5.0) / k
    if kind is AlgorithmKind.RL1_NLMF:
        return 5.0 * 10.0 ** (3.0 * sigma_n_sq - 8.0) / k
    return 0.0


@dataclass(frozen=True)
class ExperimentConfig:
    fir_length: int = 16
    sparsity_k: int = 1
    snr_db: float = 10.0
    mu: float = 2.0
    iterations: int = 3000
    mc_runs: int = 100
    master_seed: int = 0
    algorithms: tuple[AlgorithmKind, ...] = DEFAULT_ALGORITHMS
    epsilon: float = 20.0
    delta: float = 0.05
    lambda_overrides: dict[AlgorithmKind, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        algorithms = tuple(AlgorithmKind.parse(a) for a in self.algorithms)
        if not algorithms:
            raise ValueError("at least one algorithm is required")
        if len(set(algorithms)) != len(algorithms):
            raise ValueError("algorithms must not repeat")
        object.__setattr__(self, "algorithms", algorithms)
        overrides = {AlgorithmKind.parse(k): float(v) for k, v in self.lambda_overrides.items()}
        object.__setattr__(self, "lambda_overrides", overrides)

        SparseChannelSpec(self.fir_length, self.sparsity_k)
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.mc_runs < 1:
            raise ValueError(f"mc_runs must be >= 1, got {self.mc_runs}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ValueError(f"invalid snr_db {self.snr_db}")
        for kind, value in overrides.items():
            if not value >= 0:
                raise ValueError(f"lambda override for {kind} must be >= 0, got {value}")
        # delegate the remaining range checks
        for kind in algorithms:
            self.params_for(kind)

    @property
    def noise(self) -> NoiseModel:
        return NoiseModel(self.snr_db)

    def lambda_for(self, kind: AlgorithmKind) -> float:
        if kind in self.lambda_overrides:
            return self.lambda_overrides[kind]
        return lambda_default(self.noise.variance, self.sparsity_k, kind)

    def params_for(self, kind: AlgorithmKind | str) -> AlgorithmParams:
        kind = AlgorithmKind.parse(kind)
        lam = self.lambda_for(kind)
        return AlgorithmParams(
            kind=kind,
            mu=self.mu,
            lambda_za=lam if kind is AlgorithmKind.ZA_NLMF else 0.0,
            lambda_rza=lam if kind is AlgorithmKind.RZA_NLMF else 0.0,
            lambda_rl1=lam if kind is AlgorithmKind.RL1_NLMF else 0.0,
            epsilon=self.epsilon,
            delta=self.delta,
        )

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["algorithms"] = [k.value for k in self.algorithms]
        d["lambda_overrides"] = {k.value: v for k, v in self.lambda_overrides.items()}
        return d

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        if "algorithms" in data:
            data["algorithms"] = tuple(data["algorithms"])
        if "snr_db" in data:
            data["snr_db"] = float(data["snr_db"])
        return cls(**data)

    def replace(self, **changes: Any) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    traces: dict[AlgorithmKind, MsdTrace]
    elapsed_seconds: float = 0.0
    workers: int = 1

    @property
    def divergence_counts(self) -> dict[AlgorithmKind, int]:
        return {k: t.diverged_count for k, t in self.traces.items()}

    def final_msd(self) -> dict[AlgorithmKind, float]:
        return {k: float(t.average_msd[-1]) for k, t in self.traces.items()}


def trial_rngs(master_seed: int, trial_index: int) -> tuple[np.random.Generator, ...]:
    """Independent (channel, training, noise) generators for one trial."""
    seq = np.random.SeedSequence([master_seed, trial_index])
    return tuple(np.random.default_rng(s) for s in seq.spawn(3))


def run_single_trial(
    config: ExperimentConfig, trial_index: int, tap: SampleTap | None = None
) -> list[TrialRecord]:
    """Run every configured algorithm over one shared channel/training/noise draw."""
    if not 0 <= trial_index < config.mc_runs:
        raise ValueError(f"trial_index {trial_index} outside [0, {config.mc_runs})")
    channel_rng, training_rng, noise_rng = trial_rngs(config.master_seed, trial_index)
    fir, iterations = config.fir_length, config.iterations

    channel = generate_channel(SparseChannelSpec(fir, config.sparsity_k), channel_rng)
    training = generate_training_sequence(iterations + fir, training_rng)
    regressors = regressor_matrix(training, fir, iterations)
    noise = config.noise
    h = channel.coefficients

    kinds = config.algorithms
    params = [config.params_for(k) for k in kinds]
    steps = [STEP_FUNCTIONS[k] for k in kinds]
    states = [FilterState.zeros(fir) for _ in kinds]
    traces = [np.full(iterations, np.nan) for _ in kinds]
    alive = [True] * len(kinds)

    # a finite but huge estimate may overflow when squared; inf is the right value
    with np.errstate(over="ignore"):
        for n in range(iterations):
            x = regressors[n]
            d = observe(channel, x, noise, noise_rng)
            for i in range(len(kinds)):
                if not alive[i]:
                    continue
                diff = states[i].estimate - h
                traces[i][n] = diff @ diff
                if tap is not None:
                    tap(kinds[i], n, x, d)
                try:
                    states[i] = steps[i](states[i], x, d, params[i])
                except DivergenceError:
                    alive[i] = False

    return [
        TrialRecord(kind.value, trial_index, trace, diverged=not ok)
        for kind, trace, ok in zip(kinds, traces, alive)
    ]


def _iter_trials(config: ExperimentConfig, workers: int) -> Iterable[list[TrialRecord]]:
    indices = range(config.mc_runs)
    if workers <= 1:
        return map(run_single_trial, [config] * config.mc_runs, indices)
    chunk = max(1, config.mc_runs // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_single_trial, [config] * config.mc_runs, indices, chunksize=chunk))


def run_monte_carlo(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run ``config.mc_runs`` trials and average each algorithm's squared deviation.

    The result depends only on ``config``; ``workers`` changes wall-clock time,
    never the numbers.
    """
    started = time.perf_counter()
    by_kind: dict[AlgorithmKind, list[TrialRecord]] = {k: [] for k in config.algorithms}
    for records in _iter_trials(config, workers):
        for record in records:
            by_kind[AlgorithmKind.parse(record.algorithm_kind)].append(record)
    traces = {k: average_msd_trace(recs) for k, recs in by_kind.items()}
    return ExperimentResult(config, traces, time.perf_counter() - started, max(1, workers))
