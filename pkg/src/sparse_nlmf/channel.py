"""Sparse FIR channel generation, binary training sequences and noisy observations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SparseChannelSpec",
    "ChannelRealization",
    "TrainingSequence",
    "NoiseModel",
    "generate_channel",
    "generate_training_sequence",
    "regressor_at",
    "regressor_matrix",
    "observe",
]


@dataclass(frozen=True)
class SparseChannelSpec:
    """Shape of a K-sparse FIR channel.

    Nonzero taps are drawn with variance ``1 / sparsity_k`` so that the
    expected squared norm of a realization is one.
    """

    fir_length: int
    sparsity_k: int

    def __post_init__(self) -> None:
        if self.fir_length < 1:
            raise ValueError(f"fir_length must be >= 1, got {self.fir_length}")
        if not 1 <= self.sparsity_k <= self.fir_length:
            raise ValueError(
                f"sparsity_k must lie in [1, {self.fir_length}], got {self.sparsity_k}"
            )

    @property
    def tap_variance(self) -> float:
        return 1.0 / self.sparsity_k


@dataclass(frozen=True)
class ChannelRealization:
    coefficients: np.ndarray
    support: tuple[int, ...]

    @property
    def fir_length(self) -> int:
        return self.coefficients.shape[0]


@dataclass(frozen=True)
class TrainingSequence:
    """Equiprobable +/-1 training symbols (unit power)."""

    symbols: np.ndarray

    def __len__(self) -> int:
        return self.symbols.shape[0]


@dataclass(frozen=True)
class NoiseModel:
    """AWGN at a given SNR under unit transmit power."""

    snr_db: float

    @property
    def variance(self) -> float:
        if math.isinf(self.snr_db) and self.snr_db > 0:
            return 0.0
        return 10.0 ** (-self.snr_db / 10.0)

    @classmethod
    def from_variance(cls, variance: float) -> "NoiseModel":
        if variance < 0:
            raise ValueError(f"noise variance must be >= 0, got {variance}")
        if variance == 0:
            return cls(math.inf)
        return cls(-10.0 * math.log10(variance))


def generate_channel(spec: SparseChannelSpec, rng: np.random.Generator) -> ChannelRealization:
    """Draw a channel with ``spec.sparsity_k`` Gaussian taps at random positions."""
    support = np.sort(rng.choice(spec.fir_length, size=spec.sparsity_k, replace=False))
    coefficients = np.zeros(spec.fir_length)
    coefficients[support] = rng.normal(0.0, math.sqrt(spec.tap_variance), spec.sparsity_k)
    return ChannelRealization(coefficients, tuple(int(i) for i in support))


def generate_training_sequence(length: int, rng: np.random.Generator) -> TrainingSequence:
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    symbols = np.where(rng.integers(0, 2, size=length) == 1, 1.0, -1.0)
    return TrainingSequence(symbols)


def regressor_at(seq: TrainingSequence, n: int, fir_length: int) -> np.ndarray:
    """Return ``[s(n), s(n-1), ..., s(n-fir_length+1)]``, zero before the first symbol."""
    if not 0 <= n < len(seq):
        raise IndexError(f"iteration {n} outside sequence of length {len(seq)}")
    if fir_length < 1:
        raise ValueError(f"fir_length must be >= 1, got {fir_length}")
    x = np.zeros(fir_length)
    window = seq.symbols[max(0, n - fir_length + 1) : n + 1][::-1]
    x[: window.shape[0]] = window
    return x


def regressor_matrix(seq: TrainingSequence, fir_length: int, count: int | None = None) -> np.ndarray:
    """Stack ``regressor_at(seq, n, fir_length)`` for ``n < count`` as rows."""
    count = len(seq) if count is None else count
    if not 0 <= count <= len(seq):
        raise IndexError(f"count {count} outside sequence of length {len(seq)}")
    padded = np.concatenate([np.zeros(fir_length - 1), seq.symbols[:count]])
    windows = np.lib.stride_tricks.sliding_window_view(padded, fir_length)
    return np.ascontiguousarray(windows[:, ::-1])


def observe(
    channel: ChannelRealization,
    x: np.ndarray,
    noise: NoiseModel,
    rng: np.random.Generator,
) -> float:
    """Noisy channel output ``h^T x + z``.

    No random number is consumed when the noise variance is zero.
    """
    if x.shape != channel.coefficients.shape:
        raise ValueError(
            f"regressor length {x.shape[0]} does not match channel length {channel.fir_length}"
        )
    d = float(channel.coefficients @ x)
    variance = noise.variance
    if variance > 0:
        d += rng.normal(0.0, math.sqrt(variance))
    return d
