"""Sparse-penalty strength functions for ZA, RZA and RL1.

Each function returns the per-coefficient pull toward zero (before scaling
by the step-size and regularization weight) exerted by one penalty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PenaltyPoint",
    "zeta_za",
    "zeta_rza",
    "zeta_rl1",
    "default_grid",
    "penalty_table",
]


@dataclass(frozen=True)
class PenaltyPoint:
    coefficient: float
    zeta_za: float
    zeta_rza: float
    zeta_rl1: float

    @property
    def in_range(self) -> bool:
        return -1.0 <= self.coefficient <= 1.0


def _sgn(h: float) -> float:
    return float((h > 0) - (h < 0))


def zeta_za(h: float) -> float:
    return _sgn(h)


def zeta_rza(h: float, epsilon: float = 20.0) -> float:
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return _sgn(h) / (1.0 + epsilon * abs(h))


def zeta_rl1(h: float, delta: float = 0.05) -> float:
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return _sgn(h) / (delta + abs(h))


def default_grid(points: int = 401) -> list[float]:
    """Evenly spaced points on [-1, 1], exactly symmetric about zero.

    Computed as ``(2i - (points - 1)) / (points - 1)`` so that, for example,
    0.05 lands exactly on the default 401-point grid.
    """
    if points < 2:
        raise ValueError(f"grid needs at least 2 points, got {points}")
    m = points - 1
    return [(2 * i - m) / m for i in range(points)]


def penalty_table(
    grid: list[float] | np.ndarray, epsilon: float = 20.0, delta: float = 0.05
) -> list[PenaltyPoint]:
    """Evaluate all three penalties on ``grid``.

    Points outside [-1, 1] are evaluated anyway; check ``PenaltyPoint.in_range``.
    """
    grid = [float(h) for h in grid]
    if not grid:
        raise ValueError("grid must be nonempty")
    return [
        PenaltyPoint(h, zeta_za(h), zeta_rza(h, epsilon), zeta_rl1(h, delta)) for h in grid
    ]
