"""Fourth-order-error adaptive filters with sparsity-promoting penalties.

All update rules share the signature ``step(state, x, d, params)`` and return
a fresh :class:`FilterState`; the input state is never mutated.

The normalized rules (NLMF and its sparse variants) take the form::

    h(n+1) = h(n) + mu_N * e(n) * x(n) / ||x(n)||^2 - penalty(h(n), h(n-1))

with ``mu_N = mu * e^2 / (||x||^2 + e^2)``. The penalty is

* ZA-NLMF:  ``gamma * sgn(h)``,                    ``gamma = mu * lambda_za``
* RZA-NLMF: ``rho * sgn(h) / (1 + eps * |h|)``,    ``rho = mu * lambda_rza * eps``
* RL1-NLMF: ``rho_rl1 * sgn(h) / (delta + |h_prev|)``, ``rho_rl1 = mu * lambda_rl1``
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "AlgorithmKind",
    "AlgorithmParams",
    "FilterState",
    "DivergenceError",
    "sign",
    "variable_step",
    "reweight_vector",
    "lmf_step",
    "nlmf_step",
    "za_nlmf_step",
    "rza_nlmf_step",
    "rl1_nlmf_step",
    "step",
    "lmf_cost",
    "za_cost",
    "rza_cost",
    "descent_direction",
]


class AlgorithmKind(str, enum.Enum):
    LMF = "LMF"
    NLMF = "NLMF"
    ZA_NLMF = "ZA_NLMF"
    RZA_NLMF = "RZA_NLMF"
    RL1_NLMF = "RL1_NLMF"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, name: str | "AlgorithmKind") -> "AlgorithmKind":
        """Accept ``"RL1_NLMF"``, ``"rl1-nlmf"``, ``"rl1"`` and similar spellings."""
        if isinstance(name, cls):
            return name
        key = str(name).strip().upper().replace("-", "_")
        if key in cls.__members__:
            return cls[key]
        if key + "_NLMF" in cls.__members__:
            return cls[key + "_NLMF"]
        raise ValueError(f"unknown algorithm {name!r}; choose from {[k.value for k in cls]}")


class DivergenceError(ArithmeticError):
    """An update produced non-finite coefficients."""

    def __init__(self, kind: AlgorithmKind, iteration: int) -> None:
        super().__init__(f"{kind} diverged at iteration {iteration}")
        self.kind = kind
        self.iteration = iteration


@dataclass(frozen=True)
class AlgorithmParams:
    kind: AlgorithmKind
    mu: float
    lambda_za: float = 0.0
    lambda_rza: float = 0.0
    lambda_rl1: float = 0.0
    epsilon: float = 20.0
    delta: float = 0.05

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", AlgorithmKind.parse(self.kind))
        if not self.mu >= 0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        if not (self.epsilon > 0 and self.delta > 0):
            raise ValueError("epsilon and delta must be positive")
        for name in ("lambda_za", "lambda_rza", "lambda_rl1"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")

    @property
    def gamma(self) -> float:
        return self.mu * self.lambda_za

    @property
    def rho(self) -> float:
        return self.mu * self.lambda_rza * self.epsilon

    @property
    def rho_rl1(self) -> float:
        return self.mu * self.lambda_rl1


@dataclass(frozen=True)
class FilterState:
    """Current estimate ``h(n)``, the one before it ``h(n-1)``, and ``n``."""

    estimate: np.ndarray
    previous_estimate: np.ndarray
    iteration: int = 0

    def __post_init__(self) -> None:
        if self.estimate.shape != self.previous_estimate.shape:
            raise ValueError("estimate and previous_estimate must have the same shape")

    @classmethod
    def zeros(cls, fir_length: int) -> "FilterState":
        return cls(np.zeros(fir_length), np.zeros(fir_length), 0)


def sign(v):
    """Three-valued sign: +1, 0 or -1. Elementwise on arrays."""
    if isinstance(v, np.ndarray):
        return np.sign(v)
    return float((v > 0) - (v < 0))


def variable_step(mu: float, error: float, regressor_energy: float) -> float:
    """Data-dependent NLMF step ``mu * e^2 / (||x||^2 + e^2)``; 0 when both vanish."""
    if regressor_energy < 0:
        raise ValueError(f"regressor energy must be >= 0, got {regressor_energy}")
    e2 = error * error
    denom = regressor_energy + e2
    if denom == 0.0:
        return 0.0
    return mu * e2 / denom


def reweight_vector(previous_estimate: np.ndarray, delta: float) -> np.ndarray:
    """RL1 weights ``1 / (delta + |h_i(n-1)|)``."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return 1.0 / (delta + np.abs(previous_estimate))


def _check_length(state: FilterState, x: np.ndarray) -> None:
    if x.shape != state.estimate.shape:
        raise ValueError(
            f"regressor length {x.shape[0]} does not match filter length {state.estimate.shape[0]}"
        )


def _advance(state: FilterState, new: np.ndarray, kind: AlgorithmKind) -> FilterState:
    if not np.isfinite(new).all():
        raise DivergenceError(kind, state.iteration)
    return FilterState(new, state.estimate, state.iteration + 1)


def _normalized_update(state: FilterState, x: np.ndarray, d: float, mu: float) -> np.ndarray:
    # zero-energy regressor: gradient term is undefined and skipped
    _check_length(state, x)
    h = state.estimate
    energy = float(x @ x)
    if energy == 0.0:
        return h.copy()
    e = d - float(h @ x)
    mu_n = variable_step(mu, e, energy)
    return h + (mu_n * e / energy) * x


def lmf_step(state: FilterState, x: np.ndarray, d: float, params: AlgorithmParams) -> FilterState:
    """Plain LMF update ``h + mu * e^3 * x``. Unstable for large inputs or errors."""
    _check_length(state, x)
    h = state.estimate
    with np.errstate(over="ignore", invalid="ignore"):
        e = np.float64(d) - h @ x
        new = h + (params.mu * e**3) * x
    return _advance(state, new, AlgorithmKind.LMF)


def nlmf_step(state: FilterState, x: np.ndarray, d: float, params: AlgorithmParams) -> FilterState:
    new = _normalized_update(state, x, d, params.mu)
    return _advance(state, new, AlgorithmKind.NLMF)


def za_nlmf_step(state: FilterState, x: np.ndarray, d: float, params: AlgorithmParams) -> FilterState:
    new = _normalized_update(state, x, d, params.mu)
    gamma = params.gamma
    if gamma:
        new -= gamma * np.sign(state.estimate)
    return _advance(state, new, AlgorithmKind.ZA_NLMF)


def rza_nlmf_step(state: FilterState, x: np.ndarray, d: float, params: AlgorithmParams) -> FilterState:
    new = _normalized_update(state, x, d, params.mu)
    rho = params.rho
    if rho:
        h = state.estimate
        new -= rho * np.sign(h) / (1.0 + params.epsilon * np.abs(h))
    return _advance(state, new, AlgorithmKind.RZA_NLMF)


def rl1_nlmf_step(state: FilterState, x: np.ndarray, d: float, params: AlgorithmParams) -> FilterState:
    """RL1-NLMF update, reweighted by the estimate from the previous iteration.

    ``sgn(f^T h) = sgn(h)`` because every weight is positive, so the penalty
    reduces to ``rho_rl1 * sgn(h(n)) / (delta + |h(n-1)|)``.
    """
    new = _normalized_update(state, x, d, params.mu)
    rho = params.rho_rl1
    if rho:
        new -= rho * np.sign(state.estimate) / (params.delta + np.abs(state.previous_estimate))
    return _advance(state, new, AlgorithmKind.RL1_NLMF)


StepFunction = Callable[[FilterState, np.ndarray, float, AlgorithmParams], FilterState]

STEP_FUNCTIONS: dict[AlgorithmKind, StepFunction] = {
    AlgorithmKind.LMF: lmf_step,
    AlgorithmKind.NLMF: nlmf_step,
    AlgorithmKind.ZA_NLMF: za_nlmf_step,
    AlgorithmKind.RZA_NLMF: rza_nlmf_step,
    AlgorithmKind.RL1_NLMF: rl1_nlmf_step,
}


def step(state: FilterState, x: np.ndarray, d: float, params: AlgorithmParams) -> FilterState:
    """Dispatch to the update rule selected by ``params.kind``."""
    return STEP_FUNCTIONS[params.kind](state, x, d, params)


# Instantaneous costs, used for gradient checks.


def lmf_cost(estimate: np.ndarray, x: np.ndarray, d: float) -> float:
    e = d - float(estimate @ x)
    return 0.25 * e**4


def za_cost(estimate: np.ndarray, x: np.ndarray, d: float, lambda_za: float) -> float:
    return lmf_cost(estimate, x, d) + lambda_za * float(np.abs(estimate).sum())


def rza_cost(
    estimate: np.ndarray, x: np.ndarray, d: float, lambda_rza: float, epsilon: float
) -> float:
    return lmf_cost(estimate, x, d) + lambda_rza * float(
        np.log1p(epsilon * np.abs(estimate)).sum()
    )


def descent_direction(estimate: np.ndarray, x: np.ndarray, d: float, params: AlgorithmParams) -> np.ndarray:
    """Unnormalized update ``mu * e^3 * x - penalty`` for the ZA and RZA rules.

    This is ``-mu`` times the gradient of :func:`za_cost` or :func:`rza_cost`
    wherever no coefficient is exactly zero.
    """
    e = d - float(estimate @ x)
    direction = params.mu * e**3 * x
    s = np.sign(estimate)
    if params.kind is AlgorithmKind.ZA_NLMF:
        return direction - params.gamma * s
    if params.kind is AlgorithmKind.RZA_NLMF:
        return direction - params.rho * s / (1.0 + params.epsilon * np.abs(estimate))
    if params.kind in (AlgorithmKind.LMF, AlgorithmKind.NLMF):
        return direction
    raise ValueError(f"no closed-form cost for {params.kind}")
