"""Adam iteration over the projection matrix.

Per step, with gradient g at the current point:

    m_t = beta1 * m_{t-1} + (1 - beta1) * g
    v_t = beta2 * v_{t-1} + (1 - beta2) * g^2
    m_hat = m_t / (1 - beta1^t)
    v_hat = v_t / (1 - beta2^t)
    P_t = P_{t-1} - alpha * m_hat / (sqrt(v_hat) + epsilon)

all elementwise. The loop stops when the absolute loss change between
consecutive iterations drops below ``tol``, or at ``max_iter`` (reported
as converged=False, not an error).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DataMatrix, ProjectionMatrix
from .errors import DimensionError, NonFiniteGradient
from .graphs import ContrastiveGraphPair
from .objective import ObjectiveEvaluator


@dataclass(frozen=True)
class AdamHyperparams:
    alpha: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    max_iter: int = 1000
    tol: float = 0.001

    def __post_init__(self) -> None:
        if not (self.alpha > 0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (0 < self.beta1 < 1):
            raise ValueError(f"beta1 must lie in (0, 1), got {self.beta1}")
        if not (0 < self.beta2 < 1):
            raise ValueError(f"beta2 must lie in (0, 1), got {self.beta2}")
        if not (self.epsilon > 0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not (self.tol > 0):
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class AdamState:
    """First/second moment estimates and the step counter."""

    m: np.ndarray
    v: np.ndarray
    t: int

    def __post_init__(self) -> None:
        m = np.array(self.m, dtype=np.float64)
        v = np.array(self.v, dtype=np.float64)
        if m.shape != v.shape:
            raise DimensionError(f"moment shapes differ: {m.shape} vs {v.shape}")
        if np.any(v < 0):
            raise ValueError("second-moment estimate must be nonnegative")
        if self.t < 0:
            raise ValueError(f"step counter must be >= 0, got {self.t}")
        m.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "v", v)

    @staticmethod
    def zeros(D: int, d: int) -> "AdamState":
        return AdamState(np.zeros((D, d)), np.zeros((D, d)), 0)


@dataclass(frozen=True)
class FitResult:
    """Converged projection plus the trace that produced it.

    ``loss_trace`` has one entry per iteration plus the initial loss, so
    its length is iterations + 1.
    """

    projection: ProjectionMatrix
    loss_trace: tuple[float, ...]
    iterations: int
    converged: bool
    sigma: float
    hyperparams: AdamHyperparams


def adam_step(
    state: AdamState,
    P: ProjectionMatrix,
    grad: np.ndarray,
    h: AdamHyperparams,
) -> tuple[AdamState, ProjectionMatrix]:
    """One Adam update; pure function of (state, P, grad, h)."""
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != P.values.shape:
        raise DimensionError(
            f"gradient shape {grad.shape} does not match projection {P.values.shape}"
        )
    if not np.all(np.isfinite(grad)):
        raise NonFiniteGradient("gradient contains non-finite entries")

    t = state.t + 1
    m = h.beta1 * state.m + (1.0 - h.beta1) * grad
    v = h.beta2 * state.v + (1.0 - h.beta2) * grad * grad
    m_hat = m / (1.0 - h.beta1**t)
    v_hat = v / (1.0 - h.beta2**t)
    new_values = P.values - h.alpha * m_hat / (np.sqrt(v_hat) + h.epsilon)
    return AdamState(m, v, t), ProjectionMatrix(new_values)


def fit(
    X: DataMatrix,
    g: ContrastiveGraphPair,
    sigma: float,
    h: AdamHyperparams,
    P0: ProjectionMatrix,
) -> FitResult:
    """Minimize the contrastive loss from P0 with Adam.

    The gradient is evaluated at the pre-step point; the loss once per
    iteration after the step (plus once up front for L(P0)). Deterministic
    for identical inputs. Hitting max_iter is reported, not raised.
    """
    evaluator = ObjectiveEvaluator(X, g, sigma)
    trace = [evaluator.loss(P0.values)]
    P = P0
    state = AdamState.zeros(P0.feature_count, P0.embed_dim)
    converged = False
    iterations = 0

    for step in range(1, h.max_iter + 1):
        _, grad = evaluator.loss_and_gradient(P.values)
        state, P = adam_step(state, P, grad, h)
        trace.append(evaluator.loss(P.values))
        iterations = step
        if abs(trace[-1] - trace[-2]) < h.tol:
            converged = True
            break

    return FitResult(P, tuple(trace), iterations, converged, sigma, h)
