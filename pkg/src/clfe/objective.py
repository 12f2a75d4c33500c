"""Contrastive loss over a graph pair, with its analytic gradient.

The loss for projection P is

    L(P) = sum_i -log( sum_j s_pos[i,j] exp(SIM_ij)
                       / sum_j (s_pos + s_neg)[i,j] exp(SIM_ij) )

where SIM_ij is the cosine similarity of the embedded samples divided by
the temperature sigma. Each row ratio lies in (0, 1], so L >= 0.

Rows are reduced with a max-shift (log-sum-exp) so small temperatures stay
finite; exponentials exist only on graph supports (off-support entries are
forced to exactly zero through an additive -inf mask). The analytic
gradient is the chain-rule differential of the loss; a central
finite-difference oracle is provided as the independent check.

``ObjectiveEvaluator`` caches the graph constants and scratch buffers so
iterative callers pay no per-call allocation; the plain functions wrap it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DataMatrix, ProjectionMatrix
from .errors import (
    DimensionError,
    EmptyPositiveRow,
    NonFiniteGradient,
    ZeroEmbeddingNorm,
)
from .graphs import ContrastiveGraphPair

# Embedded norms at or below this are treated as degenerate. A hard error
# beats silent regularization, which would corrupt gradient checks.
NORM_FLOOR = 1e-12

FD_DEFAULT_STEP = 1e-5


@dataclass(frozen=True)
class ObjectiveParams:
    """Loss temperature; must be positive."""

    sigma: float

    def __post_init__(self) -> None:
        if not (self.sigma > 0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")


def sim(
    P: ProjectionMatrix, x_i: np.ndarray, x_j: np.ndarray, sigma: float
) -> float:
    """Temperature-scaled cosine similarity of two embedded samples.

    Returns a value in [-1/sigma, 1/sigma].
    """
    ObjectiveParams(sigma)
    z_i = P.values.T @ np.asarray(x_i, dtype=np.float64)
    z_j = P.values.T @ np.asarray(x_j, dtype=np.float64)
    n_i = np.linalg.norm(z_i)
    n_j = np.linalg.norm(z_j)
    if n_i <= NORM_FLOOR or n_j <= NORM_FLOOR:
        raise ZeroEmbeddingNorm(
            f"embedded norm below {NORM_FLOOR}; degenerate projection or zero sample"
        )
    return float(z_i @ z_j / (n_i * n_j * sigma))


class ObjectiveEvaluator:
    """Loss/gradient evaluator bound to one (X, graph, sigma) triple.

    Holds the per-graph constants and reusable n x n scratch buffers, so
    repeated evaluations (optimizer loops, finite differences) allocate
    nothing per call. Instances are cheap but NOT safe for concurrent use;
    give each worker its own.
    """

    def __init__(self, X, g, sigma: float):
        ObjectiveParams(sigma)
        X_values = X.values if isinstance(X, DataMatrix) else np.asarray(X, float)
        s_pos, s_neg = (g.s_pos, g.s_neg) if isinstance(g, ContrastiveGraphPair) else g
        n = s_pos.shape[0]
        if X_values.shape[1] != n:
            raise DimensionError(
                f"graph is over {n} samples, data has {X_values.shape[1]}"
            )
        if not np.all(np.any(s_pos > 0, axis=1)):
            row = int(np.argmin(np.any(s_pos > 0, axis=1)))
            raise EmptyPositiveRow(f"sample {row} has no positive pair")

        self.X = X_values
        self.sigma = float(sigma)
        self.s_pos = s_pos
        self.s_who = s_pos + s_neg
        # additive support mask: 0 on the union support, -inf elsewhere, so
        # masked similarities exponentiate to exactly zero off support
        self.inf_mask = np.where(self.s_who > 0, 0.0, -np.inf)
        self._sim = np.empty((n, n))
        self._arg = np.empty((n, n))
        self._a = np.empty((n, n))
        self._b = np.empty((n, n))

    def _embed(self, P_values: np.ndarray):
        if P_values.shape[0] != self.X.shape[0]:
            raise DimensionError(
                f"projection expects {P_values.shape[0]} features, "
                f"data has {self.X.shape[0]}"
            )
        Y = P_values.T @ self.X
        norms = np.linalg.norm(Y, axis=0)
        if np.any(norms <= NORM_FLOOR):
            bad = int(np.argmax(norms <= NORM_FLOOR))
            raise ZeroEmbeddingNorm(f"embedded sample {bad} has norm <= {NORM_FLOOR}")
        return Y, norms

    def _row_sums(self, P_values: np.ndarray):
        """Fill the scratch buffers; return (Y, norms, num, den)."""
        Y, norms = self._embed(P_values)
        Yh = Y / norms
        np.matmul(Yh.T, Yh, out=self._sim)
        self._sim /= self.sigma

        np.add(self._sim, self.inf_mask, out=self._arg)
        shift = self._arg.max(axis=1)
        self._arg -= shift[:, None]
        np.exp(self._arg, out=self._arg)  # zero off support, (0,1] on it

        np.multiply(self.s_pos, self._arg, out=self._a)
        np.multiply(self.s_who, self._arg, out=self._b)
        num = self._a.sum(axis=1)
        den = self._b.sum(axis=1)
        return Y, norms, num, den

    def loss(self, P_values: np.ndarray) -> float:
        _, _, num, den = self._row_sums(P_values)
        with np.errstate(divide="ignore"):
            return float((np.log(den) - np.log(num)).sum())

    def loss_and_gradient(self, P_values: np.ndarray):
        Y, norms, num, den = self._row_sums(P_values)
        with np.errstate(divide="ignore"):
            total = float((np.log(den) - np.log(num)).sum())

        # dL/dSIM_ij: softmax weight over the whole graph minus the same
        # over the positive graph (rows with no negatives cancel exactly)
        with np.errstate(divide="ignore", invalid="ignore"):
            self._b /= den[:, None]
            self._a /= num[:, None]
        self._b -= self._a
        coeff = self._b

        # dSIM_ij/dP = (x_i y_j^T + x_j y_i^T)/(sigma p_i p_j)
        #              - SIM_ij (x_i y_i^T / p_i^2 + x_j y_j^T / p_j^2)
        # summed against coeff this collapses to X K Y^T
        rho = np.einsum("ij,ij->i", coeff, self._sim)
        gam = np.einsum("ij,ij->j", coeff, self._sim)
        inv = 1.0 / norms
        coeff *= inv[:, None]
        coeff *= inv[None, :]
        coeff /= self.sigma  # coeff buffer now holds W
        K = np.add(coeff, coeff.T, out=self._a)
        K[np.diag_indices_from(K)] -= (rho + gam) * inv * inv
        grad = self.X @ (K @ Y.T)

        if not np.all(np.isfinite(grad)):
            raise NonFiniteGradient("gradient contains non-finite entries")
        return total, grad


def loss(
    P: ProjectionMatrix, X: DataMatrix, g: ContrastiveGraphPair, sigma: float
) -> float:
    """Evaluate the contrastive loss L(P) >= 0."""
    return ObjectiveEvaluator(X, g, sigma).loss(P.values)


def loss_and_gradient(
    P: ProjectionMatrix, X: DataMatrix, g: ContrastiveGraphPair, sigma: float
) -> tuple[float, np.ndarray]:
    """One fused pass producing (L(P), dL/dP); shares the exp terms."""
    return ObjectiveEvaluator(X, g, sigma).loss_and_gradient(P.values)


def gradient(
    P: ProjectionMatrix, X: DataMatrix, g: ContrastiveGraphPair, sigma: float
) -> np.ndarray:
    """Analytic gradient dL/dP, shaped like P."""
    return loss_and_gradient(P, X, g, sigma)[1]


def finite_diff_gradient(
    P: ProjectionMatrix,
    X: DataMatrix,
    g: ContrastiveGraphPair,
    sigma: float,
    h: float = FD_DEFAULT_STEP,
) -> np.ndarray:
    """Central finite differences of the loss over every entry of P.

    Verification oracle; O(D*d) loss evaluations, so keep instances small.
    """
    if not (h > 0):
        raise ValueError(f"step h must be positive, got {h}")
    evaluator = ObjectiveEvaluator(X, g, sigma)
    base = P.values
    out = np.empty_like(base)
    for a in range(base.shape[0]):
        for b in range(base.shape[1]):
            plus = base.copy()
            minus = base.copy()
            plus[a, b] += h
            minus[a, b] -= h
            out[a, b] = (evaluator.loss(plus) - evaluator.loss(minus)) / (2.0 * h)
    return out


def gradient_disagreement(analytic: np.ndarray, reference: np.ndarray) -> float:
    """Max elementwise relative difference, denominator floored at 1e-8."""
    denom = np.maximum(np.abs(reference), 1e-8)
    return float(np.max(np.abs(analytic - reference) / denom))
