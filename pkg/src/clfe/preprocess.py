"""PCA pre-reduction and per-feature standardization.

Both are strict fit/apply pairs: fit on the training split only, then
apply to anything, so test folds never leak into the fitted statistics.
The pipeline order is PCA first, then standardization of the reduced
features.

Conventions fixed for determinism:
* variances and the covariance use the population denominator n;
* each principal component's largest-magnitude entry is positive
  (ties resolved by the lowest feature index);
* constant features standardize to exactly zero (std replaced by 1,
  mean pinned to the constant itself).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DataMatrix, as_values
from .errors import DimensionError


@dataclass(frozen=True)
class PcaModel:
    """Mean, principal directions (columns, descending eigenvalue order),
    and the matching covariance eigenvalues."""

    mean: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray

    def __post_init__(self) -> None:
        for arr in (self.mean, self.components, self.eigenvalues):
            arr.setflags(write=False)

    @property
    def input_features(self) -> int:
        return self.components.shape[0]

    @property
    def output_features(self) -> int:
        return self.components.shape[1]


@dataclass(frozen=True)
class StandardizeModel:
    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self) -> None:
        self.mean.setflags(write=False)
        self.std.setflags(write=False)


def _fix_sign(components: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-magnitude entry of each is positive."""
    anchor = np.argmax(np.abs(components), axis=0)
    signs = np.sign(components[anchor, np.arange(components.shape[1])])
    signs[signs == 0] = 1.0
    return components * signs


def pca_fit(X: DataMatrix, d_pca: int) -> PcaModel:
    """Eigendecomposition of the mean-centered covariance.

    Uses the D x D covariance when D <= n, otherwise the n x n Gram trick
    (equivalent, cheaper). The Gram route cannot produce directions beyond
    the numerical rank of the centered data and raises if asked to.
    """
    values = X.values
    D, n = values.shape
    if not (1 <= d_pca <= min(D, n - 1)):
        raise DimensionError(
            f"need 1 <= d_pca <= min(D, n-1) = {min(D, n - 1)}, got {d_pca}"
        )
    mean = values.mean(axis=1)
    centered = values - mean[:, None]

    if D <= n:
        cov = (centered @ centered.T) / n
        eigvals, eigvecs = np.linalg.eigh(cov)
        order = np.argsort(eigvals)[::-1][:d_pca]
        eigvals = eigvals[order]
        components = eigvecs[:, order]
    else:
        gram = (centered.T @ centered) / n
        eigvals, eigvecs = np.linalg.eigh(gram)
        order = np.argsort(eigvals)[::-1][:d_pca]
        eigvals = eigvals[order]
        scale = float(max(eigvals[0], 0.0))
        if np.any(eigvals <= 1e-12 * max(scale, 1.0)):
            raise DimensionError(
                f"centered data has numerical rank below d_pca={d_pca}"
            )
        components = (centered @ eigvecs[:, order]) / np.sqrt(n * eigvals)

    return PcaModel(mean, _fix_sign(components), eigvals)


def pca_transform(model: PcaModel, X: "DataMatrix | np.ndarray") -> np.ndarray:
    """Project columns onto the principal directions: W^T (X - mean)."""
    values = as_values(X)
    if values.shape[0] != model.input_features:
        raise DimensionError(
            f"model expects {model.input_features} features, data has {values.shape[0]}"
        )
    return model.components.T @ (values - model.mean[:, None])


def standardize_fit(X: "DataMatrix | np.ndarray") -> StandardizeModel:
    """Per-feature mean/std over samples (population denominator).

    A constant feature gets std 1 and its mean pinned to the constant, so
    it standardizes to exactly zero instead of dividing by zero.
    """
    values = as_values(X)
    if values.shape[1] < 2:
        raise DimensionError("standardize_fit needs at least 2 samples")
    mean = values.mean(axis=1)
    std = values.std(axis=1)
    constant = values.max(axis=1) == values.min(axis=1)
    mean = np.where(constant, values[:, 0], mean)
    std = np.where(constant, 1.0, std)
    return StandardizeModel(mean, std)


def standardize_apply(model: StandardizeModel, X: "DataMatrix | np.ndarray") -> np.ndarray:
    values = as_values(X)
    if values.shape[0] != model.mean.shape[0]:
        raise DimensionError(
            f"model expects {model.mean.shape[0]} features, data has {values.shape[0]}"
        )
    return (values - model.mean[:, None]) / model.std[:, None]


@dataclass(frozen=True)
class PreprocessConfig:
    """What to run before graph construction: optional PCA, then optional
    standardization."""

    pca_dim: int | None = None
    standardize: bool = True


@dataclass(frozen=True)
class PreprocessModel:
    """Fitted preprocessing pipeline (PCA then standardization)."""

    pca: PcaModel | None
    scaler: StandardizeModel | None
    input_features: int

    @property
    def output_features(self) -> int:
        if self.pca is not None:
            return self.pca.output_features
        return self.input_features


def preprocess_fit(X: DataMatrix, config: PreprocessConfig) -> PreprocessModel:
    pca = None
    current: "DataMatrix | np.ndarray" = X
    if config.pca_dim is not None:
        pca = pca_fit(X, config.pca_dim)
        current = pca_transform(pca, X)
    scaler = standardize_fit(current) if config.standardize else None
    return PreprocessModel(pca, scaler, X.feature_count)


def preprocess_apply(model: PreprocessModel, X: "DataMatrix | np.ndarray") -> np.ndarray:
    values = as_values(X)
    if values.shape[0] != model.input_features:
        raise DimensionError(
            f"pipeline expects {model.input_features} features, data has {values.shape[0]}"
        )
    if model.pca is not None:
        values = pca_transform(model.pca, values)
    if model.scaler is not None:
        values = standardize_apply(model.scaler, values)
    return np.asarray(values, dtype=np.float64)
