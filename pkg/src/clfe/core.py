"""Core data types: samples-as-columns matrices, labels, projections.

All types are immutable after construction; the wrapped arrays are
defensively copied and marked read-only, so instances can be shared
freely between concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, EmptyClass, LengthMismatch, NonFiniteEntry

# Seeds are plain unsigned 64-bit ints; derived streams may pass a sequence
# of ints (fed to numpy's SeedSequence) for reproducible sub-streams.
RandomSeed = int


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def as_values(X: "DataMatrix | np.ndarray") -> np.ndarray:
    """Accept a DataMatrix or a plain 2-D float array; return the ndarray."""
    if isinstance(X, DataMatrix):
        return X.values
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D array, got {arr.ndim}-D")
    return arr


@dataclass(frozen=True)
class DataMatrix:
    """Sample set stored column-per-sample: D feature rows, n sample columns."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64)  # defensive copy
        if arr.ndim != 2:
            raise DimensionError(f"data matrix must be 2-D, got {arr.ndim}-D")
        D, n = arr.shape
        if D < 1 or n < 2:
            raise DimensionError(
                f"need at least 1 feature and 2 samples, got shape {D}x{n}"
            )
        if not np.all(np.isfinite(arr)):
            r, c = np.argwhere(~np.isfinite(arr))[0]
            raise NonFiniteEntry(f"non-finite entry at feature {r}, sample {c}")
        object.__setattr__(self, "values", _freeze(arr))

    @property
    def feature_count(self) -> int:
        return self.values.shape[0]

    @property
    def sample_count(self) -> int:
        return self.values.shape[1]

    def column(self, j: int) -> np.ndarray:
        return self.values[:, j]


@dataclass(frozen=True)
class LabelVector:
    """Integer class ids in {1..C}; every class must occur at least once.

    ``original_values`` optionally records, per class id, the label value
    the class carried before remapping (loader metadata for reports).
    """

    labels: np.ndarray
    class_count: int | None = None
    original_values: tuple | None = None

    def __post_init__(self) -> None:
        arr = np.array(self.labels, dtype=np.int64)
        if arr.ndim != 1:
            raise DimensionError(f"labels must be 1-D, got {arr.ndim}-D")
        if arr.size == 0:
            raise LengthMismatch("labels are empty")
        C = self.class_count if self.class_count is not None else int(arr.max())
        if arr.min() < 1 or arr.max() > C:
            raise EmptyClass(
                f"labels must lie in 1..{C}, got range {arr.min()}..{arr.max()}"
            )
        present = np.unique(arr)
        if present.size != C:
            missing = sorted(set(range(1, C + 1)) - set(present.tolist()))
            raise EmptyClass(f"class {missing[0]} has no samples")
        if self.original_values is not None and len(self.original_values) != C:
            raise LengthMismatch(
                f"original_values has {len(self.original_values)} entries for {C} classes"
            )
        object.__setattr__(self, "labels", _freeze(arr))
        object.__setattr__(self, "class_count", C)

    @property
    def sample_count(self) -> int:
        return self.labels.shape[0]

    def subset(self, indices: np.ndarray) -> "LabelVector":
        """Restrict to the given sample indices, keeping the class universe."""
        return LabelVector(self.labels[indices], self.class_count, self.original_values)


@dataclass(frozen=True)
class ProjectionMatrix:
    """Linear map to the embedding space: D rows, d columns; Y = P^T X."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise DimensionError(f"projection must be 2-D, got {arr.ndim}-D")
        D, d = arr.shape
        if d < 1 or d > D:
            raise DimensionError(f"need 1 <= d <= D, got D={D}, d={d}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteEntry("projection contains non-finite entries")
        object.__setattr__(self, "values", _freeze(arr))

    @property
    def feature_count(self) -> int:
        return self.values.shape[0]

    @property
    def embed_dim(self) -> int:
        return self.values.shape[1]


def validate_dataset(
    values: "np.ndarray | Sequence",
    labels: "Sequence | np.ndarray | None" = None,
    class_count: int | None = None,
) -> tuple[DataMatrix, LabelVector | None]:
    """Build validated dataset types from raw arrays.

    ``values`` is D x n with one column per sample. Raises NonFiniteEntry,
    EmptyClass, or LengthMismatch when an invariant fails.
    """
    X = DataMatrix(np.asarray(values, dtype=np.float64))
    if labels is None:
        return X, None
    lv = LabelVector(np.asarray(labels), class_count)
    if lv.sample_count != X.sample_count:
        raise LengthMismatch(
            f"{lv.sample_count} labels for {X.sample_count} samples"
        )
    return X, lv


def remap_labels(raw_labels: "Sequence | np.ndarray") -> LabelVector:
    """Map arbitrary integer labels onto contiguous ids 1..C.

    Classes are numbered in ascending order of their original value; the
    original values are preserved on the returned LabelVector.
    """
    raw = np.asarray(raw_labels, dtype=np.int64)
    uniq = np.unique(raw)
    mapped = np.searchsorted(uniq, raw) + 1
    return LabelVector(mapped, len(uniq), tuple(int(v) for v in uniq))


def init_projection(D: int, d: int, seed) -> ProjectionMatrix:
    """Seeded starting projection with orthonormal columns.

    Draws a D x d standard-normal matrix from ``default_rng(seed)`` and
    orthonormalizes it (QR with the R-diagonal sign fixed), so the initial
    embedding is well scaled for cosine similarity. Identical seeds give
    bit-identical matrices.
    """
    if d < 1 or d > D:
        raise DimensionError(f"need 1 <= d <= D, got D={D}, d={d}")
    rng = np.random.default_rng(seed)
    gauss = rng.standard_normal((D, d))
    q, r = np.linalg.qr(gauss)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return ProjectionMatrix(q * signs)


def project(P: ProjectionMatrix, X: "DataMatrix | np.ndarray") -> np.ndarray:
    """Embed samples: Y = P^T X, one column per sample (d x n)."""
    values = as_values(X)
    if P.feature_count != values.shape[0]:
        raise DimensionError(
            f"projection expects {P.feature_count} features, data has {values.shape[0]}"
        )
    return P.values.T @ values
