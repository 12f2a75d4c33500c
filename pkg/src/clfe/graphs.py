"""Contrastive graph construction.

Each method partitions the off-diagonal sample pairs into positives and
negatives and stores them as a pair of symmetric n x n matrices:

* ``u-cl``  -- k-nearest-neighbor pairs are positive, weighted by a heat
  kernel; all remaining pairs are negative.
* ``s-cl1`` -- same-class pairs are positive (weight 1), cross-class pairs
  are negative.
* ``s-cl2`` -- within-class k-nearest-neighbor pairs are positive with
  heat-kernel weights; everything else is negative.

The heat-kernel bandwidth for a pair is the product of each endpoint's
distance to its 7th nearest neighbor, computed over all samples even when
the neighbor lists themselves are class-restricted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DataMatrix, LabelVector
from .errors import (
    KTooLarge,
    LengthMismatch,
    TooFewSamplesForThermal,
    ZeroThermal,
)

METHOD_UCL = "uCL"
METHOD_SCL1 = "sCL1"
METHOD_SCL2 = "sCL2"

# exp() can underflow to 0.0 for extreme distance/bandwidth ratios; flooring
# at the smallest positive normal keeps positive supports exactly positive.
_WEIGHT_FLOOR = np.finfo(np.float64).tiny

_THERMAL_RANK = 7


def _pairwise_sq_distances(values: np.ndarray) -> np.ndarray:
    """Dense squared Euclidean distances between sample columns."""
    sq_norms = np.einsum("ij,ij->j", values, values)
    d2 = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (values.T @ values)
    np.fill_diagonal(d2, 0.0)
    return np.maximum(d2, 0.0)


@dataclass(frozen=True)
class NeighborIndex:
    """Per-sample nearest neighbors plus the 7th-neighbor distances.

    ``neighbors[j]`` lists the k nearest samples of sample j (self excluded,
    ascending distance, ties broken by ascending sample index). For the
    supervised variant the lists are restricted to same-class samples.
    ``seventh_distance`` is computed over all samples regardless, and is
    None when n < 8 (no 7th neighbor exists).
    """

    neighbors: np.ndarray
    seventh_distance: np.ndarray | None
    sq_distances: np.ndarray
    k: int

    def __post_init__(self) -> None:
        for arr in (self.neighbors, self.sq_distances, self.seventh_distance):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def sample_count(self) -> int:
        return self.neighbors.shape[0]


def build_neighbor_index(
    X: DataMatrix, k: int, labels: LabelVector | None = None
) -> NeighborIndex:
    """Exact k-nearest-neighbor lists by Euclidean distance.

    With ``labels`` the lists are restricted to same-class samples, in which
    case k may not exceed (smallest class size - 1). Ties are broken by
    ascending sample index so results are platform-independent.
    """
    n = X.sample_count
    if k < 1:
        raise KTooLarge(f"k must be >= 1, got {k}")
    d2 = _pairwise_sq_distances(X.values)

    ranked = d2.copy()
    np.fill_diagonal(ranked, np.inf)
    if labels is not None:
        if labels.sample_count != n:
            raise LengthMismatch(f"{labels.sample_count} labels for {n} samples")
        same = labels.labels[:, None] == labels.labels[None, :]
        min_class = np.bincount(labels.labels)[1:].min()
        if k > min_class - 1:
            raise KTooLarge(
                f"k={k} exceeds smallest class size - 1 = {min_class - 1}"
            )
        ranked[~same] = np.inf
    elif k > n - 1:
        raise KTooLarge(f"k={k} exceeds n - 1 = {n - 1}")

    # stable argsort keeps ascending-index order among equal distances
    order = np.argsort(ranked, axis=1, kind="stable")
    neighbors = order[:, :k]

    seventh = None
    if n >= _THERMAL_RANK + 1:
        unrestricted = d2.copy()
        np.fill_diagonal(unrestricted, np.inf)
        unrestricted.sort(axis=1)
        seventh = np.sqrt(unrestricted[:, _THERMAL_RANK - 1])

    return NeighborIndex(neighbors, seventh, d2, k)


def thermal_weight(X: DataMatrix, idx: NeighborIndex, i: int, j: int) -> float:
    """Heat-kernel weight exp(-||x_i - x_j||^2 / t) for one pair.

    The bandwidth t is the product of the two samples' 7th-nearest-neighbor
    distances. t = 0 means at least 7 exact duplicates and is an error.
    """
    if i == j:
        raise ValueError("thermal weight is defined for distinct samples only")
    if idx.seventh_distance is None:
        raise TooFewSamplesForThermal(
            f"need at least 8 samples for a 7th neighbor, got {X.sample_count}"
        )
    t = float(idx.seventh_distance[i] * idx.seventh_distance[j])
    if t == 0.0:
        raise ZeroThermal(f"zero bandwidth for pair ({i}, {j}): duplicate-heavy data")
    return float(max(np.exp(-idx.sq_distances[i, j] / t), _WEIGHT_FLOOR))


@dataclass(frozen=True)
class ContrastiveGraphPair:
    """The positive/negative pair matrices defining the contrastive loss.

    Both matrices are symmetric with zero diagonal; their supports are
    disjoint and jointly cover every off-diagonal pair. Positive weights lie
    in (0, 1]; negative entries are 0/1 indicators.
    """

    s_pos: np.ndarray
    s_neg: np.ndarray
    method_tag: str

    def __post_init__(self) -> None:
        pos = np.asarray(self.s_pos, dtype=np.float64)
        neg = np.asarray(self.s_neg, dtype=np.float64)
        n = pos.shape[0]
        if pos.shape != (n, n) or neg.shape != (n, n):
            raise ValueError("graph matrices must be square and same-shaped")
        if not (np.array_equal(pos, pos.T) and np.array_equal(neg, neg.T)):
            raise ValueError("graph matrices must be symmetric")
        if np.any(np.diag(pos) != 0) or np.any(np.diag(neg) != 0):
            raise ValueError("graph matrices must have zero diagonal")
        if np.any(pos < 0) or np.any(pos > 1):
            raise ValueError("positive weights must lie in [0, 1]")
        if not np.all((neg == 0) | (neg == 1)):
            raise ValueError("negative entries must be 0 or 1")
        pos_support = pos > 0
        neg_support = neg > 0
        if np.any(pos_support & neg_support):
            raise ValueError("positive and negative supports overlap")
        off_diag = ~np.eye(n, dtype=bool)
        if not np.all((pos_support | neg_support) == off_diag):
            raise ValueError("supports must cover all off-diagonal pairs")
        object.__setattr__(self, "s_pos", pos.copy())
        object.__setattr__(self, "s_neg", neg.copy())
        self.s_pos.setflags(write=False)
        self.s_neg.setflags(write=False)

    @property
    def sample_count(self) -> int:
        return self.s_pos.shape[0]


def _membership(neighbors: np.ndarray, n: int) -> np.ndarray:
    """Boolean matrix with [i, j] true iff i is in the neighbor list of j."""
    k = neighbors.shape[1]
    member = np.zeros((n, n), dtype=bool)
    member[neighbors.ravel(), np.repeat(np.arange(n), k)] = True
    return member


def _heat_weights(idx: NeighborIndex, pos_mask: np.ndarray) -> np.ndarray:
    d7 = idx.seventh_distance
    if np.any(d7 == 0.0):
        bad = int(np.argmax(d7 == 0.0))
        raise ZeroThermal(
            f"sample {bad} has 7 exact duplicates; heat kernel undefined"
        )
    t = np.outer(d7, d7)
    weights = np.maximum(np.exp(-idx.sq_distances / t), _WEIGHT_FLOOR)
    return np.where(pos_mask, weights, 0.0)


def build_u_cl(X: DataMatrix, k: int) -> ContrastiveGraphPair:
    """Unsupervised graphs: kNN pairs positive, everything else negative."""
    n = X.sample_count
    if n < _THERMAL_RANK + 1:
        raise TooFewSamplesForThermal(f"need at least 8 samples, got {n}")
    idx = build_neighbor_index(X, k)
    member = _membership(idx.neighbors, n)
    pos_mask = member | member.T
    np.fill_diagonal(pos_mask, False)
    s_pos = _heat_weights(idx, pos_mask)
    off_diag = ~np.eye(n, dtype=bool)
    s_neg = np.where(~pos_mask & off_diag, 1.0, 0.0)
    return ContrastiveGraphPair(s_pos, s_neg, METHOD_UCL)


def build_s_cl1(labels: LabelVector) -> ContrastiveGraphPair:
    """Supervised graphs from class labels alone: within-class positive,
    cross-class negative. Self-pairs carry no information and are excluded."""
    lab = labels.labels
    same = lab[:, None] == lab[None, :]
    off_diag = ~np.eye(labels.sample_count, dtype=bool)
    s_pos = np.where(same & off_diag, 1.0, 0.0)
    s_neg = np.where(~same, 1.0, 0.0)
    return ContrastiveGraphPair(s_pos, s_neg, METHOD_SCL1)


def build_s_cl2(X: DataMatrix, labels: LabelVector, k: int) -> ContrastiveGraphPair:
    """Supervised-local graphs: within-class kNN pairs positive with heat
    weights; all other pairs (including every cross-class pair) negative."""
    n = X.sample_count
    if labels.sample_count != n:
        raise LengthMismatch(f"{labels.sample_count} labels for {n} samples")
    if n < _THERMAL_RANK + 1:
        raise TooFewSamplesForThermal(f"need at least 8 samples, got {n}")
    idx = build_neighbor_index(X, k, labels)
    member = _membership(idx.neighbors, n)
    pos_mask = member | member.T
    np.fill_diagonal(pos_mask, False)
    s_pos = _heat_weights(idx, pos_mask)
    off_diag = ~np.eye(n, dtype=bool)
    s_neg = np.where(~pos_mask & off_diag, 1.0, 0.0)
    return ContrastiveGraphPair(s_pos, s_neg, METHOD_SCL2)
