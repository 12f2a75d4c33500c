"""Benchmark harness: repeated random splits, 1-NN scoring, grid search.

Protocol per repeat: split the samples class-by-class (a seeded permutation
takes the first train_per_class of each class for training), fit the
preprocessing and the contrastive graphs on the training split only, learn
the projection, embed both splits, and score a 1-nearest-neighbor
classifier in the embedding.

Two recall conventions are supported: ``standard`` divides each class's
correct count by the number of its true test samples (macro recall);
``predicted`` divides by the number of samples predicted as that class
(macro precision), counting empty predicted classes as zero.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import DataMatrix, LabelVector, init_projection
from .errors import (
    ClfeError,
    DimensionError,
    EmptyClass,
    InvalidSplit,
    KTooLarge,
    LengthMismatch,
)
from .graphs import build_s_cl1, build_s_cl2, build_u_cl
from .optimizer import AdamHyperparams, fit
from .preprocess import PreprocessConfig, preprocess_apply, preprocess_fit

METHODS = ("u-cl", "s-cl1", "s-cl2")

RECALL_MODES = ("standard", "predicted")

# Sub-stream tags for per-repeat rngs, derived from (seed, repeat, stream).
_STREAM_SPLIT = 0
_STREAM_INIT = 1


@dataclass(frozen=True)
class SplitSpec:
    """Repeated-random-split protocol: per class, a seeded permutation
    sends the first train_per_class samples to the training side."""

    train_per_class: int
    repeats: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.train_per_class < 1:
            raise InvalidSplit(
                f"train_per_class must be >= 1, got {self.train_per_class}"
            )
        if self.repeats < 1:
            raise ValueError(f"repeats must be >= 1, got {self.repeats}")


@dataclass(frozen=True)
class GridSpec:
    """Search grid over neighbor count and temperature."""

    k_values: tuple[int, ...] = (2, 4, 6, 8, 10)
    sigma_values: tuple[float, ...] = (0.01, 0.1, 1.0, 10.0, 100.0, 1000.0)

    def __post_init__(self) -> None:
        if not self.k_values or not self.sigma_values:
            raise ValueError("grid must have at least one k and one sigma")
        if any(k < 1 for k in self.k_values):
            raise ValueError("all k values must be >= 1")
        if any(not (s > 0) for s in self.sigma_values):
            raise ValueError("all sigma values must be positive")


def derived_rng(seed: int, repeat: int, stream: int) -> np.random.Generator:
    """Deterministic per-repeat generator keyed by (seed, repeat, stream)."""
    return np.random.default_rng([seed, repeat, stream])


def split_indices(
    labels: LabelVector, train_per_class: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint train/test index sets covering all samples.

    Classes are processed in ascending id order; each class's member
    indices (ascending) are permuted and the first train_per_class go to
    the training side. Both returned index arrays are sorted.
    """
    train: list[np.ndarray] = []
    test: list[np.ndarray] = []
    for c in range(1, labels.class_count + 1):
        members = np.flatnonzero(labels.labels == c)
        if train_per_class >= members.size:
            raise InvalidSplit(
                f"train_per_class={train_per_class} needs class sizes "
                f"> {train_per_class}; class {c} has {members.size}"
            )
        perm = rng.permutation(members.size)
        train.append(members[perm[:train_per_class]])
        test.append(members[perm[train_per_class:]])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def knn_classify(
    train_embed: np.ndarray,
    train_labels: np.ndarray,
    test_embed: np.ndarray,
    k_nn: int = 1,
) -> np.ndarray:
    """Nearest-neighbor labels by Euclidean distance (columns = samples).

    Distance ties go to the lowest training index. For k_nn > 1 the label
    is a majority vote; vote ties go to the tied class whose member appears
    earliest in the neighbor ordering.
    """
    train_embed = np.asarray(train_embed, dtype=np.float64)
    test_embed = np.asarray(test_embed, dtype=np.float64)
    train_labels = np.asarray(train_labels, dtype=np.int64)
    if train_embed.ndim != 2 or test_embed.ndim != 2:
        raise DimensionError("embeddings must be 2-D (features x samples)")
    if train_embed.shape[0] != test_embed.shape[0]:
        raise DimensionError(
            f"embedding dims differ: {train_embed.shape[0]} vs {test_embed.shape[0]}"
        )
    m = train_embed.shape[1]
    if train_labels.shape[0] != m:
        raise LengthMismatch(f"{train_labels.shape[0]} labels for {m} training points")
    if k_nn < 1 or k_nn > m:
        raise KTooLarge(f"k_nn={k_nn} must lie in 1..{m}")

    tr_sq = np.einsum("ij,ij->j", train_embed, train_embed)
    te_sq = np.einsum("ij,ij->j", test_embed, test_embed)
    d2 = te_sq[:, None] + tr_sq[None, :] - 2.0 * (test_embed.T @ train_embed)

    if k_nn == 1:
        return train_labels[np.argmin(d2, axis=1)]

    order = np.argsort(d2, axis=1, kind="stable")[:, :k_nn]
    out = np.empty(test_embed.shape[1], dtype=np.int64)
    for q in range(out.size):
        votes = train_labels[order[q]]
        counts = np.bincount(votes)
        best = counts.max()
        tied = set(np.flatnonzero(counts == best).tolist())
        out[q] = next(v for v in votes if v in tied)
    return out


def confusion_matrix(
    true_labels: np.ndarray, predicted_labels: np.ndarray, class_count: int
) -> np.ndarray:
    """C x C counts; rows index the true class, columns the predicted one."""
    true_labels = np.asarray(true_labels, dtype=np.int64)
    predicted_labels = np.asarray(predicted_labels, dtype=np.int64)
    if true_labels.shape != predicted_labels.shape:
        raise LengthMismatch(
            f"{true_labels.size} true vs {predicted_labels.size} predicted labels"
        )
    out = np.zeros((class_count, class_count), dtype=np.int64)
    np.add.at(out, (true_labels - 1, predicted_labels - 1), 1)
    return out


def recognition_accuracy(true_labels, predicted_labels) -> float:
    """Fraction of correct predictions."""
    true_labels = np.asarray(true_labels, dtype=np.int64)
    predicted_labels = np.asarray(predicted_labels, dtype=np.int64)
    if true_labels.shape != predicted_labels.shape:
        raise LengthMismatch(
            f"{true_labels.size} true vs {predicted_labels.size} predicted labels"
        )
    return float(np.mean(true_labels == predicted_labels))


def recall_rate(true_labels, predicted_labels, mode: str = "standard") -> float:
    """Mean over classes of correct-count / class-count.

    ``standard`` divides by the true class sizes (macro recall);
    ``predicted`` divides by the predicted class sizes (macro precision),
    with empty predicted classes contributing zero but still counted.
    """
    if mode not in RECALL_MODES:
        raise ValueError(f"mode must be one of {RECALL_MODES}, got {mode!r}")
    true_labels = np.asarray(true_labels, dtype=np.int64)
    predicted_labels = np.asarray(predicted_labels, dtype=np.int64)
    if true_labels.shape != predicted_labels.shape:
        raise LengthMismatch(
            f"{true_labels.size} true vs {predicted_labels.size} predicted labels"
        )
    C = int(true_labels.max())
    if np.unique(true_labels).size != C or true_labels.min() < 1:
        raise EmptyClass("every class 1..C must appear in true_labels")

    correct = np.zeros(C)
    for c in range(1, C + 1):
        correct[c - 1] = np.sum((true_labels == c) & (predicted_labels == c))
    if mode == "standard":
        denom = np.bincount(true_labels, minlength=C + 1)[1:]
        return float(np.mean(correct / denom))
    denom = np.bincount(predicted_labels, minlength=C + 1)[1:]
    terms = np.where(denom > 0, correct / np.where(denom > 0, denom, 1), 0.0)
    return float(np.mean(terms))


@dataclass(frozen=True)
class EvaluationReport:
    """Per-repeat and averaged scores plus the configuration that made them."""

    method: str
    embed_dim: int
    k: int
    sigma: float
    train_per_class: int
    repeats: int
    seed: int
    pca_dim: int | None
    standardize: bool
    adam: AdamHyperparams
    original_labels: tuple | None
    accuracies: tuple[float, ...]
    recalls_standard: tuple[float, ...]
    recalls_predicted: tuple[float, ...]
    confusions: tuple[np.ndarray, ...]
    final_losses: tuple[float, ...]
    fit_iterations: tuple[int, ...]
    fit_converged: tuple[bool, ...]
    mean_accuracy: float = field(init=False)
    mean_recall_standard: float = field(init=False)
    mean_recall_predicted: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "mean_accuracy", float(np.mean(self.accuracies)))
        object.__setattr__(
            self, "mean_recall_standard", float(np.mean(self.recalls_standard))
        )
        object.__setattr__(
            self, "mean_recall_predicted", float(np.mean(self.recalls_predicted))
        )


def _build_graphs(method, Z_train: DataMatrix, labels_train, k):
    if method == "u-cl":
        return build_u_cl(Z_train, k)
    if method == "s-cl1":
        return build_s_cl1(labels_train)
    if method == "s-cl2":
        return build_s_cl2(Z_train, labels_train, k)
    raise ValueError(f"method must be one of {METHODS}, got {method!r}")


def run_experiment(
    X: DataMatrix,
    labels: LabelVector,
    method: str,
    embed_dim: int,
    k: int,
    sigma: float,
    split: SplitSpec,
    preprocess: PreprocessConfig = PreprocessConfig(),
    adam: AdamHyperparams = AdamHyperparams(),
) -> EvaluationReport:
    """Full protocol for one (method, k, sigma, d) configuration.

    Deterministic given the split seed; per-repeat streams are derived by a
    fixed counter scheme so repeats are independent yet reproducible.
    Failures carry the repeat index in their message.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    if labels.sample_count != X.sample_count:
        raise LengthMismatch(
            f"{labels.sample_count} labels for {X.sample_count} samples"
        )

    accuracies, rec_std, rec_pred = [], [], []
    confusions, final_losses, iters, convs = [], [], [], []

    for r in range(split.repeats):
        try:
            train_idx, test_idx = split_indices(
                labels, split.train_per_class, derived_rng(split.seed, r, _STREAM_SPLIT)
            )
            X_train = DataMatrix(X.values[:, train_idx])
            labels_train = labels.subset(train_idx)
            labels_test = labels.subset(test_idx)

            prep = preprocess_fit(X_train, preprocess)
            Z_train = DataMatrix(preprocess_apply(prep, X_train))
            Z_test = preprocess_apply(prep, X.values[:, test_idx])

            graph = _build_graphs(method, Z_train, labels_train, k)
            P0 = init_projection(
                Z_train.feature_count, embed_dim, [split.seed, r, _STREAM_INIT]
            )
            result = fit(Z_train, graph, sigma, adam, P0)

            emb_train = result.projection.values.T @ Z_train.values
            emb_test = result.projection.values.T @ Z_test
            pred = knn_classify(emb_train, labels_train.labels, emb_test, k_nn=1)

            accuracies.append(recognition_accuracy(labels_test.labels, pred))
            rec_std.append(recall_rate(labels_test.labels, pred, "standard"))
            rec_pred.append(recall_rate(labels_test.labels, pred, "predicted"))
            confusions.append(
                confusion_matrix(labels_test.labels, pred, labels.class_count)
            )
            final_losses.append(result.loss_trace[-1])
            iters.append(result.iterations)
            convs.append(result.converged)
        except ClfeError as exc:
            raise type(exc)(f"repeat {r}: {exc}") from exc

    return EvaluationReport(
        method=method,
        embed_dim=embed_dim,
        k=k,
        sigma=sigma,
        train_per_class=split.train_per_class,
        repeats=split.repeats,
        seed=split.seed,
        pca_dim=preprocess.pca_dim,
        standardize=preprocess.standardize,
        adam=adam,
        original_labels=labels.original_values,
        accuracies=tuple(accuracies),
        recalls_standard=tuple(rec_std),
        recalls_predicted=tuple(rec_pred),
        confusions=tuple(confusions),
        final_losses=tuple(final_losses),
        fit_iterations=tuple(iters),
        fit_converged=tuple(convs),
    )


@dataclass(frozen=True)
class GridCell:
    k: int
    sigma: float
    report: EvaluationReport | None
    error: str | None


@dataclass(frozen=True)
class GridSearchResult:
    cells: tuple[GridCell, ...]
    best: GridCell


def _evaluate_cell(args) -> GridCell:
    (X, labels, method, embed_dim, k, sigma, split, preprocess, adam) = args
    try:
        report = run_experiment(
            X, labels, method, embed_dim, k, sigma, split, preprocess, adam
        )
        return GridCell(k, sigma, report, None)
    except ClfeError as exc:
        return GridCell(k, sigma, None, f"{type(exc).__name__}: {exc}")


def grid_search(
    X: DataMatrix,
    labels: LabelVector,
    method: str,
    embed_dim: int,
    grid: GridSpec,
    split: SplitSpec,
    preprocess: PreprocessConfig = PreprocessConfig(),
    adam: AdamHyperparams = AdamHyperparams(),
    jobs: int = 1,
) -> GridSearchResult:
    """Evaluate every (k, sigma) cell; infeasible cells are recorded, not
    fatal, unless the whole grid fails.

    The best cell maximizes mean accuracy; ties go to smaller k, then
    smaller sigma. Cells are independent, so jobs > 1 fans them out to a
    process pool; result ordering stays deterministic either way.
    """
    cell_args = [
        (X, labels, method, embed_dim, k, sigma, split, preprocess, adam)
        for k in sorted(set(grid.k_values))
        for sigma in sorted(set(grid.sigma_values))
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = tuple(pool.map(_evaluate_cell, cell_args))
    else:
        cells = tuple(_evaluate_cell(a) for a in cell_args)

    best = None
    for cell in cells:  # cells ordered by (k, sigma): first strict max wins ties
        if cell.report is None:
            continue
        if best is None or cell.report.mean_accuracy > best.report.mean_accuracy:
            best = cell
    if best is None:
        raise KTooLarge(
            "every grid cell failed; first error: " + (cells[0].error or "unknown")
        )
    return GridSearchResult(cells, best)
