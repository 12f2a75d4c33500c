"""Command-line interface: fit, transform, benchmark, gradcheck.

Data files are CSV with one sample per row; the label column is the last
one by default (``--label-column none`` for unlabeled data, or a 0-based
column index). Config files are flat ``key = value`` text with ``#``
comments; any flag overrides its config key; unknown keys are errors.
Floats are serialized with 17 significant digits so every emitted file is
byte-reproducible and round-trips exactly.

Exit codes: 0 success, 1 check failure, 2 usage/config error, 3 data error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .core import DataMatrix, LabelVector, ProjectionMatrix, init_projection, remap_labels
from .errors import (
    ClfeError,
    ConfigError,
    InvalidSplit,
    MissingLabels,
    ParseError,
)
from .evaluate import (
    GridSpec,
    SplitSpec,
    grid_search,
)
from .graphs import build_s_cl1, build_s_cl2, build_u_cl
from .objective import finite_diff_gradient, gradient, gradient_disagreement
from .optimizer import AdamHyperparams, fit
from .preprocess import (
    PcaModel,
    PreprocessConfig,
    PreprocessModel,
    StandardizeModel,
    preprocess_apply,
    preprocess_fit,
)

MODEL_MAGIC = "CLFE-MODEL 1"
REPORT_MAGIC = "CLFE-BENCHMARK-REPORT 1"
SEED_ENV_VAR = "CLFE_SEED"
GRADCHECK_TOL = 1e-4
GRADCHECK_WARN_N = 100

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DATA = 3

_USAGE_ERRORS = (ConfigError, MissingLabels, InvalidSplit)

SUPERVISED_METHODS = ("s-cl1", "s-cl2")


def _fmt(x: float) -> str:
    """17 significant digits: exact float64 round-trip, stable bytes."""
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# configuration


def _parse_bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("true", "1", "yes"):
        return True
    if v in ("false", "0", "no"):
        return False
    raise ConfigError(f"expected true/false, got {value!r}")


def _parse_pca_dim(value: str):
    v = value.strip().lower()
    if v in ("none", ""):
        return None
    return int(value)


def _parse_int_list(value: str) -> tuple[int, ...]:
    return tuple(int(p) for p in value.split(",") if p.strip())


def _parse_float_list(value: str) -> tuple[float, ...]:
    return tuple(float(p) for p in value.split(",") if p.strip())


def _parse_label_column(value: str):
    v = value.strip().lower()
    if v in ("last", "none"):
        return v
    return int(value)


_CONFIG_KEYS = {
    "method": str,
    "dim": int,
    "k": int,
    "sigma": float,
    "pca_dim": _parse_pca_dim,
    "standardize": _parse_bool,
    "seed": int,
    "repeats": int,
    "train_per_class": int,
    "jobs": int,
    "output": str,
    "alpha": float,
    "beta1": float,
    "beta2": float,
    "epsilon": float,
    "tol": float,
    "max_iter": int,
    "k_grid": _parse_int_list,
    "sigma_grid": _parse_float_list,
    "label_column": _parse_label_column,
    "header": _parse_bool,
}

_DEFAULTS = {
    "k": 2,
    "sigma": 1.0,
    "pca_dim": None,
    "standardize": True,
    "seed": 0,
    "repeats": 5,
    "train_per_class": 6,
    "jobs": 1,
    "output": None,
    "alpha": 0.001,
    "beta1": 0.9,
    "beta2": 0.999,
    "epsilon": 1e-8,
    "tol": 0.001,
    "max_iter": 1000,
    "k_grid": None,
    "sigma_grid": None,
    "label_column": "last",
    "header": False,
}


def parse_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment; unknown keys fail."""
    values: dict = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for ln, raw in enumerate(lines, 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{ln}: expected 'key = value'")
        key, _, val = stripped.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{ln}: unknown config key {key!r}")
        try:
            values[key] = _CONFIG_KEYS[key](val.strip())
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"{path}:{ln}: bad value for {key}: {exc}") from exc
    return values


@dataclass
class RunConfig:
    """Fully resolved configuration (flags > config file > env > defaults)."""

    data: str
    method: str | None
    dim: int | None
    k: int
    sigma: float
    pca_dim: int | None
    standardize: bool
    seed: int
    repeats: int
    train_per_class: int
    jobs: int
    output: str | None
    alpha: float
    beta1: float
    beta2: float
    epsilon: float
    tol: float
    max_iter: int
    k_grid: tuple[int, ...] | None
    sigma_grid: tuple[float, ...] | None
    label_column: "str | int"
    header: bool

    def adam(self) -> AdamHyperparams:
        try:
            return AdamHyperparams(
                alpha=self.alpha,
                beta1=self.beta1,
                beta2=self.beta2,
                epsilon=self.epsilon,
                max_iter=self.max_iter,
                tol=self.tol,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def preprocessing(self) -> PreprocessConfig:
        return PreprocessConfig(pca_dim=self.pca_dim, standardize=self.standardize)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge flag values over config-file values over env/builtin defaults."""
    file_values = parse_config_file(args.config) if getattr(args, "config", None) else {}

    def pick(key):
        flag = getattr(args, key, None)
        if flag is not None:
            return flag
        if key in file_values:
            return file_values[key]
        if key == "seed" and os.environ.get(SEED_ENV_VAR):
            try:
                return int(os.environ[SEED_ENV_VAR])
            except ValueError as exc:
                raise ConfigError(
                    f"{SEED_ENV_VAR} must be an integer, got "
                    f"{os.environ[SEED_ENV_VAR]!r}"
                ) from exc
        return _DEFAULTS.get(key)

    cfg = RunConfig(
        data=getattr(args, "data", ""),
        method=pick("method"),
        dim=pick("dim"),
        k=pick("k"),
        sigma=pick("sigma"),
        pca_dim=pick("pca_dim"),
        standardize=pick("standardize"),
        seed=pick("seed"),
        repeats=pick("repeats"),
        train_per_class=pick("train_per_class"),
        jobs=pick("jobs"),
        output=pick("output"),
        alpha=pick("alpha"),
        beta1=pick("beta1"),
        beta2=pick("beta2"),
        epsilon=pick("epsilon"),
        tol=pick("tol"),
        max_iter=pick("max_iter"),
        k_grid=pick("k_grid"),
        sigma_grid=pick("sigma_grid"),
        label_column=pick("label_column"),
        header=pick("header"),
    )
    # fall back to a singleton grid when k/sigma were pinned explicitly
    if cfg.k_grid is None and (getattr(args, "k", None) is not None or "k" in file_values):
        cfg.k_grid = (cfg.k,)
    if cfg.sigma_grid is None and (
        getattr(args, "sigma", None) is not None or "sigma" in file_values
    ):
        cfg.sigma_grid = (cfg.sigma,)

    if cfg.method is not None and cfg.method not in ("u-cl", "s-cl1", "s-cl2"):
        raise ConfigError(f"method must be u-cl, s-cl1, or s-cl2, got {cfg.method!r}")
    if not (cfg.sigma > 0):
        raise ConfigError(f"sigma must be positive, got {cfg.sigma}")
    if cfg.k < 1:
        raise ConfigError(f"k must be >= 1, got {cfg.k}")
    if cfg.dim is not None and cfg.dim < 1:
        raise ConfigError(f"dim must be >= 1, got {cfg.dim}")
    if not (0 <= cfg.seed < 2**64):
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {cfg.seed}")
    if cfg.jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {cfg.jobs}")
    return cfg


def _require(cfg: RunConfig, *keys: str) -> None:
    for key in keys:
        if getattr(cfg, key) is None:
            raise ConfigError(f"missing required option --{key.replace('_', '-')}")


# ---------------------------------------------------------------------------
# CSV input/output


def _read_csv_rows(path: str, label_column, header: bool):
    """Rows-are-samples CSV -> (features row-major, raw labels or None)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    start = 1 if header else 0

    raw_rows: list[tuple[int, list[str]]] = []
    width = None
    for ln, line in enumerate(lines[start:], start + 1):
        if not line.strip():
            continue
        cells = [c.strip() for c in line.split(",")]
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise ParseError(f"{path}:{ln}: expected {width} cells, found {len(cells)}")
        raw_rows.append((ln, cells))
    if not raw_rows:
        raise ParseError(f"{path}: no data rows")

    if label_column == "none":
        label_idx = None
    elif label_column == "last":
        if width < 2:
            raise ParseError(f"{path}: need at least 2 columns with a last label column")
        label_idx = width - 1
    else:
        if not (0 <= label_column < width):
            raise ParseError(
                f"{path}: label column {label_column} out of range for {width} columns"
            )
        label_idx = label_column
    if label_idx is not None and width < 2:
        raise ParseError(f"{path}: no feature columns")

    rows, labels = [], []
    for ln, cells in raw_rows:
        feature_cells = []
        for col, cell in enumerate(cells):
            if col == label_idx:
                try:
                    labels.append(int(cell))
                except ValueError as exc:
                    raise ParseError(
                        f"{path}:{ln}, column {col + 1}: label {cell!r} is not an integer"
                    ) from exc
            else:
                try:
                    value = float(cell)
                except ValueError as exc:
                    raise ParseError(
                        f"{path}:{ln}, column {col + 1}: {cell!r} is not a number"
                    ) from exc
                if not np.isfinite(value):
                    raise ParseError(
                        f"{path}:{ln}, column {col + 1}: {cell!r} is not finite"
                    )
                feature_cells.append(value)
        rows.append(feature_cells)

    features = np.asarray(rows, dtype=np.float64)
    return features, (labels if label_idx is not None else None)


def load_csv(
    path: str, label_column="last", header: bool = False
) -> tuple[DataMatrix, LabelVector | None]:
    """Load a dataset: samples become columns; labels remapped to 1..C."""
    features, raw_labels = _read_csv_rows(path, label_column, header)
    X = DataMatrix(features.T)
    labels = remap_labels(raw_labels) if raw_labels is not None else None
    if labels is not None and labels.sample_count != X.sample_count:
        raise ParseError(f"{path}: label/sample count mismatch")
    return X, labels


def write_matrix_csv(path: str, columns_are_samples: np.ndarray) -> None:
    """Write one sample per row with 17-significant-digit cells."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in np.asarray(columns_are_samples).T:
            fh.write(",".join(_fmt(v) for v in row))
            fh.write("\n")


# ---------------------------------------------------------------------------
# model files


def _write_block(fh, name: str, arr: np.ndarray) -> None:
    arr = np.atleast_2d(np.asarray(arr, dtype=np.float64))
    fh.write(f"matrix {name} {arr.shape[0]} {arr.shape[1]}\n")
    for row in arr:
        fh.write(" ".join(_fmt(v) for v in row))
        fh.write("\n")


def write_model(path: str, cfg: RunConfig, prep: PreprocessModel, result) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(MODEL_MAGIC + "\n")
        fh.write(f"method: {cfg.method}\n")
        fh.write(f"embed_dim: {cfg.dim}\n")
        fh.write(f"k: {cfg.k}\n")
        fh.write(f"sigma: {_fmt(cfg.sigma)}\n")
        fh.write(f"pca_dim: {'none' if cfg.pca_dim is None else cfg.pca_dim}\n")
        fh.write(f"standardize: {str(cfg.standardize).lower()}\n")
        fh.write(f"seed: {cfg.seed}\n")
        fh.write(f"alpha: {_fmt(cfg.alpha)}\n")
        fh.write(f"beta1: {_fmt(cfg.beta1)}\n")
        fh.write(f"beta2: {_fmt(cfg.beta2)}\n")
        fh.write(f"epsilon: {_fmt(cfg.epsilon)}\n")
        fh.write(f"tol: {_fmt(cfg.tol)}\n")
        fh.write(f"max_iter: {cfg.max_iter}\n")
        fh.write(f"input_features: {prep.input_features}\n")
        fh.write(f"final_loss: {_fmt(result.loss_trace[-1])}\n")
        fh.write(f"iterations: {result.iterations}\n")
        fh.write(f"converged: {str(result.converged).lower()}\n")
        if prep.pca is not None:
            _write_block(fh, "pca_mean", prep.pca.mean)
            _write_block(fh, "pca_components", prep.pca.components)
            _write_block(fh, "pca_eigenvalues", prep.pca.eigenvalues)
        if prep.scaler is not None:
            _write_block(fh, "scaler_mean", prep.scaler.mean)
            _write_block(fh, "scaler_std", prep.scaler.std)
        _write_block(fh, "projection", result.projection.values)
        fh.write("END\n")


def read_model(path: str) -> tuple[dict, PreprocessModel, ProjectionMatrix]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read model file {path}: {exc}") from exc
    if not lines or lines[0] != MODEL_MAGIC:
        raise ParseError(f"{path}: not a model file (missing '{MODEL_MAGIC}' header)")

    meta: dict = {}
    blocks: dict = {}
    i = 1
    while i < len(lines):
        line = lines[i]
        if line == "END":
            break
        if line.startswith("matrix "):
            try:
                _, name, rows_s, cols_s = line.split()
                rows, cols = int(rows_s), int(cols_s)
            except ValueError as exc:
                raise ParseError(f"{path}:{i + 1}: bad matrix header") from exc
            data = []
            for r in range(rows):
                i += 1
                try:
                    data.append([float(v) for v in lines[i].split()])
                except (ValueError, IndexError) as exc:
                    raise ParseError(f"{path}:{i + 1}: bad matrix row") from exc
                if len(data[-1]) != cols:
                    raise ParseError(f"{path}:{i + 1}: expected {cols} values")
            blocks[name] = np.asarray(data, dtype=np.float64)
        elif ": " in line:
            key, _, val = line.partition(": ")
            meta[key] = val
        else:
            raise ParseError(f"{path}:{i + 1}: unrecognized line {line!r}")
        i += 1
    else:
        raise ParseError(f"{path}: missing END marker")

    if "projection" not in blocks:
        raise ParseError(f"{path}: missing projection block")
    pca = None
    if "pca_components" in blocks:
        pca = PcaModel(
            blocks["pca_mean"].ravel(),
            blocks["pca_components"],
            blocks["pca_eigenvalues"].ravel(),
        )
    scaler = None
    if "scaler_mean" in blocks:
        scaler = StandardizeModel(blocks["scaler_mean"].ravel(), blocks["scaler_std"].ravel())
    try:
        input_features = int(meta["input_features"])
    except (KeyError, ValueError) as exc:
        raise ParseError(f"{path}: missing or bad input_features") from exc
    prep = PreprocessModel(pca, scaler, input_features)
    return meta, prep, ProjectionMatrix(blocks["projection"])


# ---------------------------------------------------------------------------
# commands


def _load_dataset(cfg: RunConfig) -> tuple[DataMatrix, LabelVector | None]:
    X, labels = load_csv(cfg.data, cfg.label_column, cfg.header)
    if cfg.method in SUPERVISED_METHODS and labels is None:
        raise MissingLabels(
            f"method {cfg.method} needs labels; data was loaded without a label column"
        )
    return X, labels


def _build_graph(cfg: RunConfig, Z: DataMatrix, labels: LabelVector | None):
    if cfg.method == "u-cl":
        return build_u_cl(Z, cfg.k)
    if cfg.method == "s-cl1":
        return build_s_cl1(labels)
    return build_s_cl2(Z, labels, cfg.k)


def cmd_fit(cfg: RunConfig) -> int:
    _require(cfg, "method", "dim", "output")
    X, labels = _load_dataset(cfg)
    prep = preprocess_fit(X, cfg.preprocessing())
    Z = DataMatrix(preprocess_apply(prep, X))
    graph = _build_graph(cfg, Z, labels)
    P0 = init_projection(Z.feature_count, cfg.dim, cfg.seed)
    result = fit(Z, graph, cfg.sigma, cfg.adam(), P0)
    write_model(cfg.output, cfg, prep, result)
    print(
        f"final loss {_fmt(result.loss_trace[-1])} after {result.iterations} "
        f"iterations (converged={str(result.converged).lower()}); "
        f"model written to {cfg.output}"
    )
    return EXIT_OK


def cmd_transform(args: argparse.Namespace) -> int:
    label_column = args.label_column if args.label_column is not None else "last"
    header = bool(args.header)
    meta, prep, P = read_model(args.model)
    features, _ = _read_csv_rows(args.data, label_column, header)
    values = features.T
    if values.shape[0] != prep.input_features:
        raise ParseError(
            f"{args.data}: model expects {prep.input_features} features, "
            f"data has {values.shape[0]}"
        )
    embedded = P.values.T @ preprocess_apply(prep, values)
    write_matrix_csv(args.output, embedded)
    print(f"wrote {embedded.shape[1]} embedded samples x {embedded.shape[0]} dims to {args.output}")
    return EXIT_OK


def _write_report(path: str, cfg: RunConfig, grid: GridSpec, result, labels) -> None:
    ok = sum(1 for c in result.cells if c.report is not None)
    failed = len(result.cells) - ok
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(REPORT_MAGIC + "\n")
        fh.write(f"data: {cfg.data}\n")
        fh.write(f"method: {cfg.method}\n")
        fh.write(f"classes: {labels.class_count}\n")
        if labels.original_values is not None:
            joined = ",".join(str(v) for v in labels.original_values)
            fh.write(f"original_labels: {joined}\n")
        fh.write(f"embed_dim: {cfg.dim}\n")
        fh.write(f"train_per_class: {cfg.train_per_class}\n")
        fh.write(f"repeats: {cfg.repeats}\n")
        fh.write(f"seed: {cfg.seed}\n")
        fh.write(f"pca_dim: {'none' if cfg.pca_dim is None else cfg.pca_dim}\n")
        fh.write(f"standardize: {str(cfg.standardize).lower()}\n")
        fh.write(f"alpha: {_fmt(cfg.alpha)}\n")
        fh.write(f"beta1: {_fmt(cfg.beta1)}\n")
        fh.write(f"beta2: {_fmt(cfg.beta2)}\n")
        fh.write(f"epsilon: {_fmt(cfg.epsilon)}\n")
        fh.write(f"tol: {_fmt(cfg.tol)}\n")
        fh.write(f"max_iter: {cfg.max_iter}\n")
        fh.write(f"k_grid: {','.join(str(k) for k in sorted(grid.k_values))}\n")
        fh.write(f"sigma_grid: {','.join(_fmt(s) for s in sorted(grid.sigma_values))}\n")
        fh.write("recall_note: standard = true-class denominators (macro recall); ")
        fh.write("predicted = predicted-class denominators\n")
        fh.write(f"cells: {ok} ok, {failed} failed\n")
        fh.write("\n")
        for cell in result.cells:
            if cell.report is None:
                fh.write(f"[cell] k={cell.k} sigma={_fmt(cell.sigma)} FAILED {cell.error}\n")
                continue
            rep = cell.report
            fh.write(f"[cell] k={cell.k} sigma={_fmt(cell.sigma)}\n")
            for r in range(rep.repeats):
                fh.write(
                    f"  repeat {r}: accuracy={_fmt(rep.accuracies[r])} "
                    f"recall_standard={_fmt(rep.recalls_standard[r])} "
                    f"recall_predicted={_fmt(rep.recalls_predicted[r])} "
                    f"final_loss={_fmt(rep.final_losses[r])} "
                    f"iterations={rep.fit_iterations[r]} "
                    f"converged={str(rep.fit_converged[r]).lower()}\n"
                )
            fh.write(
                f"  mean: accuracy={_fmt(rep.mean_accuracy)} "
                f"recall_standard={_fmt(rep.mean_recall_standard)} "
                f"recall_predicted={_fmt(rep.mean_recall_predicted)}\n"
            )
        fh.write("\n")
        best = result.best
        fh.write(
            f"best: k={best.k} sigma={_fmt(best.sigma)} "
            f"mean_accuracy={_fmt(best.report.mean_accuracy)}\n"
        )


def _grid_csv_path(report_path: str) -> str:
    base, _ = os.path.splitext(report_path)
    return base + ".grid.csv"


def _write_grid_csv(path: str, result) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("k,sigma,mean_accuracy,mean_recall\n")
        for cell in result.cells:
            if cell.report is None:
                continue
            fh.write(
                f"{cell.k},{_fmt(cell.sigma)},{_fmt(cell.report.mean_accuracy)},"
                f"{_fmt(cell.report.mean_recall_standard)}\n"
            )


def cmd_benchmark(cfg: RunConfig) -> int:
    _require(cfg, "method", "dim", "output")
    X, labels = _load_dataset(cfg)
    if labels is None:
        raise MissingLabels("benchmark needs labeled data to score predictions")
    try:
        grid = GridSpec(
            k_values=cfg.k_grid or GridSpec().k_values,
            sigma_values=cfg.sigma_grid or GridSpec().sigma_values,
        )
        split = SplitSpec(cfg.train_per_class, cfg.repeats, cfg.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    result = grid_search(
        X,
        labels,
        cfg.method,
        cfg.dim,
        grid,
        split,
        cfg.preprocessing(),
        cfg.adam(),
        jobs=cfg.jobs,
    )
    _write_report(cfg.output, cfg, grid, result, labels)
    _write_grid_csv(_grid_csv_path(cfg.output), result)
    best = result.best
    print(
        f"best cell: k={best.k} sigma={_fmt(best.sigma)} "
        f"mean_accuracy={_fmt(best.report.mean_accuracy)}; "
        f"report written to {cfg.output}"
    )
    return EXIT_OK


def cmd_gradcheck(cfg: RunConfig, corrupt: float = 0.0) -> int:
    _require(cfg, "method", "dim")
    X, labels = _load_dataset(cfg)
    if cfg.method in SUPERVISED_METHODS and labels is None:
        raise MissingLabels(f"method {cfg.method} needs labels")
    if X.sample_count > GRADCHECK_WARN_N:
        print(
            f"warning: n={X.sample_count} makes the finite-difference probe "
            f"O(n^2) per entry; expect a wait",
            file=sys.stderr,
        )
    prep = preprocess_fit(X, cfg.preprocessing())
    Z = DataMatrix(preprocess_apply(prep, X))
    graph = _build_graph(cfg, Z, labels)
    P0 = init_projection(Z.feature_count, cfg.dim, cfg.seed)
    analytic = gradient(P0, Z, graph, cfg.sigma)
    if corrupt:
        analytic = analytic + corrupt
    reference = finite_diff_gradient(P0, Z, graph, cfg.sigma)
    disagreement = gradient_disagreement(analytic, reference)
    passed = disagreement < GRADCHECK_TOL
    print(
        f"max relative gradient disagreement: {_fmt(disagreement)} "
        f"(threshold {_fmt(GRADCHECK_TOL)}): {'PASS' if passed else 'FAIL'}"
    )
    return EXIT_OK if passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# argument parsing


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("data", help="CSV data file, one sample per row")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--method", choices=("u-cl", "s-cl1", "s-cl2"))
    p.add_argument("--dim", type=int, help="embedding dimension d")
    p.add_argument("--k", type=int, help="neighbor count for u-cl / s-cl2")
    p.add_argument("--sigma", type=float, help="loss temperature")
    p.add_argument(
        "--pca-dim", dest="pca_dim", type=_parse_pca_dim,
        help="PCA pre-reduction target ('none' to disable)",
    )
    p.add_argument(
        "--standardize", dest="standardize",
        action=argparse.BooleanOptionalAction, default=None,
        help="per-feature standardization after PCA (default on)",
    )
    p.add_argument("--seed", type=int, help=f"master seed (env {SEED_ENV_VAR} overrides the default)")
    p.add_argument(
        "--label-column", dest="label_column", type=_parse_label_column,
        help="'last' (default), 'none', or a 0-based column index",
    )
    p.add_argument(
        "--header", action=argparse.BooleanOptionalAction, default=None,
        help="first CSV row is a header",
    )
    p.add_argument("--alpha", type=float, help="Adam learning rate")
    p.add_argument("--beta1", type=float)
    p.add_argument("--beta2", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--tol", type=float, help="absolute loss-change convergence tolerance")
    p.add_argument("--max-iter", dest="max_iter", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clfe",
        description="Linear feature extraction by contrastive learning on sample graphs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="learn a projection and write a model file")
    _add_common_flags(p_fit)
    p_fit.add_argument("--output", help="model file path")

    p_tr = sub.add_parser("transform", help="embed a data file with a fitted model")
    p_tr.add_argument("model", help="model file from 'fit'")
    p_tr.add_argument("data", help="CSV data file, one sample per row")
    p_tr.add_argument("--output", required=True, help="embedded CSV path")
    p_tr.add_argument(
        "--label-column", dest="label_column", type=_parse_label_column, default=None
    )
    p_tr.add_argument("--header", action=argparse.BooleanOptionalAction, default=None)

    p_bm = sub.add_parser("benchmark", help="repeated-split 1-NN benchmark with grid search")
    _add_common_flags(p_bm)
    p_bm.add_argument("--output", help="report file path (grid CSV written alongside)")
    p_bm.add_argument("--repeats", type=int, help="number of random splits")
    p_bm.add_argument(
        "--train-per-class", dest="train_per_class", type=int,
        help="training samples drawn per class",
    )
    p_bm.add_argument("--jobs", type=int, help="parallel workers for grid cells")
    p_bm.add_argument(
        "--k-grid", dest="k_grid", type=_parse_int_list,
        help="comma-separated k values (default 2,4,6,8,10)",
    )
    p_bm.add_argument(
        "--sigma-grid", dest="sigma_grid", type=_parse_float_list,
        help="comma-separated sigma values (default 0.01,0.1,1,10,100,1000)",
    )

    p_gc = sub.add_parser("gradcheck", help="compare analytic and finite-difference gradients")
    _add_common_flags(p_gc)
    p_gc.add_argument(
        "--corrupt-gradient", dest="corrupt_gradient", type=float, default=0.0,
        help=argparse.SUPPRESS,  # test harness hook
    )

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "transform":
            return cmd_transform(args)
        cfg = resolve_config(args)
        if args.command == "fit":
            return cmd_fit(cfg)
        if args.command == "benchmark":
            return cmd_benchmark(cfg)
        return cmd_gradcheck(cfg, corrupt=args.corrupt_gradient)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ClfeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
