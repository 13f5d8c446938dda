"""Wrapper classifiers scored by the search: Naive Bayes and logistic regression.

Both are deliberately dependency-free and deterministic. NB mixes Gaussian
likelihoods for numeric columns with add-1 smoothed frequency tables for
categorical ones. LR is full-batch gradient descent on standardized inputs with
step halving, so its loss trace is non-increasing by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from mofs.data import Dataset, Split

VARIANCE_FLOOR = 1e-9
LR_LEARNING_RATE = 0.1
LR_MAX_ITER = 500
LR_GRAD_TOL = 1e-6
_EPS = 1e-12


class ModelTrainingError(RuntimeError):
    pass


@dataclass
class TrainedModel:
    """Fitted classifier over a fixed subset of dataset columns."""

    kind: str  # "nb" | "lr"
    n_features_total: int
    selected_columns: np.ndarray
    parameters: dict
    loss_trace: list[float] = field(default_factory=list)

    def positive_score(self, x: np.ndarray) -> np.ndarray:
        """P(class 1) for rows of x given in selected-column space."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.kind == "lr":
            return _lr_scores(self.parameters, x)
        return _nb_posteriors(self.parameters, x)[:, 1]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _lr_scores(params: dict, x: np.ndarray) -> np.ndarray:
    mean = np.asarray(params["standardize_mean"])
    std = np.asarray(params["standardize_std"])
    w = np.asarray(params["weights"])
    xs = (x - mean) / std
    return _sigmoid(xs @ w + params["intercept"])


def _train_lr(x: np.ndarray, y: np.ndarray) -> dict:
    """Full-batch gradient descent on mean cross-entropy.

    A proposed step that raises the loss halves the step size and is retried;
    accepted losses are therefore monotone non-increasing. A non-finite loss
    triggers one full restart at a tenth of the step size.
    """
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    std = np.where(std < _EPS, 1.0, std)
    xs = (x - mean) / std
    n, k = xs.shape

    def loss_from(p):
        p = np.clip(p, _EPS, 1.0 - _EPS)
        return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))

    def descend(step0):
        w = np.zeros(k)
        b = 0.0
        step = step0
        p = _sigmoid(xs @ w + b)
        cur = loss_from(p)
        trace = [cur]
        for _ in range(LR_MAX_ITER):
            err = p - y
            gw = xs.T @ err / n
            gb = float(err.mean())
            gnorm = float(np.sqrt(gw @ gw + gb * gb))
            if gnorm < LR_GRAD_TOL:
                break
            cand_w = w - step * gw
            cand_b = b - step * gb
            cand_p = _sigmoid(xs @ cand_w + cand_b)
            cand = loss_from(cand_p)
            if not np.isfinite(cand):
                return None, trace
            if cand > cur:
                step /= 2.0
                continue
            w, b, cur, p = cand_w, cand_b, cand, cand_p
            trace.append(cur)
        return (w, b), trace

    result, trace = descend(LR_LEARNING_RATE)
    if result is None:
        result, trace = descend(LR_LEARNING_RATE / 10.0)
        if result is None:
            raise ModelTrainingError("logistic regression diverged after step rescale")
    w, b = result
    if not np.all(np.isfinite(w)) or not np.isfinite(b):
        raise ModelTrainingError("non-finite logistic regression weights")
    return {
        "weights": w,
        "intercept": b,
        "standardize_mean": mean,
        "standardize_std": std,
        "loss_trace": trace,
    }


def _train_nb(x: np.ndarray, y: np.ndarray, kinds: list[str]) -> dict:
    classes = (0, 1)
    n = len(y)
    priors = np.array([(y == c).sum() / n for c in classes])
    numeric = [j for j, kind in enumerate(kinds) if kind == "numeric"]
    categorical = [j for j, kind in enumerate(kinds) if kind == "categorical"]

    means = np.zeros((2, len(numeric)))
    variances = np.ones((2, len(numeric)))
    for ci, c in enumerate(classes):
        xc = x[y == c][:, numeric] if numeric else np.empty((0, 0))
        if numeric:
            means[ci] = xc.mean(axis=0)
            variances[ci] = np.maximum(xc.var(axis=0), VARIANCE_FLOOR)

    # Per categorical column: category universe from training rows, add-1 counts.
    tables = []
    class_counts = np.array([(y == c).sum() for c in classes], dtype=float)
    for j in categorical:
        cats = np.unique(x[:, j])
        probs = np.zeros((2, len(cats)))
        for ci, c in enumerate(classes):
            col = x[y == c][:, j]
            counts = np.array([(col == cat).sum() for cat in cats], dtype=float)
            probs[ci] = (counts + 1.0) / (len(col) + len(cats))
        tables.append({"column": j, "categories": cats, "probs": probs})

    return {
        "priors": priors,
        "class_counts": class_counts,
        "numeric_columns": numeric,
        "means": means,
        "variances": variances,
        "categorical_tables": tables,
    }


def _nb_posteriors(params: dict, x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    log_joint = np.tile(np.log(params["priors"]), (n, 1))
    numeric = params["numeric_columns"]
    if numeric:
        xv = x[:, numeric]
        for ci in range(2):
            mu = params["means"][ci]
            var = params["variances"][ci]
            log_joint[:, ci] += np.sum(
                -0.5 * np.log(2 * np.pi * var) - (xv - mu) ** 2 / (2 * var), axis=1
            )
    for table in params["categorical_tables"]:
        col = x[:, table["column"]]
        cats = table["categories"]
        # Unseen categories get the zero-count smoothed mass.
        pos = np.searchsorted(cats, col)
        pos = np.clip(pos, 0, len(cats) - 1)
        known = cats[pos] == col
        for ci in range(2):
            row = table["probs"][ci][pos]
            unseen = 1.0 / (params["class_counts"][ci] + len(cats))
            like = np.where(known, row, unseen)
            log_joint[:, ci] += np.log(like)
    # Normalize in log space for stable posteriors.
    shift = log_joint.max(axis=1, keepdims=True)
    joint = np.exp(log_joint - shift)
    return joint / joint.sum(axis=1, keepdims=True)


def train(
    ds: Dataset,
    split: Split,
    columns: np.ndarray,
    kind: str,
    seed: int = 0,
) -> TrainedModel:
    """Fit a classifier of the given kind on the train partition, restricted to columns."""
    columns = np.asarray(columns, dtype=int)
    if columns.size == 0:
        raise ValueError("empty column set")
    if columns.max() >= ds.n_features or columns.min() < 0:
        raise IndexError("column index out of range")
    if kind not in ("nb", "lr"):
        raise ValueError(f"unknown classifier kind {kind!r}")

    x = ds.features[np.ix_(split.train_indices, columns)]
    y = ds.target[split.train_indices]
    if len(np.unique(y)) < 2:
        raise ValueError("training partition contains a single class")

    if kind == "lr":
        params = _train_lr(x, y)
        trace = params.pop("loss_trace")
    else:
        kinds = [ds.column_kinds[j] for j in columns]
        params = _train_nb(x, y, kinds)
        trace = []
    return TrainedModel(
        kind=kind,
        n_features_total=ds.n_features,
        selected_columns=columns,
        parameters=params,
        loss_trace=trace,
    )


def predict(model: TrainedModel, ds: Dataset, rows: np.ndarray) -> np.ndarray:
    """Hard 0/1 labels; LR thresholds sigmoid at 0.5 (ties to 1), NB argmax (ties to 0)."""
    if ds.n_features != model.n_features_total:
        raise ValueError("dataset incompatible with model (different feature count)")
    x = ds.features[np.ix_(np.asarray(rows, dtype=int), model.selected_columns)]
    if model.kind == "lr":
        return (model.positive_score(x) >= 0.5).astype(int)
    post = _nb_posteriors(model.parameters, x)
    return (post[:, 1] > post[:, 0]).astype(int)
