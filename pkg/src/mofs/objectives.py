"""The six objectives a feature subset is scored on.

Subset size and multicollinearity are filter objectives computed from the data
alone; balanced accuracy, F1, statistical parity and equalised odds are wrapper
objectives measured on a trained classifier's test-partition predictions. Both
fairness scores are min/max ratios where 1 means perfectly fair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mofs.data import Dataset, Split
from mofs.models import train, predict

OBJECTIVE_NAMES = (
    "subset_size",
    "balanced_accuracy",
    "f1_score",
    "vif",
    "statistical_parity",
    "equalised_odds",
)

# Optimization direction per objective, fixed order matching OBJECTIVE_NAMES.
DIRECTIONS = ("min", "max", "max", "min", "max", "max")

DEFAULT_VIF_CAP = 10.0
_EPS = 1e-12


@dataclass(frozen=True)
class ObjectiveVector:
    subset_size: int
    balanced_accuracy: float
    f1_score: float
    vif: float
    statistical_parity: float
    equalised_odds: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [
                self.subset_size,
                self.balanced_accuracy,
                self.f1_score,
                self.vif,
                self.statistical_parity,
                self.equalised_odds,
            ],
            dtype=float,
        )

    def as_dict(self) -> dict:
        return {
            "subset_size": int(self.subset_size),
            "balanced_accuracy": self.balanced_accuracy,
            "f1_score": self.f1_score,
            "vif": self.vif,
            "statistical_parity": self.statistical_parity,
            "equalised_odds": self.equalised_odds,
        }


def balanced_accuracy(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Mean of per-class recalls."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape or y_true.size == 0:
        raise ValueError("label vectors must be non-empty and equal length")
    recalls = []
    for cls in (0, 1):
        mask = y_true == cls
        if not mask.any():
            raise ValueError("balanced accuracy needs both classes in y_true")
        recalls.append((y_pred[mask] == cls).mean())
    return float(np.mean(recalls))


def f1(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """F1 on the positive class; 0 when precision+recall is 0."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise ValueError("label vectors must be equal length")
    tp = int(((y_true == 1) & (y_pred == 1)).sum())
    fp = int(((y_true == 0) & (y_pred == 1)).sum())
    fn = int(((y_true == 1) & (y_pred == 0)).sum())
    if 2 * tp + fp + fn == 0:
        return 0.0
    return 2 * tp / (2 * tp + fp + fn)


def _r_squared(y: np.ndarray, others: np.ndarray) -> float:
    sst = float(((y - y.mean()) ** 2).sum())
    if sst < _EPS:
        return 0.0
    design = np.column_stack([np.ones(len(y)), others])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = y - design @ coef
    r2 = 1.0 - float((residual**2).sum()) / sst
    return float(np.clip(r2, 0.0, 1.0))


def vif_score(
    ds: Dataset,
    columns: np.ndarray,
    cap: float = DEFAULT_VIF_CAP,
    rows: np.ndarray | None = None,
) -> float:
    """Mean excess variance-inflation factor (VIF_j - 1) over the selected columns.

    Each selected column is regressed (least squares with intercept) on the
    other selected columns; the excess factor R2/(1-R2) is averaged and clamped
    to cap. Perfect collinearity contributes the cap itself. A singleton subset
    has nothing to regress on and scores 0.
    """
    columns = np.asarray(columns, dtype=int)
    if columns.size == 0:
        raise ValueError("empty column set")
    if columns.size == 1:
        return 0.0
    x = ds.features[:, columns] if rows is None else ds.features[np.ix_(rows, columns)]
    contributions = []
    for j in range(columns.size):
        others = np.delete(np.arange(columns.size), j)
        r2 = _r_squared(x[:, j], x[:, others])
        if 1.0 - r2 <= _EPS:
            contributions.append(cap)
        else:
            contributions.append(r2 / (1.0 - r2))
    return float(min(np.mean(contributions), cap))


def statistical_parity(y_pred: np.ndarray, groups: np.ndarray) -> float:
    """Disparate-impact ratio: min over groups of the positive-prediction rate
    divided by the max. 1 means group-independent predictions; if no group
    receives positives the predictions are trivially parity-fair (1)."""
    y_pred = np.asarray(y_pred)
    groups = np.asarray(groups)
    ids = np.unique(groups)
    if len(ids) < 2:
        raise ValueError("statistical parity needs at least 2 groups")
    rates = np.array([(y_pred[groups == g] == 1).mean() for g in ids])
    if rates.max() == 0.0:
        return 1.0
    return float(rates.min() / rates.max())


def _rate_ratio(rates: list[float]) -> float | None:
    if len(rates) < 2:
        return None
    hi = max(rates)
    if hi == 0.0:
        return 1.0
    return min(rates) / hi


def equalised_odds(y_true: np.ndarray, y_pred: np.ndarray, groups: np.ndarray) -> float:
    """min(TPR ratio, TNR ratio) across groups; 1 means equal odds.

    A group with no ground-truth positives (negatives) has an undefined TPR
    (TNR) and is skipped for that rate; a rate with fewer than two defined
    groups is neutral, so with no comparable rates at all the score is 1.
    """
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    groups = np.asarray(groups)
    ids = np.unique(groups)
    if len(ids) < 2:
        raise ValueError("equalised odds needs at least 2 groups")
    tprs, tnrs = [], []
    for g in ids:
        sel = groups == g
        pos = sel & (y_true == 1)
        neg = sel & (y_true == 0)
        if pos.any():
            tprs.append(float((y_pred[pos] == 1).mean()))
        if neg.any():
            tnrs.append(float((y_pred[neg] == 0).mean()))
    ratios = [r for r in (_rate_ratio(tprs), _rate_ratio(tnrs)) if r is not None]
    if not ratios:
        return 1.0
    return float(min(ratios))


def evaluate_candidate(
    ds: Dataset,
    split: Split,
    candidate,
    kind: str,
    seed: int = 0,
    vif_cap: float = DEFAULT_VIF_CAP,
) -> ObjectiveVector:
    """Score one feature mask: train on the train partition, measure wrapper
    objectives on the test partition and VIF on the train partition."""
    mask = np.asarray(getattr(candidate, "mask", candidate), dtype=bool)
    columns = np.flatnonzero(mask)
    if columns.size == 0:
        raise ValueError("candidate selects no features")
    model = train(ds, split, columns, kind, seed)
    y_pred = predict(model, ds, split.test_indices)
    y_true = ds.target[split.test_indices]
    test_groups = ds.sensitive_groups[split.test_indices]
    return ObjectiveVector(
        subset_size=int(columns.size),
        balanced_accuracy=balanced_accuracy(y_true, y_pred),
        f1_score=f1(y_true, y_pred),
        vif=vif_score(ds, columns, cap=vif_cap, rows=split.train_indices),
        statistical_parity=statistical_parity(y_pred, test_groups),
        equalised_odds=equalised_odds(y_true, y_pred, test_groups),
    )
