import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mofs.data import Split
from mofs.objectives import (
    DIRECTIONS,
    OBJECTIVE_NAMES,
    balanced_accuracy,
    equalised_odds,
    evaluate_candidate,
    f1,
    statistical_parity,
    vif_score,
)
from tests.conftest import make_dataset


def test_direction_vector_shape():
    assert len(DIRECTIONS) == len(OBJECTIVE_NAMES) == 6
    assert DIRECTIONS[OBJECTIVE_NAMES.index("subset_size")] == "min"
    assert DIRECTIONS[OBJECTIVE_NAMES.index("vif")] == "min"
    assert DIRECTIONS.count("max") == 4


# -- balanced accuracy / F1 -------------------------------------------------


def test_balanced_accuracy_perfect():
    y = np.array([0, 1, 0, 1])
    assert balanced_accuracy(y, y) == 1.0


def test_balanced_accuracy_constant_predictor():
    y = np.array([0, 0, 1, 1])
    assert balanced_accuracy(y, np.ones(4, dtype=int)) == 0.5


def test_balanced_accuracy_hand_count():
    # recalls: class0 = 1/2, class1 = 2/2
    assert balanced_accuracy(np.array([0, 0, 1, 1]), np.array([0, 1, 1, 1])) == 0.75


def test_balanced_accuracy_single_class_errors():
    with pytest.raises(ValueError):
        balanced_accuracy(np.zeros(3, dtype=int), np.zeros(3, dtype=int))


def test_f1_equal_precision_recall():
    # P = R = 0.8: 8 true positives, 2 false positives, 2 false negatives
    y_true = np.array([1] * 10 + [0] * 10)
    y_pred = np.array([1] * 8 + [0] * 2 + [1] * 2 + [0] * 8)
    assert f1(y_true, y_pred) == pytest.approx(0.8)


def test_f1_no_positive_predictions():
    assert f1(np.array([1, 1, 0]), np.zeros(3, dtype=int)) == 0.0


def test_f1_hand_computation():
    # P = 1, R = 0.5 -> 2*1*0.5/1.5 = 2/3
    assert f1(np.array([1, 1, 0]), np.array([1, 0, 0])) == pytest.approx(2 / 3)


# -- VIF ----------------------------------------------------------------------


def test_vif_singleton_is_zero(perfect_ds):
    assert vif_score(perfect_ds, np.array([3])) == 0.0


def test_vif_duplicated_column_hits_cap():
    x = np.random.default_rng(0).normal(size=(50, 2))
    x = np.column_stack([x[:, 0], x[:, 0], x[:, 1]])
    ds = make_dataset(x, [0, 1] * 25, [0, 1] * 25)
    assert vif_score(ds, np.array([0, 1])) == 10.0


def test_vif_orthogonal_columns_near_zero():
    # Exactly orthogonal standardized columns: R^2 = 0 by construction.
    n = 64
    t = np.arange(n)
    a = np.where(t % 2 == 0, 1.0, -1.0)
    b = np.where(t % 4 < 2, 1.0, -1.0)
    assert abs(float(a @ b)) < 1e-12
    ds = make_dataset(np.column_stack([a, b]), [0, 1] * 32, [0, 1] * 32)
    got = vif_score(ds, np.array([0, 1]))
    # brute-force least-squares oracle
    design = np.column_stack([np.ones(n), b])
    coef, *_ = np.linalg.lstsq(design, a, rcond=None)
    sse = float(((a - design @ coef) ** 2).sum())
    sst = float(((a - a.mean()) ** 2).sum())
    r2 = 1 - sse / sst
    assert got == pytest.approx(r2 / (1 - r2), abs=1e-9)
    assert got == pytest.approx(0.0, abs=1e-9)


def test_vif_scale_invariance():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(60, 4))
    x[:, 1] = 0.7 * x[:, 0] + 0.4 * rng.normal(size=60)
    ds_a = make_dataset(x, [0, 1] * 30, [0, 1] * 30)
    scaled = x.copy()
    scaled[:, 0] = 250.0 * scaled[:, 0] - 3.0
    ds_b = make_dataset(scaled, [0, 1] * 30, [0, 1] * 30)
    cols = np.array([0, 1, 2, 3])
    assert vif_score(ds_a, cols) == pytest.approx(vif_score(ds_b, cols), abs=1e-6)


# -- fairness -----------------------------------------------------------------


def test_statistical_parity_equal_rates():
    y_pred = np.array([1, 0, 1, 0])
    groups = np.array([0, 0, 1, 1])
    assert statistical_parity(y_pred, groups) == 1.0


def test_statistical_parity_ratio():
    # group 0 rate 0.4, group 1 rate 0.8
    y_pred = np.array([1, 1, 0, 0, 0] + [1, 1, 1, 1, 0])
    groups = np.array([0] * 5 + [1] * 5)
    assert statistical_parity(y_pred, groups) == pytest.approx(0.5)


def test_statistical_parity_no_positives():
    assert statistical_parity(np.zeros(4, dtype=int), np.array([0, 0, 1, 1])) == 1.0


def test_statistical_parity_single_group_errors():
    with pytest.raises(ValueError):
        statistical_parity(np.array([1, 0]), np.array([0, 0]))


def test_equalised_odds_identical_confusions():
    y_true = np.array([1, 1, 0, 0] * 2)
    y_pred = np.array([1, 0, 0, 1] * 2)
    groups = np.array([0] * 4 + [1] * 4)
    assert equalised_odds(y_true, y_pred, groups) == 1.0


def test_equalised_odds_tpr_gap():
    # TPRs 0.5 vs 1.0, TNRs 1.0 vs 1.0 -> min ratio 0.5
    y_true = np.array([1, 1, 0, 0] + [1, 1, 0, 0])
    y_pred = np.array([1, 0, 0, 0] + [1, 1, 0, 0])
    groups = np.array([0] * 4 + [1] * 4)
    assert equalised_odds(y_true, y_pred, groups) == pytest.approx(0.5)


def test_equalised_odds_eight_row_fixture_matches_bruteforce():
    y_true = np.array([1, 0, 1, 0, 1, 1, 0, 0])
    y_pred = np.array([1, 1, 0, 0, 1, 0, 1, 0])
    groups = np.array([0, 0, 0, 0, 1, 1, 1, 1])
    # brute-force per-group confusion matrices
    rates = {}
    for g in (0, 1):
        sel = groups == g
        tp = int(((y_true == 1) & (y_pred == 1) & sel).sum())
        fn = int(((y_true == 1) & (y_pred == 0) & sel).sum())
        tn = int(((y_true == 0) & (y_pred == 0) & sel).sum())
        fp = int(((y_true == 0) & (y_pred == 1) & sel).sum())
        rates[g] = (tp / (tp + fn), tn / (tn + fp))
    tpr_ratio = min(rates[0][0], rates[1][0]) / max(rates[0][0], rates[1][0])
    tnr_ratio = min(rates[0][1], rates[1][1]) / max(rates[0][1], rates[1][1])
    expected = min(tpr_ratio, tnr_ratio)
    assert equalised_odds(y_true, y_pred, groups) == pytest.approx(expected, abs=1e-12)


def test_equalised_odds_skips_undefined_group_rates():
    # group 1 has no ground-truth positives: its TPR is skipped, leaving a
    # single defined TPR -> that ratio is neutral; TNR still compares.
    y_true = np.array([1, 0, 0, 0])
    y_pred = np.array([1, 0, 0, 1])
    groups = np.array([0, 0, 1, 1])
    # TNRs: group0 = 1.0, group1 = 0.5 -> 0.5
    assert equalised_odds(y_true, y_pred, groups) == pytest.approx(0.5)


@settings(deadline=None, max_examples=50)
@given(st.integers(0, 10_000))
def test_fairness_invariant_under_group_relabeling(seed):
    rng = np.random.default_rng(seed)
    n = 40
    y_true = rng.integers(0, 2, n)
    y_pred = rng.integers(0, 2, n)
    groups = rng.integers(0, 3, n)
    if len(np.unique(groups)) < 2 or len(np.unique(y_true)) < 2:
        return
    relabeled = 7 - groups  # bijective relabeling
    assert statistical_parity(y_pred, groups) == statistical_parity(y_pred, relabeled)
    assert equalised_odds(y_true, y_pred, groups) == equalised_odds(y_true, y_pred, relabeled)


# -- candidate evaluation ------------------------------------------------------


def test_evaluate_singleton(perfect_ds, perfect_split):
    mask = np.zeros(perfect_ds.n_features, dtype=bool)
    mask[0] = True
    ov = evaluate_candidate(perfect_ds, perfect_split, mask, "nb", seed=0)
    assert ov.subset_size == 1
    assert ov.vif == 0.0
    assert ov.balanced_accuracy == 1.0


def test_evaluate_deterministic(perfect_ds, perfect_split):
    mask = np.zeros(perfect_ds.n_features, dtype=bool)
    mask[[0, 2, 5]] = True
    a = evaluate_candidate(perfect_ds, perfect_split, mask, "lr", seed=4)
    b = evaluate_candidate(perfect_ds, perfect_split, mask, "lr", seed=4)
    assert a == b


def test_evaluate_bounded_objectives(perfect_ds, perfect_split):
    rng = np.random.default_rng(0)
    for _ in range(5):
        mask = rng.random(perfect_ds.n_features) < 0.4
        if not mask.any():
            mask[0] = True
        ov = evaluate_candidate(perfect_ds, perfect_split, mask, "nb", seed=0)
        arr = ov.as_array()
        assert ov.subset_size == mask.sum()
        for name in ("balanced_accuracy", "f1_score", "statistical_parity", "equalised_odds"):
            v = arr[OBJECTIVE_NAMES.index(name)]
            assert 0.0 <= v <= 1.0
        assert 0.0 <= ov.vif <= 10.0


def test_evaluate_invariant_to_test_row_permutation(perfect_ds, perfect_split):
    mask = np.zeros(perfect_ds.n_features, dtype=bool)
    mask[[1, 3]] = True
    permuted = Split(
        train_indices=perfect_split.train_indices.copy(),
        test_indices=np.random.default_rng(9).permutation(perfect_split.test_indices),
        test_fraction=perfect_split.test_fraction,
        seed=perfect_split.seed,
    )
    a = evaluate_candidate(perfect_ds, perfect_split, mask, "nb", seed=0)
    b = evaluate_candidate(perfect_ds, permuted, mask, "nb", seed=0)
    assert a == b


def test_evaluate_empty_mask_rejected(perfect_ds, perfect_split):
    with pytest.raises(ValueError):
        evaluate_candidate(perfect_ds, perfect_split, np.zeros(10, dtype=bool), "nb")
