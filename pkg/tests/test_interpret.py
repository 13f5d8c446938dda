import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mofs.data import stratified_split
from mofs.interpret import (
    WeightVector,
    build_report,
    cluster_solutions,
    compare_weight_schemes,
    compute_weights,
    feature_contribution,
    feature_frequency,
    objective_matrix,
    topsis_rank,
)
from mofs.models import train
from mofs.nsga3 import Candidate, GAConfig, SolutionSet, run_search
from mofs.objectives import DIRECTIONS, OBJECTIVE_NAMES, ObjectiveVector
from tests.conftest import make_dataset


def solution_set(vectors, m=8):
    sols = []
    for i, v in enumerate(vectors):
        mask = np.zeros(m, dtype=bool)
        size = int(v[0])
        mask[[j % m for j in range(i, i + size)]] = True
        sols.append(Candidate(mask=mask, objectives=ObjectiveVector(*v)))
    return SolutionSet(solutions=sols, provenance={"config": {"n_features": m}}, evaluation_count=0)


# -- objective matrix -----------------------------------------------------------


def test_objective_matrix_shape_and_cap():
    vs = [[3, 0.6, 0.5, 25.0, 0.9, 0.8], [1, 0.5, 0.4, 0.0, 1.0, 1.0]]
    ss = solution_set(vs)
    m = objective_matrix(ss, vif_cap=10.0)
    assert m.shape == (2, 6)
    assert m[0, OBJECTIVE_NAMES.index("vif")] == 10.0


def test_objective_matrix_empty_errors():
    ss = SolutionSet(solutions=[], provenance={}, evaluation_count=0)
    with pytest.raises(ValueError):
        objective_matrix(ss)


# -- clustering -----------------------------------------------------------------


def test_cluster_k1_single_cluster():
    vs = [[i + 1, 0.5, 0.5, 1.0, 0.5, 0.5] for i in range(5)]
    ca = cluster_solutions(np.array(vs, dtype=float), k=1, seed=0)
    assert set(ca.cluster_ids.tolist()) == {0}
    assert np.allclose(ca.centroids, 0.0, atol=1e-9)  # standardized space


def test_cluster_two_blobs_pure():
    rng = np.random.default_rng(0)
    a = np.array([2, 0.9, 0.9, 0.1, 0.9, 0.9]) + rng.normal(scale=0.01, size=(10, 6))
    b = np.array([15, 0.2, 0.2, 8.0, 0.2, 0.2]) + rng.normal(scale=0.01, size=(10, 6))
    ca = cluster_solutions(np.vstack([a, b]), k=2, seed=1)
    first, second = ca.cluster_ids[:10], ca.cluster_ids[10:]
    assert len(set(first.tolist())) == 1
    assert len(set(second.tolist())) == 1
    assert first[0] != second[0]


def test_cluster_auto_picks_elbow_on_three_blobs():
    # Equidistant blob centers: merging any two at k=2 leaves a large residual,
    # so the curve's sharpest bend sits at k=3.
    rng = np.random.default_rng(3)
    blobs = []
    for center in ([0, 0, 1, 1, 1, 1], [10, 0, 1, 1, 1, 1], [5, 8.66, 1, 1, 1, 1]):
        blobs.append(np.array(center, dtype=float) + rng.normal(scale=0.05, size=(8, 6)))
    ca = cluster_solutions(np.vstack(blobs), k="auto", seed=0)
    assert ca.chosen_k == 3


def test_wcss_curve_non_increasing():
    rng = np.random.default_rng(5)
    matrix = rng.random((30, 6)) * [10, 1, 1, 5, 1, 1]
    ca = cluster_solutions(matrix, k=3, seed=2)
    diffs = np.diff(ca.wcss_by_k)
    assert (diffs <= 1e-9).all()


def test_collinear_matrix_first_component_explains_everything():
    t = np.linspace(0, 1, 12)
    matrix = np.column_stack([3 * t + 1, 2 * t, -t + 5, t, 4 * t, t * 0.5])
    ca = cluster_solutions(matrix, k=1, seed=0)
    total = ca.explained_variance.sum()
    assert ca.explained_variance[0] == pytest.approx(total, rel=1e-9)


def test_pca_top2_optimal_against_full_eigendecomposition():
    rng = np.random.default_rng(8)
    matrix = rng.random((40, 6)) * [12, 1, 1, 9, 1, 1]
    ca = cluster_solutions(matrix, k=2, seed=0)
    x = (matrix - matrix.mean(0)) / matrix.std(0)
    eigvals = np.linalg.eigvalsh(np.cov(x, rowvar=False))
    top2 = np.sort(eigvals)[::-1][:2].sum()
    assert ca.explained_variance.sum() == pytest.approx(top2, rel=1e-9)


def test_pca_sign_convention():
    rng = np.random.default_rng(9)
    matrix = rng.random((20, 6))
    ca = cluster_solutions(matrix, k=1, seed=0)
    for comp in ca.pca_components:
        j = int(np.argmax(np.abs(comp)))
        assert comp[j] > 0


def test_cluster_more_clusters_than_points_errors():
    with pytest.raises(ValueError):
        cluster_solutions(np.ones((2, 6)), k=5, seed=0)


def test_cluster_deterministic():
    rng = np.random.default_rng(11)
    matrix = rng.random((25, 6))
    a = cluster_solutions(matrix, k="auto", seed=4)
    b = cluster_solutions(matrix, k="auto", seed=4)
    assert np.array_equal(a.cluster_ids, b.cluster_ids)
    assert np.array_equal(a.pca_coords, b.pca_coords)


# -- weights ----------------------------------------------------------------------


def test_equal_weights():
    wv = compute_weights(np.ones((3, 6)), DIRECTIONS, "equal")
    assert np.allclose(wv.weights, 1 / 6)


def test_rstd_constant_column_gets_zero_weight():
    rng = np.random.default_rng(0)
    matrix = rng.random((10, 6))
    matrix[:, 2] = 0.7
    wv = compute_weights(matrix, DIRECTIONS, "rstd")
    assert wv.weights[2] == 0.0
    assert wv.weights.sum() == pytest.approx(1.0)


def test_entropy_constant_column_gets_zero_weight():
    rng = np.random.default_rng(1)
    matrix = rng.random((12, 6))
    matrix[:, 4] = 0.3
    wv = compute_weights(matrix, DIRECTIONS, "entropy")
    assert wv.weights[4] == pytest.approx(0.0, abs=1e-9)


def test_weights_all_constant_matrix_errors():
    for scheme in ("rstd", "entropy"):
        with pytest.raises(ValueError):
            compute_weights(np.ones((5, 6)), DIRECTIONS, scheme)


def test_custom_weights_normalized():
    wv = compute_weights(np.ones((2, 6)), DIRECTIONS, "custom", custom=np.array([2, 2, 2, 2, 2, 2.0]))
    assert np.allclose(wv.weights, 1 / 6)


def test_custom_weights_validation():
    with pytest.raises(ValueError):
        compute_weights(np.ones((2, 6)), DIRECTIONS, "custom", custom=np.array([1, -1, 0, 0, 0, 0.0]))
    with pytest.raises(ValueError):
        compute_weights(np.ones((2, 6)), DIRECTIONS, "custom", custom=np.zeros(6))


def test_rank_of_objectives_descending():
    rng = np.random.default_rng(2)
    matrix = rng.random((15, 6)) * [10, 1, 1, 8, 1, 1]
    wv = compute_weights(matrix, DIRECTIONS, "rstd")
    values = dict(zip(OBJECTIVE_NAMES, wv.weights))
    ordered = [values[name] for name in wv.rank_of_objectives]
    assert ordered == sorted(ordered, reverse=True)


# -- TOPSIS ------------------------------------------------------------------------


def test_topsis_dominant_solution_scores_one():
    matrix = np.array(
        [
            [1, 0.9, 0.9, 0.0, 1.0, 1.0],
            [5, 0.6, 0.5, 2.0, 0.8, 0.7],
            [9, 0.4, 0.3, 5.0, 0.6, 0.5],
        ],
        dtype=float,
    )
    r = topsis_rank(matrix, DIRECTIONS, compute_weights(matrix, DIRECTIONS, "equal"))
    assert r.rank[0] == 1
    assert r.ps[0] == pytest.approx(1.0)


def test_topsis_symmetric_pair():
    matrix = np.array([[1.0, 0.0], [0.0, 1.0]])
    wv = WeightVector("custom", np.array([0.5, 0.5]), ["col0", "col1"])
    r = topsis_rank(matrix, ("max", "max"), wv)
    assert r.ps[0] == pytest.approx(0.5)
    assert r.ps[1] == pytest.approx(0.5)


def test_topsis_three_by_two_hand_oracle():
    # Hand computation, both columns maximized, equal weights:
    # norms (5, 5); normalized rows (.6,.8)/(.8,.6)/(0,0); weighted by 0.5;
    # ideals (0.4,0.4) and (0,0); S+ = (.1,.1,sqrt(.32)); S- = (.5,.5,0)
    matrix = np.array([[3.0, 4.0], [4.0, 3.0], [0.0, 0.0]])
    wv = WeightVector("custom", np.array([0.5, 0.5]), ["col0", "col1"])
    r = topsis_rank(matrix, ("max", "max"), wv)
    assert r.ps[0] == pytest.approx(5 / 6, abs=1e-9)
    assert r.ps[1] == pytest.approx(5 / 6, abs=1e-9)
    assert r.ps[2] == pytest.approx(0.0, abs=1e-9)
    # PS tie between rows 0 and 1 breaks on the first column (3 < 4)
    assert list(r.rank) == [1, 2, 3]


def test_topsis_ps_in_unit_interval():
    rng = np.random.default_rng(3)
    matrix = rng.random((20, 6)) * [10, 1, 1, 10, 1, 1]
    r = topsis_rank(matrix, DIRECTIONS, compute_weights(matrix, DIRECTIONS, "rstd"))
    assert (r.ps >= 0).all() and (r.ps <= 1).all()


@settings(deadline=None, max_examples=30)
@given(st.integers(0, 100_000))
def test_topsis_scale_invariance_of_ranking(seed):
    rng = np.random.default_rng(seed)
    matrix = rng.random((10, 6)) * [10, 1, 1, 10, 1, 1]
    base = np.abs(rng.random(6)) + 0.05
    wv = WeightVector("custom", base / base.sum(), list(OBJECTIVE_NAMES))
    r0 = topsis_rank(matrix, DIRECTIONS, wv)
    scale = float(rng.random() * 50 + 0.1)
    scaled = base * scale
    wv2 = WeightVector("custom", scaled / scaled.sum(), list(OBJECTIVE_NAMES))
    r1 = topsis_rank(matrix, DIRECTIONS, wv2)
    assert list(r0.rank) == list(r1.rank)


def test_topsis_weak_monotonicity():
    rng = np.random.default_rng(12)
    for _ in range(200):
        n = int(rng.integers(4, 10))
        matrix = np.column_stack(
            [
                rng.integers(1, 20, n).astype(float),
                rng.random(n),
                rng.random(n),
                rng.random(n) * 10,
                rng.random(n),
                rng.random(n),
            ]
        )
        wv = compute_weights(matrix, DIRECTIONS, "equal")
        r0 = topsis_rank(matrix, DIRECTIONS, wv)
        if len(np.unique(np.round(r0.ps, 12))) < n:
            continue
        i = int(rng.integers(n))
        j = int(rng.integers(6))
        improved = matrix.copy()
        delta = 0.3 * (1 + abs(matrix[:, j]).mean())
        if DIRECTIONS[j] == "min":
            improved[i, j] = max(improved[i, j] - delta, 0.0)
        else:
            improved[i, j] += delta
        r1 = topsis_rank(improved, DIRECTIONS, wv)
        assert r1.rank[i] <= r0.rank[i]


def test_zero_weight_objective_cannot_alter_ranking():
    rng = np.random.default_rng(6)
    matrix = rng.random((12, 6)) * [10, 1, 1, 10, 1, 1]
    matrix[:, 3] = 4.2  # constant -> rstd weight 0
    wv = compute_weights(matrix, DIRECTIONS, "rstd")
    assert wv.weights[3] == 0.0
    full = topsis_rank(matrix, DIRECTIONS, wv)
    kept = [j for j in range(6) if j != 3]
    reduced_wv = WeightVector("custom", wv.weights[kept], [OBJECTIVE_NAMES[j] for j in kept])
    reduced = topsis_rank(matrix[:, kept], tuple(DIRECTIONS[j] for j in kept), reduced_wv)
    assert np.allclose(full.ps, reduced.ps, atol=1e-12)


# -- frequency and contribution ------------------------------------------------------


def test_feature_frequency_counts():
    vs = [[2, 0.5, 0.5, 1.0, 0.5, 0.5]] * 4
    ss = solution_set(vs, m=6)
    freq = feature_frequency(ss)
    assert freq.sum() == sum(int(v[0]) for v in vs)


def test_feature_frequency_empty_set():
    ss = SolutionSet(solutions=[], provenance={"config": {"n_features": 7}}, evaluation_count=0)
    assert feature_frequency(ss).tolist() == [0] * 7


def test_frequency_sum_equals_total_subset_size(perfect_ds, perfect_split):
    cfg = GAConfig.for_features(perfect_ds.n_features, seed=2, max_evaluations=60)
    ss = run_search(perfect_ds, perfect_split, cfg, "nb")
    freq = feature_frequency(ss)
    assert freq.sum() == sum(c.objectives.subset_size for c in ss.solutions)


def test_contribution_null_feature_vanishes(perfect_ds, perfect_split):
    mask = np.zeros(perfect_ds.n_features, dtype=bool)
    mask[[0, 5]] = True
    # feature 5 is pure noise: its LR weight is near zero, so its estimated
    # contribution must be small after enough draws
    contrib = feature_contribution(perfect_ds, perfect_split, mask, "lr", samples=500, seed=0)
    assert contrib[5] < 0.02
    assert contrib[0] > contrib[5]


def test_contribution_single_feature_takes_all(perfect_ds, perfect_split):
    mask = np.zeros(perfect_ds.n_features, dtype=bool)
    mask[0] = True
    contrib = feature_contribution(perfect_ds, perfect_split, mask, "lr", samples=50, seed=1)
    assert contrib[0] == contrib.sum()
    assert contrib[0] > 0


def test_contribution_unselected_features_zero(perfect_ds, perfect_split):
    mask = np.zeros(perfect_ds.n_features, dtype=bool)
    mask[[1, 2]] = True
    contrib = feature_contribution(perfect_ds, perfect_split, mask, "nb", samples=30, seed=2)
    unselected = [j for j in range(perfect_ds.n_features) if j not in (1, 2)]
    assert np.allclose(contrib[unselected], 0.0)


def test_contribution_deterministic(perfect_ds, perfect_split):
    mask = np.zeros(perfect_ds.n_features, dtype=bool)
    mask[[0, 3]] = True
    a = feature_contribution(perfect_ds, perfect_split, mask, "lr", samples=40, seed=7)
    b = feature_contribution(perfect_ds, perfect_split, mask, "lr", samples=40, seed=7)
    assert np.array_equal(a, b)


def test_contribution_two_feature_additive_matches_exact_enumeration():
    # Two-feature model scored by its positive-class probability. The exact
    # Shapley value enumerates both orderings against every background row.
    rng = np.random.default_rng(4)
    n = 120
    x = rng.normal(size=(n, 2))
    y = (0.9 * x[:, 0] + 0.5 * x[:, 1] + 0.3 * rng.normal(size=n) > 0).astype(int)
    y[0], y[1] = 0, 1
    groups = (rng.random(n) < 0.5).astype(int)
    groups[0], groups[1] = 0, 1
    ds = make_dataset(np.column_stack([x, groups]), y, groups, sensitive_index=2)
    split = stratified_split(ds, 0.3, seed=0)
    mask = np.array([True, True, False])

    est = feature_contribution(ds, split, mask, "lr", samples=500, seed=3)

    model = train(ds, split, np.array([0, 1]), "lr", seed=3)
    test_x = ds.features[np.ix_(split.test_indices, np.array([0, 1]))]
    bg = ds.features[np.ix_(split.train_indices, np.array([0, 1]))]

    def score(cols_from_x, row):
        z = bg.copy()
        for c in cols_from_x:
            z[:, c] = row[c]
        return model.positive_score(z)

    exact = np.zeros((len(test_x), 2))
    for i, row in enumerate(test_x):
        v_both = score([0, 1], row)
        v_0 = score([0], row)
        v_1 = score([1], row)
        v_none = score([], row)
        exact[i, 0] = 0.5 * ((v_0 - v_none) + (v_both - v_1)).mean()
        exact[i, 1] = 0.5 * ((v_1 - v_none) + (v_both - v_0)).mean()
    expected = np.abs(exact).mean(axis=0)
    assert est[0] == pytest.approx(expected[0], rel=0.10)
    assert est[1] == pytest.approx(expected[1], rel=0.10)


# -- scheme comparison and report ------------------------------------------------------


def test_compare_single_solution_ranks_first_everywhere():
    matrix = np.array([[2, 0.6, 0.5, 1.0, 0.8, 0.7]], dtype=float)
    out = compare_weight_schemes(matrix, DIRECTIONS, ("equal", "rstd", "entropy"))
    assert all(ids[0] == 0 for ids in out["top"].values())


def test_compare_schemes_with_identical_weights_identical_columns():
    # "custom" with uniform weights is the same weighting as "equal".
    rng = np.random.default_rng(5)
    matrix = rng.random((9, 6)) * [10, 1, 1, 10, 1, 1]
    out = compare_weight_schemes(
        matrix, DIRECTIONS, ("equal", "custom"), custom=np.full(6, 3.0)
    )
    assert out["top"]["equal"] == out["top"]["custom"]
    assert out["overlap"][0]["size"] == len(out["top"]["equal"])


def test_build_report_end_to_end(perfect_ds, perfect_split):
    cfg = GAConfig.for_features(perfect_ds.n_features, seed=1, max_evaluations=80)
    ss = run_search(perfect_ds, perfect_split, cfg, "nb")
    report = build_report(
        ss, perfect_ds, perfect_split, "nb", contribution_samples=40, seed=0
    )
    doc = report.to_dict()
    n = len(ss.solutions)
    assert len(doc["solutions"]) == n
    assert {"id", "mask", "objectives", "cluster", "pca", "ps", "rank"} <= doc["solutions"][0].keys()
    assert sorted(s["rank"] for s in doc["solutions"]) == list(range(1, n + 1))
    assert len(doc["frequency"]) == perfect_ds.n_features
    assert len(doc["contribution"]["values"]) == perfect_ds.n_features
    assert set(doc["weights"]) == {"equal", "rstd", "entropy"}
    for wv in doc["weights"].values():
        assert sum(wv["values"]) == pytest.approx(1.0)
    assert doc["elbow"]["k"] >= 1
    assert doc["provenance"]["primary_scheme"] == "rstd"
    assert doc["provenance"]["feature_names"] == list(perfect_ds.feature_names)
    # json-serializable end to end
    import json

    json.dumps(doc)
