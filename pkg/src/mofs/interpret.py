"""Post-processing of a solution set into a decision-support report.

Five steps run in order: label similar/outlier solutions (k-means on the
standardized objective matrix plus a 2-D principal-component projection),
weight the objectives (equal, range-over-std, entropy, or custom), rank the
solutions with TOPSIS, count feature frequency across the set, and estimate
per-feature contribution on the top-ranked solution's model via Monte-Carlo
Shapley sampling. The final choice stays with the human.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mofs.data import Dataset, Split
from mofs.models import train
from mofs.nsga3 import SolutionSet
from mofs.objectives import DEFAULT_VIF_CAP, DIRECTIONS, OBJECTIVE_NAMES

WEIGHT_SCHEMES = ("equal", "rstd", "entropy", "custom")
_EPS = 1e-12
_ENTROPY_SHIFT = 1e-12
KMEANS_RESTARTS = 10
MAX_ELBOW_K = 8
CONTRIBUTION_EVAL_ROWS = 200


@dataclass
class ClusterAssignment:
    cluster_ids: np.ndarray
    centroids: np.ndarray  # standardized objective space
    pca_coords: np.ndarray  # n x 2
    pca_components: np.ndarray  # 2 x n_objectives
    explained_variance: np.ndarray
    wcss_by_k: list[float]
    chosen_k: int


@dataclass
class WeightVector:
    scheme: str
    weights: np.ndarray
    rank_of_objectives: list[str]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.shape[0] != len(self.rank_of_objectives):
            raise ValueError("need one weight per objective")
        if np.any(w < 0) or abs(float(w.sum()) - 1.0) > 1e-9:
            raise ValueError("weights must be non-negative and sum to 1")
        self.weights = w


@dataclass
class RankingResult:
    ps: np.ndarray  # performance score per solution
    rank: np.ndarray  # 1 = best
    order: list[int]  # solution indices best-first
    weighted_matrix: np.ndarray
    positive_ideal: np.ndarray
    negative_ideal: np.ndarray
    weights: WeightVector


@dataclass
class FeatureReport:
    feature_names: tuple[str, ...]
    frequency: np.ndarray
    contribution: np.ndarray
    contribution_solution: int
    contribution_samples: int


@dataclass
class InterpretationReport:
    solution_masks: np.ndarray
    objective_matrix: np.ndarray
    clusters: ClusterAssignment
    weights: dict[str, WeightVector]
    ranking: RankingResult
    features: FeatureReport
    sensitivity: dict
    provenance: dict

    def to_dict(self) -> dict:
        sols = []
        for i in range(len(self.objective_matrix)):
            row = self.objective_matrix[i]
            sols.append(
                {
                    "id": i,
                    "mask": [int(b) for b in self.solution_masks[i]],
                    "objectives": {
                        name: (int(row[j]) if name == "subset_size" else float(row[j]))
                        for j, name in enumerate(OBJECTIVE_NAMES)
                    },
                    "cluster": int(self.clusters.cluster_ids[i]),
                    "pca": [float(v) for v in self.clusters.pca_coords[i]],
                    "ps": float(self.ranking.ps[i]),
                    "rank": int(self.ranking.rank[i]),
                }
            )
        return {
            "solutions": sols,
            "weights": {
                scheme: {
                    "values": [float(v) for v in wv.weights],
                    "objective_rank": list(wv.rank_of_objectives),
                }
                for scheme, wv in self.weights.items()
            },
            "elbow": {
                "k": int(self.clusters.chosen_k),
                "wcss": [float(v) for v in self.clusters.wcss_by_k],
            },
            "frequency": [int(v) for v in self.features.frequency],
            "contribution": {
                "solution_id": int(self.features.contribution_solution),
                "values": [float(v) for v in self.features.contribution],
                "samples": int(self.features.contribution_samples),
            },
            "sensitivity": self.sensitivity,
            "provenance": self.provenance,
        }


def objective_matrix(ss: SolutionSet, vif_cap: float = DEFAULT_VIF_CAP) -> np.ndarray:
    """Raw objective values, one row per solution, VIF clamped to the cap."""
    if len(ss.solutions) == 0:
        raise ValueError("empty solution set")
    rows = np.array([c.objectives.as_array() for c in ss.solutions])
    vif_col = OBJECTIVE_NAMES.index("vif")
    rows[:, vif_col] = np.minimum(rows[:, vif_col], vif_cap)
    return rows


def _standardize(matrix: np.ndarray) -> np.ndarray:
    mean = matrix.mean(axis=0)
    std = matrix.std(axis=0)
    out = np.zeros_like(matrix, dtype=float)
    nonzero = std > _EPS
    out[:, nonzero] = (matrix[:, nonzero] - mean[nonzero]) / std[nonzero]
    return out


def _kmeans_once(x: np.ndarray, centroids: np.ndarray, max_iter: int = 100):
    k = len(centroids)
    labels = np.zeros(len(x), dtype=int)
    for it in range(max_iter):
        dists = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_labels = dists.argmin(axis=1)
        for c in range(k):
            if not (new_labels == c).any():
                # Revive an empty cluster at the worst-fit point.
                worst = dists[np.arange(len(x)), new_labels].argmax()
                new_labels[worst] = c
        if it > 0 and (new_labels == labels).all():
            break
        labels = new_labels
        for c in range(k):
            centroids[c] = x[labels == c].mean(axis=0)
    wcss = float(((x - centroids[labels]) ** 2).sum())
    return labels, centroids, wcss


def _kmeans_pp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centroids = [x[int(rng.integers(len(x)))]]
    for _ in range(1, k):
        d2 = np.min(((x[:, None, :] - np.array(centroids)[None, :, :]) ** 2).sum(axis=2), axis=1)
        total = d2.sum()
        if total < _EPS:
            centroids.append(x[int(rng.integers(len(x)))])
            continue
        centroids.append(x[int(rng.choice(len(x), p=d2 / total))])
    return np.array(centroids, dtype=float)


def _kmeans(x: np.ndarray, k: int, rng: np.random.Generator, warm: np.ndarray | None = None):
    """Best of KMEANS_RESTARTS k-means++ runs; optionally one warm start whose
    centroids extend the best (k-1)-clustering, which keeps the elbow curve
    non-increasing in k."""
    best = None
    starts = [_kmeans_pp_init(x, k, rng) for _ in range(KMEANS_RESTARTS)]
    if warm is not None:
        starts.append(warm)
    for init in starts:
        labels, centroids, wcss = _kmeans_once(x, init.copy())
        if best is None or wcss < best[2]:
            best = (labels, centroids, wcss)
    return best


def _pca_top2(x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n, m = x.shape
    if n < 2:
        return np.zeros((n, 2)), np.zeros((2, m)), np.zeros(2)
    cov = np.cov(x, rowvar=False)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:2]
    comps = eigvecs[:, order].T
    # Sign convention: largest-magnitude loading positive.
    for i in range(comps.shape[0]):
        j = int(np.argmax(np.abs(comps[i])))
        if comps[i, j] < 0:
            comps[i] = -comps[i]
    coords = x @ comps.T
    return coords, comps, eigvals[order]


def cluster_solutions(matrix: np.ndarray, k="auto", seed: int = 0) -> ClusterAssignment:
    """Label solutions with k-means on standardized objectives and project to 2-D.

    k="auto" picks the elbow of the WCSS curve (maximum second difference over
    k in [1, min(8, n-1)]).
    """
    matrix = np.asarray(matrix, dtype=float)
    n = len(matrix)
    if n == 0:
        raise ValueError("empty matrix")
    x = _standardize(matrix)
    rng = np.random.default_rng(seed)

    k_max = max(1, min(MAX_ELBOW_K, n - 1))
    wcss_curve: list[float] = []
    curve_results = []
    prev_centroids = None
    prev_labels = None
    for kk in range(1, k_max + 1):
        warm = None
        if prev_centroids is not None:
            dists = ((x[:, None, :] - prev_centroids[None, :, :]) ** 2).sum(axis=2)
            worst = int(dists[np.arange(n), prev_labels].argmax())
            warm = np.vstack([prev_centroids, x[worst]])
        labels, centroids, wcss = _kmeans(x, kk, rng, warm=warm)
        wcss_curve.append(wcss)
        curve_results.append((labels, centroids))
        prev_centroids, prev_labels = centroids, labels

    if k == "auto":
        if k_max < 3:
            chosen = k_max
        else:
            second = [
                wcss_curve[i - 1] - 2 * wcss_curve[i] + wcss_curve[i + 1]
                for i in range(1, k_max - 1)
            ]
            chosen = int(np.argmax(second)) + 2
        labels, centroids = curve_results[chosen - 1]
    else:
        chosen = int(k)
        if chosen < 1 or chosen > n:
            raise ValueError(f"k={chosen} infeasible for {n} solutions")
        if chosen <= k_max:
            labels, centroids = curve_results[chosen - 1]
        else:
            labels, centroids, _ = _kmeans(x, chosen, rng)

    coords, comps, evr = _pca_top2(x)
    return ClusterAssignment(
        cluster_ids=labels,
        centroids=centroids,
        pca_coords=coords,
        pca_components=comps,
        explained_variance=evr,
        wcss_by_k=wcss_curve,
        chosen_k=chosen,
    )


def _ranked_names(weights: np.ndarray) -> list[str]:
    names = OBJECTIVE_NAMES if len(weights) == len(OBJECTIVE_NAMES) else [
        f"col{j}" for j in range(len(weights))
    ]
    order = sorted(range(len(weights)), key=lambda j: (-weights[j], j))
    return [names[j] for j in order]


def compute_weights(
    matrix: np.ndarray,
    directions=DIRECTIONS,
    scheme: str = "rstd",
    custom: np.ndarray | None = None,
) -> WeightVector:
    """Objective weights from the solution set itself.

    equal: uniform. rstd: range divided by population standard deviation,
    per column. entropy: 1 minus the Shannon entropy of each column's value
    distribution after direction-aware min-max normalization. custom: caller
    weights, validated and normalized.
    """
    matrix = np.asarray(matrix, dtype=float)
    n, m = matrix.shape
    if scheme == "equal":
        w = np.full(m, 1.0 / m)
        return WeightVector("equal", w, _ranked_names(w))
    if scheme == "custom":
        if custom is None:
            raise ValueError("custom scheme needs explicit weights")
        w = np.asarray(custom, dtype=float)
        if w.shape != (m,) or not np.all(np.isfinite(w)) or np.any(w < 0) or w.sum() <= 0:
            raise ValueError("custom weights must be non-negative, finite, not all zero")
        w = w / w.sum()
        return WeightVector("custom", w, _ranked_names(w))
    if n < 2:
        raise ValueError(f"{scheme} weights need at least 2 solutions")

    if scheme == "rstd":
        rng_col = matrix.max(axis=0) - matrix.min(axis=0)
        sigma = matrix.std(axis=0)
        raw = np.where(sigma > _EPS, rng_col / np.where(sigma > _EPS, sigma, 1.0), 0.0)
    elif scheme == "entropy":
        lo = matrix.min(axis=0)
        span = matrix.max(axis=0) - lo
        norm = np.where(span > _EPS, (matrix - lo) / np.where(span > _EPS, span, 1.0), 0.0)
        for j, d in enumerate(directions):
            if d == "min":
                norm[:, j] = np.where(span[j] > _EPS, 1.0 - norm[:, j], norm[:, j])
        shifted = norm + _ENTROPY_SHIFT
        p = shifted / shifted.sum(axis=0)
        e = -(p * np.log(p)).sum(axis=0) / np.log(n)
        raw = 1.0 - e
        raw = np.where(raw > _EPS, raw, 0.0)
    else:
        raise ValueError(f"unknown weight scheme {scheme!r}")

    total = raw.sum()
    if total <= 0:
        raise ValueError(f"{scheme} weights degenerate: every objective is constant")
    w = raw / total
    return WeightVector(scheme, w, _ranked_names(w))


def topsis_rank(matrix: np.ndarray, directions=DIRECTIONS, weights: WeightVector | None = None) -> RankingResult:
    """Closeness to the ideal point over the weighted vector-normalized matrix.

    Per objective, the positive/negative ideals are the best/worst values
    attained in the set (respecting direction). Ties in the final score break
    toward the smaller subset size, then the lower solution index.
    """
    matrix = np.asarray(matrix, dtype=float)
    n, m = matrix.shape
    if n == 0:
        raise ValueError("empty matrix")
    if weights is None:
        weights = compute_weights(matrix, directions, "equal")
    norms = np.sqrt((matrix**2).sum(axis=0))
    normalized = np.where(norms > _EPS, matrix / np.where(norms > _EPS, norms, 1.0), 0.0)
    v = normalized * weights.weights
    pos = np.empty(m)
    neg = np.empty(m)
    for j, d in enumerate(directions):
        if d == "max":
            pos[j], neg[j] = v[:, j].max(), v[:, j].min()
        else:
            pos[j], neg[j] = v[:, j].min(), v[:, j].max()
    s_pos = np.sqrt(((v - pos) ** 2).sum(axis=1))
    s_neg = np.sqrt(((v - neg) ** 2).sum(axis=1))
    denom = s_pos + s_neg
    ps = np.where(denom > _EPS, s_neg / np.where(denom > _EPS, denom, 1.0), 1.0)

    subset_sizes = matrix[:, 0]
    order = sorted(range(n), key=lambda i: (-ps[i], subset_sizes[i], i))
    rank = np.empty(n, dtype=int)
    for position, i in enumerate(order):
        rank[i] = position + 1
    return RankingResult(
        ps=ps,
        rank=rank,
        order=order,
        weighted_matrix=v,
        positive_ideal=pos,
        negative_ideal=neg,
        weights=weights,
    )


def feature_frequency(ss: SolutionSet, n_features: int | None = None) -> np.ndarray:
    """How often each feature appears across the solution set."""
    if len(ss.solutions) == 0:
        if n_features is None:
            n_features = ss.provenance.get("config", {}).get("n_features", 0)
        return np.zeros(n_features, dtype=int)
    return ss.masks().sum(axis=0).astype(int)


def feature_contribution(
    ds: Dataset,
    split: Split,
    solution,
    kind: str,
    samples: int = 300,
    seed: int = 0,
    eval_rows: int = CONTRIBUTION_EVAL_ROWS,
) -> np.ndarray:
    """Monte-Carlo Shapley attribution of the model's positive-class score.

    Each draw samples a feature permutation and a background training row, then
    walks the permutation switching features from background to instance values
    and credits the score change to the switched feature. Estimates are
    averaged over a fixed subsample of test rows; the result is the mean
    absolute attribution per selected feature (unselected features are 0).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    mask = np.asarray(getattr(solution, "mask", solution), dtype=bool)
    columns = np.flatnonzero(mask)
    if columns.size == 0:
        raise ValueError("solution selects no features")
    model = train(ds, split, columns, kind, seed)
    rng = np.random.default_rng(seed)

    test_idx = np.asarray(split.test_indices)
    if len(test_idx) > eval_rows:
        test_idx = np.sort(rng.choice(test_idx, size=eval_rows, replace=False))
    x_eval = ds.features[np.ix_(test_idx, columns)]
    train_idx = np.asarray(split.train_indices)
    k = columns.size

    phi = np.zeros((len(test_idx), k))
    for _ in range(samples):
        perm = rng.permutation(k)
        bg = ds.features[int(train_idx[rng.integers(len(train_idx))]), columns]
        z = np.tile(bg, (len(test_idx), 1))
        prev = model.positive_score(z)
        for pos in perm:
            z[:, pos] = x_eval[:, pos]
            cur = model.positive_score(z)
            phi[:, pos] += cur - prev
            prev = cur
    phi /= samples

    out = np.zeros(ds.n_features)
    out[columns] = np.abs(phi).mean(axis=0)
    return out


def compare_weight_schemes(
    matrix: np.ndarray,
    directions=DIRECTIONS,
    schemes=("equal", "rstd", "entropy"),
    custom: np.ndarray | None = None,
) -> dict:
    """Top-5 solutions per weighting scheme plus pairwise top-5 overlap."""
    matrix = np.asarray(matrix, dtype=float)
    if len(schemes) == 0:
        raise ValueError("need at least one scheme")
    top: dict[str, list[int]] = {}
    for scheme in schemes:
        if len(matrix) == 1:
            top[scheme] = [0]
            continue
        wv = compute_weights(matrix, directions, scheme, custom=custom)
        ranking = topsis_rank(matrix, directions, wv)
        top[scheme] = ranking.order[:5]
    overlap = []
    names = list(schemes)
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            common = len(set(top[names[a]]) & set(top[names[b]]))
            overlap.append({"a": names[a], "b": names[b], "size": common})
    return {"schemes": names, "top": top, "overlap": overlap}


def build_report(
    ss: SolutionSet,
    ds: Dataset,
    split: Split,
    kind: str,
    schemes=("equal", "rstd", "entropy"),
    primary_scheme: str = "rstd",
    k="auto",
    vif_cap: float = DEFAULT_VIF_CAP,
    contribution_samples: int = 300,
    seed: int = 0,
) -> InterpretationReport:
    """Run interpretation steps 1-5 over a solution set, deterministically."""
    if len(ss.solutions) == 0:
        raise ValueError("empty solution set")
    matrix = objective_matrix(ss, vif_cap)
    n = len(matrix)

    clusters = cluster_solutions(matrix, k=k, seed=seed)

    weight_vectors: dict[str, WeightVector] = {}
    usable = list(schemes)
    if n < 2:
        usable = ["equal"]
    for scheme in usable:
        weight_vectors[scheme] = compute_weights(matrix, DIRECTIONS, scheme)
    primary = primary_scheme if primary_scheme in weight_vectors else "equal"
    if "equal" not in weight_vectors and primary == "equal":
        weight_vectors["equal"] = compute_weights(matrix, DIRECTIONS, "equal")
    ranking = topsis_rank(matrix, DIRECTIONS, weight_vectors[primary])

    frequency = feature_frequency(ss, n_features=ds.n_features)
    reference = ranking.order[0]
    contribution = feature_contribution(
        ds,
        split,
        ss.solutions[reference],
        kind,
        samples=contribution_samples,
        seed=seed,
    )
    features = FeatureReport(
        feature_names=ds.feature_names,
        frequency=frequency,
        contribution=contribution,
        contribution_solution=reference,
        contribution_samples=contribution_samples,
    )
    sensitivity = compare_weight_schemes(matrix, DIRECTIONS, usable)

    provenance = {
        key: value
        for key, value in ss.provenance.items()
        if key not in ("wall_time_s", "partial")
    }
    provenance.update(
        {
            "feature_names": list(ds.feature_names),
            "schemes": list(usable),
            "primary_scheme": primary,
            "k": clusters.chosen_k if k == "auto" else k,
            "k_mode": "auto" if k == "auto" else "fixed",
            "vif_cap": vif_cap,
            "interpret_seed": seed,
            "contribution": {
                "solution_id": int(reference),
                "samples": contribution_samples,
                "eval_rows": int(min(CONTRIBUTION_EVAL_ROWS, len(split.test_indices))),
            },
            "split": {"test_fraction": split.test_fraction, "seed": split.seed},
            "modeling": {
                "nb": "gaussian numeric, add-1 smoothed categorical, variance floor 1e-9",
                "lr": "full-batch gradient descent, lr 0.1 halving, max 500 iters, tol 1e-6, standardized inputs",
                "threshold": 0.5,
            },
        }
    )

    return InterpretationReport(
        solution_masks=ss.masks(),
        objective_matrix=matrix,
        clusters=clusters,
        weights=weight_vectors,
        ranking=ranking,
        features=features,
        sensitivity=sensitivity,
        provenance=provenance,
    )
