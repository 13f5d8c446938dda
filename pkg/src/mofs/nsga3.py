"""NSGA-III search over binary feature masks.

Population starts as one-sized candidates covering every feature, evolves by
binary tournament + single-point crossover + per-bit mutation, and survivors
are chosen front-by-front with reference-point niching on the unit simplex.
The run stops once the evaluation budget (distinct model trainings) is reached
and returns the deduplicated non-dominated set of the final population.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from mofs.data import Dataset, Split
from mofs.objectives import DIRECTIONS, DEFAULT_VIF_CAP, ObjectiveVector, evaluate_candidate

N_OBJECTIVES = len(DIRECTIONS)
_ASF_EPS = 1e-6
_EPS = 1e-12


class SearchError(RuntimeError):
    """Evaluation failure mid-run; carries the evaluated partial front."""

    def __init__(self, message: str, partial: "SolutionSet | None" = None):
        super().__init__(message)
        self.partial = partial


@dataclass
class Candidate:
    """One chromosome: a boolean mask over the feature columns."""

    mask: np.ndarray
    objectives: ObjectiveVector | None = None

    def key(self) -> bytes:
        return np.packbits(self.mask).tobytes()

    def copy(self) -> "Candidate":
        return Candidate(mask=self.mask.copy(), objectives=self.objectives)


def default_population_size(m: int) -> int:
    """m+1 when m is odd, else m+2; always even and greater than m."""
    return m + 1 if m % 2 == 1 else m + 2


@dataclass(frozen=True)
class GAConfig:
    n_features: int
    population_size: int
    mutation_prob: float
    crossover_prob: float
    max_evaluations: int
    reference_divisions: int
    seed: int

    def __post_init__(self):
        if self.n_features < 2:
            raise ValueError("need at least 2 features")
        if self.population_size <= self.n_features:
            raise ValueError("population size must exceed the number of features")
        if self.max_evaluations < self.population_size:
            raise ValueError("evaluation budget must cover the initial population")
        if not 0.0 <= self.mutation_prob <= 1.0 or not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError("probabilities must lie in [0, 1]")
        if self.reference_divisions < 1:
            raise ValueError("reference_divisions must be >= 1")

    @classmethod
    def for_features(cls, m: int, seed: int = 0, **overrides) -> "GAConfig":
        p = overrides.pop("population_size", default_population_size(m))
        values = {
            "n_features": m,
            "population_size": p,
            "mutation_prob": 1.0 / m,
            "crossover_prob": 1.0,
            "max_evaluations": 2 * p * p,
            "reference_divisions": 3,
            "seed": seed,
        }
        values.update(overrides)
        return cls(**values)

    def as_dict(self) -> dict:
        return {
            "n_features": self.n_features,
            "population_size": self.population_size,
            "mutation_prob": self.mutation_prob,
            "crossover_prob": self.crossover_prob,
            "max_evaluations": self.max_evaluations,
            "reference_divisions": self.reference_divisions,
            "seed": self.seed,
        }


@dataclass
class SolutionSet:
    """Mutually non-dominated candidates plus run provenance."""

    solutions: list[Candidate]
    provenance: dict
    evaluation_count: int
    visited: dict = field(default_factory=dict, repr=False)

    def masks(self) -> np.ndarray:
        return np.array([c.mask for c in self.solutions], dtype=bool)

    def __len__(self) -> int:
        return len(self.solutions)


def initial_population(m: int, seed, population_size: int | None = None) -> list[Candidate]:
    """One-sized candidates: every feature selected once, extra slots random singletons."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    p = population_size or default_population_size(m)
    pop = []
    for j in range(m):
        mask = np.zeros(m, dtype=bool)
        mask[j] = True
        pop.append(Candidate(mask=mask))
    for _ in range(p - m):
        mask = np.zeros(m, dtype=bool)
        mask[int(rng.integers(m))] = True
        pop.append(Candidate(mask=mask))
    return pop


def _signed(values: np.ndarray, directions=DIRECTIONS) -> np.ndarray:
    """Map to minimization space: maximized columns are negated."""
    signs = np.array([1.0 if d == "min" else -1.0 for d in directions])
    return values * signs


def dominates(a, b, directions=DIRECTIONS) -> bool:
    """True iff a is no worse than b everywhere and strictly better somewhere."""
    av = a.as_array() if isinstance(a, ObjectiveVector) else np.asarray(a, dtype=float)
    bv = b.as_array() if isinstance(b, ObjectiveVector) else np.asarray(b, dtype=float)
    fa, fb = _signed(av, directions), _signed(bv, directions)
    return bool(np.all(fa <= fb) and np.any(fa < fb))


def non_dominated_sort(vectors, directions=DIRECTIONS) -> list[list[int]]:
    """Fronts of indices; front 0 is the maximal non-dominated set."""
    rows = [
        v.as_array() if isinstance(v, ObjectiveVector) else np.asarray(v, dtype=float)
        for v in vectors
    ]
    f = _signed(np.array(rows), directions)
    n = len(rows)
    # dom[i, j]: i dominates j
    le = (f[:, None, :] <= f[None, :, :]).all(axis=2)
    lt = (f[:, None, :] < f[None, :, :]).any(axis=2)
    dom = le & lt
    dominated_by = dom.sum(axis=0)
    fronts = []
    assigned = np.zeros(n, dtype=bool)
    while not assigned.all():
        current = np.flatnonzero((dominated_by == 0) & ~assigned)
        fronts.append(current.tolist())
        assigned[current] = True
        dominated_by = dominated_by - dom[current].sum(axis=0)
    return fronts


def generate_reference_points(n_objectives: int = N_OBJECTIVES, divisions: int = 3) -> np.ndarray:
    """Das-Dennis simplex lattice: all compositions of `divisions` over the axes."""
    if divisions < 1:
        raise ValueError("divisions must be >= 1")
    points = []

    def recurse(prefix, remaining, axes_left):
        if axes_left == 1:
            points.append(prefix + [remaining])
            return
        for take in range(remaining + 1):
            recurse(prefix + [take], remaining - take, axes_left - 1)

    recurse([], divisions, n_objectives)
    pts = np.array(points, dtype=float) / divisions
    assert len(pts) == math.comb(divisions + n_objectives - 1, n_objectives - 1)
    return pts


def _normalize(f: np.ndarray) -> np.ndarray:
    """NSGA-III adaptive normalization: translate by the ideal point, divide by
    the hyperplane intercepts through the per-axis extreme points."""
    ideal = f.min(axis=0)
    fp = f - ideal
    k = f.shape[1]
    extremes = np.empty(k, dtype=int)
    for j in range(k):
        w = np.full(k, _ASF_EPS)
        w[j] = 1.0
        asf = (fp / w).max(axis=1)
        extremes[j] = int(np.argmin(asf))
    intercepts = None
    e = fp[extremes]
    if len(np.unique(extremes)) == k:
        try:
            x = np.linalg.solve(e, np.ones(k))
            cand = 1.0 / x
            if np.all(np.isfinite(cand)) and np.all(cand > _EPS):
                intercepts = cand
        except np.linalg.LinAlgError:
            intercepts = None
    if intercepts is None:
        intercepts = fp.max(axis=0)
    intercepts = np.where(intercepts > _EPS, intercepts, 1.0)
    return fp / intercepts


def _associate(fn: np.ndarray, refs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest reference direction per point by perpendicular distance."""
    unit = refs / np.linalg.norm(refs, axis=1, keepdims=True)
    proj = fn @ unit.T
    sq = (fn**2).sum(axis=1, keepdims=True) - proj**2
    dist = np.sqrt(np.maximum(sq, 0.0))
    nearest = dist.argmin(axis=1)
    return nearest, dist[np.arange(len(fn)), nearest]


def environmental_selection(
    candidates: list[Candidate],
    refs: np.ndarray,
    population_size: int,
    rng: np.random.Generator,
    directions=DIRECTIONS,
) -> list[Candidate]:
    """Standard NSGA-III survivor selection over an evaluated pool."""
    if len(candidates) < population_size:
        raise ValueError("pool smaller than population size")
    fronts = non_dominated_sort([c.objectives for c in candidates], directions)
    chosen: list[int] = []
    last_front: list[int] = []
    for front in fronts:
        if len(chosen) + len(front) <= population_size:
            chosen.extend(front)
            if len(chosen) == population_size:
                return [candidates[i] for i in chosen]
        else:
            last_front = front
            break

    pool = chosen + last_front
    f = _signed(
        np.array([candidates[i].objectives.as_array() for i in pool]), directions
    )
    fn = _normalize(f)
    nearest, dist = _associate(fn, refs)

    niche_counts = np.zeros(len(refs), dtype=int)
    for local in range(len(chosen)):
        niche_counts[nearest[local]] += 1

    remaining = {  # local index within pool -> (ref, distance)
        len(chosen) + i: (nearest[len(chosen) + i], dist[len(chosen) + i])
        for i in range(len(last_front))
    }
    members_by_ref: dict[int, list[int]] = {}
    for local, (ref, _) in remaining.items():
        members_by_ref.setdefault(ref, []).append(local)

    active = set(range(len(refs)))
    need = population_size - len(chosen)
    selected_local: list[int] = []
    while need > 0:
        counts = [(niche_counts[r], r) for r in active]
        min_count = min(c for c, _ in counts)
        tied = [r for c, r in counts if c == min_count]
        ref = tied[int(rng.integers(len(tied)))] if len(tied) > 1 else tied[0]
        members = members_by_ref.get(ref, [])
        if not members:
            active.discard(ref)
            continue
        if niche_counts[ref] == 0:
            pick = min(members, key=lambda loc: (remaining[loc][1], loc))
        else:
            pick = members[int(rng.integers(len(members)))]
        members.remove(pick)
        selected_local.append(pick)
        niche_counts[ref] += 1
        need -= 1

    survivors = [candidates[g] for g in chosen]
    survivors.extend(candidates[pool[local]] for local in selected_local)
    return survivors


def _tournament(pop: list[Candidate], ranks: np.ndarray, rng: np.random.Generator) -> Candidate:
    i = int(rng.integers(len(pop)))
    j = int(rng.integers(len(pop)))
    if ranks[i] < ranks[j]:
        return pop[i]
    if ranks[j] < ranks[i]:
        return pop[j]
    return pop[i] if rng.random() < 0.5 else pop[j]


def _crossover(a: Candidate, b: Candidate, rng: np.random.Generator) -> tuple[Candidate, Candidate]:
    m = len(a.mask)
    point = int(rng.integers(1, m))
    c1 = np.concatenate([a.mask[:point], b.mask[point:]])
    c2 = np.concatenate([b.mask[:point], a.mask[point:]])
    return Candidate(mask=c1), Candidate(mask=c2)


def _mutate(c: Candidate, prob: float, rng: np.random.Generator) -> None:
    flips = rng.random(len(c.mask)) < prob
    c.mask = c.mask ^ flips
    c.objectives = None


def _repair(c: Candidate, rng: np.random.Generator) -> None:
    if not c.mask.any():
        c.mask[int(rng.integers(len(c.mask)))] = True


def run_search(
    ds: Dataset,
    split: Split,
    cfg: GAConfig,
    kind: str,
    vif_cap: float = DEFAULT_VIF_CAP,
    progress=None,
) -> SolutionSet:
    """Run the search to its evaluation budget and return the final front.

    Identical masks are evaluated once (a cache keyed by mask); cache hits do
    not count against the budget. The returned set is the deduplicated
    non-dominated subset of the final population, additionally filtered against
    every vector evaluated during the run.
    """
    if cfg.n_features != ds.n_features:
        raise ValueError("config feature count does not match dataset")
    rng = np.random.default_rng(cfg.seed)
    refs = generate_reference_points(N_OBJECTIVES, cfg.reference_divisions)
    cache: dict[bytes, ObjectiveVector] = {}
    eval_count = 0
    started = time.perf_counter()
    # Distinct trainings can never exceed the number of non-empty masks, so a
    # larger budget would stall the loop on cache hits forever.
    budget = cfg.max_evaluations
    if ds.n_features < 60:
        budget = min(budget, 2**ds.n_features - 1)

    def evaluate(c: Candidate) -> bool:
        """Attach objectives from cache or a fresh model training; False if out of budget."""
        nonlocal eval_count
        key = c.key()
        hit = cache.get(key)
        if hit is not None:
            c.objectives = hit
            return True
        if eval_count >= budget:
            return False
        c.objectives = evaluate_candidate(ds, split, c, kind, cfg.seed, vif_cap)
        cache[key] = c.objectives
        eval_count += 1
        return True

    def partial_front(pop) -> SolutionSet:
        evaluated = [c for c in pop if c.objectives is not None]
        return _front_of(evaluated, cache, cfg, ds, kind, eval_count, started, partial=True)

    population = initial_population(ds.n_features, rng, cfg.population_size)
    stalled_generations = 0
    try:
        for c in population:
            evaluate(c)
        if progress:
            progress(eval_count, cfg.max_evaluations)

        while eval_count < budget and stalled_generations < 100:
            fronts = non_dominated_sort([c.objectives for c in population])
            ranks = np.empty(len(population), dtype=int)
            for r, front in enumerate(fronts):
                ranks[front] = r
            offspring: list[Candidate] = []
            while len(offspring) < cfg.population_size:
                pa = _tournament(population, ranks, rng)
                pb = _tournament(population, ranks, rng)
                if rng.random() < cfg.crossover_prob:
                    ca, cb = _crossover(pa, pb, rng)
                else:
                    ca, cb = pa.copy(), pb.copy()
                for child in (ca, cb):
                    _mutate(child, cfg.mutation_prob, rng)
                    _repair(child, rng)
                offspring.extend([ca, cb])
            before = eval_count
            kept = [c for c in offspring if evaluate(c)]
            stalled_generations = stalled_generations + 1 if eval_count == before else 0
            population = environmental_selection(
                population + kept, refs, cfg.population_size, rng
            )
            if progress:
                progress(eval_count, cfg.max_evaluations)
    except SearchError:
        raise
    except Exception as exc:  # propagate with the evaluated partial front attached
        raise SearchError(str(exc), partial=partial_front(population)) from exc

    return _front_of(population, cache, cfg, ds, kind, eval_count, started, partial=False)


def _front_of(
    population: list[Candidate],
    cache: dict[bytes, ObjectiveVector],
    cfg: GAConfig,
    ds: Dataset,
    kind: str,
    eval_count: int,
    started: float,
    partial: bool,
) -> SolutionSet:
    fronts = non_dominated_sort([c.objectives for c in population])
    front = [population[i] for i in fronts[0]]
    # Deduplicate identical masks, keep first.
    seen: set[bytes] = set()
    unique = []
    for c in front:
        key = c.key()
        if key not in seen:
            seen.add(key)
            unique.append(c)
    # Front consistency: drop anything dominated by a vector seen during the run.
    visited = list(cache.values())
    consistent = [
        c
        for c in unique
        if not any(dominates(v, c.objectives) for v in visited)
    ]
    provenance = {
        "config": cfg.as_dict(),
        "seed": cfg.seed,
        "dataset": ds.fingerprint(),
        "classifier": kind,
        "evaluation_count": eval_count,
        "wall_time_s": round(time.perf_counter() - started, 3),
        "partial": partial,
    }
    return SolutionSet(
        solutions=consistent,
        provenance=provenance,
        evaluation_count=eval_count,
        visited=dict(cache),
    )
