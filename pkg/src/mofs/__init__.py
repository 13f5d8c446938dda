"""Many-objective feature selection with a decision-support interpretation stage.

The pipeline searches binary feature masks with NSGA-III, scoring each mask on
six objectives (subset size, balanced accuracy, F1, multicollinearity, statistical
parity, equalised odds), then post-processes the non-dominated front: clustering
and 2-D projection, objective weighting, TOPSIS ranking, feature frequency and
feature contribution, so a decision maker can pick one subset.
"""

from mofs.data import Dataset, Split, load_csv, stratified_split
from mofs.models import TrainedModel, train, predict
from mofs.objectives import (
    OBJECTIVE_NAMES,
    DIRECTIONS,
    ObjectiveVector,
    balanced_accuracy,
    equalised_odds,
    evaluate_candidate,
    f1,
    statistical_parity,
    vif_score,
)
from mofs.nsga3 import Candidate, GAConfig, SolutionSet, run_search
from mofs.interpret import InterpretationReport, build_report

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "Split",
    "load_csv",
    "stratified_split",
    "TrainedModel",
    "train",
    "predict",
    "OBJECTIVE_NAMES",
    "DIRECTIONS",
    "ObjectiveVector",
    "balanced_accuracy",
    "f1",
    "vif_score",
    "statistical_parity",
    "equalised_odds",
    "evaluate_candidate",
    "Candidate",
    "GAConfig",
    "SolutionSet",
    "run_search",
    "InterpretationReport",
    "build_report",
    "__version__",
]
