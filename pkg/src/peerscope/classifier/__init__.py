"""Early-career category prediction with tree ensembles."""
from __future__ import annotations

from typing import Sequence

from .ensembles import GradientBoostedTrees, RandomForest, load_model, model_from_json, model_to_json, save_model
from .evaluation import EvalReport, classification_report, evaluate, write_eval_report, write_importances_csv
from .features import (FEATURE_NAMES, FeatureVector, SplitSpec, WindowContext, as_xy, build_dataset,
                       build_features, eligible_authors, split_authors)
from .trees import DecisionTree, GradientTree


def train_random_forest(dataset: Sequence[tuple], params: dict | None = None) -> RandomForest:
    """Fit a forest on ``(features, label)`` pairs.

    ``params`` keys: trees, max_depth, min_leaf, features_per_split,
    bootstrap, seed, n_jobs.
    """
    X, y = as_xy(dataset)
    return RandomForest(**(params or {})).fit(X, y)


def train_gbt(dataset: Sequence[tuple], params: dict | None = None) -> GradientBoostedTrees:
    """Fit boosted trees on ``(features, label)`` pairs.

    ``params`` keys: rounds, learning_rate, max_depth, min_leaf, reg_lambda,
    features_per_split, seed.
    """
    X, y = as_xy(dataset)
    return GradientBoostedTrees(**(params or {})).fit(X, y)


def evaluate_dataset(model, test: Sequence[tuple], feature_names: Sequence[str] | None = None) -> EvalReport:
    X, y = as_xy(test)
    if feature_names is None and test and isinstance(test[0][0], FeatureVector):
        feature_names = test[0][0].names
    return evaluate(model, X, y, feature_names)


__all__ = [
    "DecisionTree", "GradientTree", "RandomForest", "GradientBoostedTrees",
    "EvalReport", "classification_report", "evaluate", "evaluate_dataset",
    "FEATURE_NAMES", "FeatureVector", "SplitSpec", "WindowContext",
    "as_xy", "build_dataset", "build_features", "eligible_authors", "split_authors",
    "train_random_forest", "train_gbt",
    "save_model", "load_model", "model_to_json", "model_from_json",
    "write_eval_report", "write_importances_csv",
]
