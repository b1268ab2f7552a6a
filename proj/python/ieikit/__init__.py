"""Information evaluation indicators for training-data selection."""

import json

from ._core import (
    EmbeddingTable,
    IeikitError,
    ProbeModel,
    ScoreTable,
    __version__,
    _class_stats,
    _migration_split,
    _select,
    _simulate,
    fit_probe,
    make_fixture,
    score,
    shannon_entropy,
    softmax,
)

__all__ = [
    "EmbeddingTable",
    "IeikitError",
    "ProbeModel",
    "ScoreTable",
    "__version__",
    "class_stats",
    "fit_probe",
    "make_fixture",
    "migration_split",
    "score",
    "select",
    "shannon_entropy",
    "simulate",
    "softmax",
]


def class_stats(scores):
    """Per-class mean, variance and class information of a ScoreTable."""
    return json.loads(_class_stats(scores))


def select(scores, budget, scheme="balanced", direction="goodset", allow_exhaustion=False):
    """Selection plan as a dict with "selected_ids" and "per_class_budget"."""
    return json.loads(_select(scores, budget, scheme, direction, allow_exhaustion))


def migration_split(train, test, fraction=0.4, per_class=True):
    """Positive/negative migration ids of `train` relative to the `test` domain."""
    return json.loads(_migration_split(train, test, fraction, per_class))


def simulate(mode, universe, eval, arm="HID", round_budget=None, **kwargs):
    """Addition ("add") or reduction ("reduce") curve for one arm, as a dict."""
    if round_budget is None:
        round_budget = max(1, len(universe) // 10)
    return json.loads(_simulate(mode, universe, eval, arm=arm, round_budget=round_budget, **kwargs))
