"""Dictionary-only named entity recognition.

Dictionaries are lists of (concept_id, surface) pairs, corpora are lists of
(doc_id, text) pairs, and annotations are lists of
(doc_id, [(start_char, end_char, text), ...]). Offsets count code points.
"""

import json

from . import _syngen
from ._syngen import (
    LoadError,
    Model,
    ParseError,
    TrainingError,
    empirical_error,
    epsilon_net_estimate,
    evaluate,
    exact_match_baseline,
    lipschitz,
    load_annotations,
    load_corpus,
    load_dictionary,
    loss_upper_bound,
    synonym_distance,
    synthetic,
)

__all__ = [
    "LoadError",
    "Model",
    "ParseError",
    "TrainingError",
    "bound",
    "config",
    "default_config",
    "empirical_error",
    "epsilon_net_estimate",
    "evaluate",
    "exact_match_baseline",
    "lipschitz",
    "load_annotations",
    "load_config",
    "load_corpus",
    "load_dictionary",
    "loss_upper_bound",
    "predict",
    "synonym_distance",
    "synthetic",
    "train",
]


def default_config():
    return json.loads(_syngen.default_config())


def config(overrides=None):
    """Defaults merged with `overrides`, validated. SYNGEN_SEED applies."""
    return json.loads(_syngen.normalize_config(json.dumps(overrides or {})))


def load_config(path):
    with open(path, encoding="utf-8") as f:
        return config(json.load(f))


def train(entries, documents, config=None):
    """Returns (model, negative pool size)."""
    return _syngen.train(list(entries), list(documents), json.dumps(config or {}))


def model_config(model):
    return json.loads(model.config_json)


def predict(model, documents, t_p=None, m_s=None):
    cfg = model_config(model)
    return _syngen.predict(
        model,
        list(documents),
        cfg["t_p"] if t_p is None else t_p,
        cfg["m_s"] if m_s is None else m_s,
    )


def bound(kappa, epsilon, b, s_total, s_dict, delta=0.05):
    return json.loads(_syngen.bound(kappa, epsilon, b, s_total, s_dict, delta))
