"""Robust open-set node classification with label-propagation denoising.

Thin Python layer over the C++ core. Configs are plain dicts using the
same keys as the JSON config files of the ``rogpl`` command line tool.
"""

import json

from ._rogpl import (
    UNKNOWN,
    UNLABELED,
    FormatError,
    Graph,
    Model,
    NoisyDataset,
    TrainingError,
    auroc,
    citation_like_graph,
    convert_raw_dataset,
    knn_affinity,
    load_dataset,
    load_model,
    macro_f1,
    propagate_labels,
    save_dataset,
    select_clean,
    split_nodes,
    two_blob_graph,
)
from . import _rogpl


def train(graph, train_ids, val_ids=(), config=None, variant="full"):
    """Train a model; ``config`` holds TrainConfig keys only."""
    return _rogpl._train(graph, list(train_ids), list(val_ids), json.dumps(config or {}), variant)


def make_scenario(raw, config=None, far_source=None):
    """Noisy open-set scenario from TrainConfig + NoiseSpec keys."""
    return _rogpl._make_scenario(raw, json.dumps(config or {}), far_source)


def run_experiment(name, raw, config=None, variant="full", n_seeds=3, far_source=None):
    """One row per seed plus a median row, as dicts keyed like metrics.csv."""
    return _rogpl._run_experiment(name, raw, json.dumps(config or {}), variant, n_seeds, far_source)


__all__ = [
    "UNKNOWN",
    "UNLABELED",
    "FormatError",
    "Graph",
    "Model",
    "NoisyDataset",
    "TrainingError",
    "auroc",
    "citation_like_graph",
    "convert_raw_dataset",
    "knn_affinity",
    "load_dataset",
    "load_model",
    "macro_f1",
    "make_scenario",
    "propagate_labels",
    "run_experiment",
    "save_dataset",
    "select_clean",
    "split_nodes",
    "train",
    "two_blob_graph",
]
