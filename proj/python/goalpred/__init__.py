# Copyright 2026 The goalpred Authors
# SPDX-License-Identifier: Apache-2.0
"""Goal prediction from body and gaze cues."""

from ._goalpred import (
    Dataset,
    GoalpredError,
    Model,
    auc,
    channel_names,
    correlation_matrix,
    extract_features,
    generate,
    load_dataset,
    load_model,
    predict_scores,
    run_baselines,
    run_suite,
    save_dataset,
    save_model,
    train,
)

__all__ = [
    "Dataset",
    "GoalpredError",
    "Model",
    "auc",
    "channel_names",
    "correlation_matrix",
    "extract_features",
    "generate",
    "load_dataset",
    "load_model",
    "predict_scores",
    "run_baselines",
    "run_suite",
    "save_dataset",
    "save_model",
    "train",
]
