"""Gait-based perceived emotion recognition."""

from ._core import (
    EMOTIONS,
    JOINTS,
    DataError,
    Gait,
    GaitemoError,
    ParseError,
    Pipeline,
    WalkCycle,
    affective_feature_names,
    affective_features,
    aggregate,
    assign_label,
    detect_foot_strikes,
    extract_walk_cycle,
    feature_window,
    mean_foot_speed,
    normalize_root,
    parse_gait,
    pca,
    read_gait,
    serialize_gait,
    synth_corpus,
    synth_gait,
    train,
    valence_arousal,
    welch_ttest,
    write_gait,
)

__all__ = [
    "EMOTIONS",
    "JOINTS",
    "DataError",
    "Gait",
    "GaitemoError",
    "ParseError",
    "Pipeline",
    "WalkCycle",
    "affective_feature_names",
    "affective_features",
    "aggregate",
    "assign_label",
    "detect_foot_strikes",
    "extract_walk_cycle",
    "feature_window",
    "mean_foot_speed",
    "normalize_root",
    "parse_gait",
    "pca",
    "read_gait",
    "serialize_gait",
    "synth_corpus",
    "synth_gait",
    "train",
    "valence_arousal",
    "welch_ttest",
    "write_gait",
]
