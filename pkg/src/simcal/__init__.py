"""simcal: similarity threshold calibration over sentence embeddings.

Learns a tied-weight projection over precomputed embeddings, derives the
similarity threshold from the crossing of the right-match and
wrong-match distance distributions, and scores new predictions with
histogram-derived 0-100 accuracy tables.
"""

from ._kernels import backend_name
from .calibration import (
    CalibrationResult,
    DistributionPair,
    build_distributions,
    calibrate,
    classify,
    find_threshold,
    mislabel_rate,
)
from .dataio import (
    CleaningConfig,
    EmbeddingRecord,
    PairExample,
    clean_text,
    generate_negatives,
    read_embeddings,
    read_pairs,
    sick_convert,
    toy_embed,
    write_embeddings,
    write_pairs,
)
from .distances import DistanceKind, SquashKind, distance, pair_output, pairwise_distance, squash
from .model import ProjectionModel, forward_batch, forward_pair, initialize_model, loss_and_grad
from .scoring import (
    AccuracyTable,
    ScoredPrediction,
    Side,
    build_accuracy_table,
    load_accuracy_table,
    rescale,
    save_accuracy_table,
    score_prediction,
)
from .training import Adam, TrainConfig, TrainHistory, clip_gradients, fit, load_model, save_model

__version__ = "0.1.0"

__all__ = [
    "AccuracyTable",
    "Adam",
    "CalibrationResult",
    "CleaningConfig",
    "DistanceKind",
    "DistributionPair",
    "EmbeddingRecord",
    "PairExample",
    "ProjectionModel",
    "ScoredPrediction",
    "Side",
    "SquashKind",
    "TrainConfig",
    "TrainHistory",
    "backend_name",
    "build_accuracy_table",
    "build_distributions",
    "calibrate",
    "classify",
    "clean_text",
    "clip_gradients",
    "distance",
    "find_threshold",
    "fit",
    "forward_batch",
    "forward_pair",
    "generate_negatives",
    "initialize_model",
    "load_accuracy_table",
    "load_model",
    "loss_and_grad",
    "mislabel_rate",
    "pair_output",
    "pairwise_distance",
    "read_embeddings",
    "read_pairs",
    "rescale",
    "save_accuracy_table",
    "save_model",
    "score_prediction",
    "sick_convert",
    "squash",
    "toy_embed",
    "write_embeddings",
    "write_pairs",
]
