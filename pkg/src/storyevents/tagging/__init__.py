"""Sequence-labeling baselines: LSTM/BiLSTM taggers with optional character
CNN, sentence CNN, document-context sequences, and a linear-chain CRF."""

from .buckets import N_BUCKETS, bucket_index, negative_twin
from .config import TaggerConfig
from .crf import (
    crf_decode,
    crf_log_partition,
    crf_neg_log_likelihood,
    crf_path_score,
    make_transitions,
)
from .model import CharCNN, SentenceCNN, TaggerNet
from .train import (
    TrainedTagger,
    load_tagger,
    predict_tags,
    save_tagger,
    train_tagger,
)
from .vocab import Vocabulary, build_embedding_matrix, load_embedding_table

__all__ = [
    "CharCNN",
    "N_BUCKETS",
    "SentenceCNN",
    "TaggerConfig",
    "TaggerNet",
    "TrainedTagger",
    "Vocabulary",
    "bucket_index",
    "build_embedding_matrix",
    "crf_decode",
    "crf_log_partition",
    "crf_neg_log_likelihood",
    "crf_path_score",
    "load_embedding_table",
    "load_tagger",
    "make_transitions",
    "negative_twin",
    "predict_tags",
    "save_tagger",
    "train_tagger",
]
