"""Bangla next-word prediction and sentence completion toolkit."""

__version__ = "0.1.0"

from .backoff import BackoffModel, CountTable, count_ngrams, predict_next_statistical
from .dataset import NGramDataset, build_dataset, dataset_stats
from .errors import (
    BanglanextError,
    EmptyBatch,
    EmptyContext,
    EmptyCorpus,
    FormatVersionError,
    IdOutOfRange,
    InvalidEncoding,
    MissingModel,
    OrderMismatch,
    OrderOutOfRange,
    ShapeMismatch,
    UnseenContext,
)
from .neural import (
    LstmCellParams,
    ModelConfig,
    NeuralModel,
    forward,
    init_model,
    load_model,
    loss_and_grads,
    lstm_step,
    predict_topk,
    save_model,
)
from .predictor import (
    Completion,
    ModelBundle,
    Suggestion,
    complete_sentence,
    route,
    suggest,
)
from .text import (
    CleaningConfig,
    RawDocument,
    Vocabulary,
    build_vocabulary,
    normalize,
    split_sentences,
    tokenize,
)
from .training import TrainOptions, TrainReport, train

__all__ = [name for name in dir() if not name.startswith("_")]
