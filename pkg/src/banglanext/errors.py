"""Exception types raised by the toolkit."""


class BanglanextError(Exception):
    """Base class for all toolkit errors."""


class InvalidEncoding(BanglanextError):
    """Input bytes are not valid UTF-8 (or the text carries surrogates)."""


class EmptyCorpus(BanglanextError):
    """No sentences available to build a vocabulary or dataset from."""


class OrderOutOfRange(BanglanextError):
    """Requested n-gram order is outside the supported range 1..5."""


class UnseenContext(BanglanextError):
    """Maximum-likelihood probability is undefined: context count is zero."""


class ShapeMismatch(BanglanextError):
    """Tensor shapes do not agree with the model configuration."""


class IdOutOfRange(BanglanextError):
    """A token id lies outside the vocabulary."""


class EmptyBatch(BanglanextError):
    """Loss/gradient computation needs at least one example."""


class OrderMismatch(BanglanextError):
    """Dataset order does not match the model's context length."""


class EmptyContext(BanglanextError):
    """Prediction requires at least one context token."""


class MissingModel(BanglanextError):
    """The bundle has no model for the requested order or engine."""


class FormatVersionError(BanglanextError):
    """A persisted artifact carries an unsupported format version."""
