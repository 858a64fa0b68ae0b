"""Python bindings for the legalner toolkit."""
from ._legalner import (
    AdapterError,
    AlignmentError,
    Corpus,
    Error,
    ModelFormatError,
    ParameterError,
    ParseError,
    ValidationError,
    Vocab,
    aggregate_table,
    convert_scheme,
    cross_validate,
    decode_labels,
    electra_losses,
    encode_labels,
    f1_score,
    inject_noise,
    is_valid,
    kmeans,
    metrics,
    nfc,
    segment_sentences,
    stratified_partition,
    transliterate,
    word_tokenize,
    wordpiece_tokenize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
