"""Persian text normalization and GloVe / word2vec embedding training."""

from ._farsivec import (
    ConfigError,
    Embeddings,
    Error,
    InconsistentFilesError,
    InsufficientDataError,
    NotInVocabularyError,
    ParseError,
    TrainingDivergedError,
    Vocabulary,
    build_vocabulary,
    cooccurrence,
    cosine,
    encode,
    extract_html_text,
    fix_pseudo_space,
    glove_weight,
    normalize,
    parse_lbl,
    run_train,
    separate_marks,
    split_sentences,
    strip_tags,
    tokenize,
    train_glove,
    train_word2vec,
)

__all__ = [
    "ConfigError",
    "Embeddings",
    "Error",
    "InconsistentFilesError",
    "InsufficientDataError",
    "NotInVocabularyError",
    "ParseError",
    "TrainingDivergedError",
    "Vocabulary",
    "build_vocabulary",
    "cooccurrence",
    "cosine",
    "encode",
    "extract_html_text",
    "fix_pseudo_space",
    "glove_weight",
    "normalize",
    "parse_lbl",
    "run_train",
    "separate_marks",
    "split_sentences",
    "strip_tags",
    "tokenize",
    "train_glove",
    "train_word2vec",
]
