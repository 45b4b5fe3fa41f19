"""Cause-effect triplet extraction: causality tagging scheme, combinatorial
triplet decoding, and a self-attentive BiLSTM-CRF sequence tagger."""

from .scheme import (
    CausalSpan,
    CausalTriplet,
    CausalityClass,
    Sentence,
    TAGS,
    encode_triplets,
    extract_spans,
    classify_causality,
    repair_tags,
    validate_tags,
)
from .decoder import DecoderConfig, decode_tags, tag2triplet
from .corpus import Corpus, corpus_stats, read_corpus, split_validation, write_corpus
from .embeddings import (
    ContextualStore,
    EmbeddingTable,
    assemble_inputs,
    init_char_table,
    load_contextual,
    load_word_table,
)
from .evaluate import Metrics, aggregate_runs, single_ratios, triplet_prf
from .train import TrainConfig, train

__all__ = [
    "CausalSpan", "CausalTriplet", "CausalityClass", "Sentence", "TAGS",
    "encode_triplets", "extract_spans", "classify_causality", "repair_tags",
    "validate_tags", "DecoderConfig", "decode_tags", "tag2triplet",
    "Corpus", "corpus_stats", "read_corpus", "split_validation", "write_corpus",
    "ContextualStore", "EmbeddingTable", "assemble_inputs", "init_char_table",
    "load_contextual", "load_word_table",
    "Metrics", "aggregate_runs", "single_ratios", "triplet_prf",
    "TrainConfig", "train",
]
