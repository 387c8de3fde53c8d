"""Corpus pipeline: BRAT standoff I/O, tokenization, alignment, splits,
statistics, label sequences, validation, and JSONL interchange."""

from .align import align_spans, align_story_sentences, build_sentences
from .brat import parse_brat, write_brat
from .jsonl import read_jsonl, write_jsonl
from .labels import (
    CLASSIFY,
    DETECT,
    decode_labels,
    label_set,
    spans_to_mentions,
    to_label_sequence,
)
from .splits import load_split_manifests, read_manifest, split_corpus, write_manifest
from .stats import compute_stats
from .tokenization import split_sentences, tokenize
from .types import (
    SOURCES,
    SPLITS,
    AnnotatedSentence,
    Corpus,
    DatasetStats,
    EventClass,
    EventMention,
    Story,
    TriggerSpan,
    TriggerStat,
    infer_source,
)
from .validate import Violation, validate_corpus, validate_story

__all__ = [
    "AnnotatedSentence",
    "CLASSIFY",
    "Corpus",
    "DETECT",
    "DatasetStats",
    "EventClass",
    "EventMention",
    "SOURCES",
    "SPLITS",
    "Story",
    "TriggerSpan",
    "TriggerStat",
    "Violation",
    "align_spans",
    "align_story_sentences",
    "build_sentences",
    "compute_stats",
    "decode_labels",
    "infer_source",
    "label_set",
    "load_split_manifests",
    "parse_brat",
    "read_jsonl",
    "read_manifest",
    "spans_to_mentions",
    "split_corpus",
    "split_sentences",
    "tokenize",
    "to_label_sequence",
    "validate_corpus",
    "validate_story",
    "write_brat",
    "write_jsonl",
    "write_manifest",
]
