"""Multi-task corpus augmentation and hallucination auditing for MT pipelines."""

from .align import (
    BilingualLexicon,
    OneToOneAlignment,
    WordAlignment,
    as_one_to_one,
    build_lexicon,
    intersect,
    parse_alignment_line,
    read_lexicon_tsv,
    write_lexicon_tsv,
)
from .errors import ConfigError, DataError
from .metrics import (
    AdjustedBleu,
    HallucinationReport,
    Histogram,
    adjusted_bleu,
    disjoint_hallucinations,
    is_hallucination,
    score_histogram,
    score_sentences,
    single_system_report,
)
from .pipeline import (
    AugmentConfig,
    CorpusStats,
    Manifest,
    augment_corpus,
    build_lexicon_from_files,
    corpus_stats,
    filter_pair,
    line_rng,
)
from .transform import (
    SentencePair,
    TaskContext,
    TaskSpec,
    apply_task,
    copy_source,
    make_task,
    monotone_reorder,
    replace_aligned,
    reverse,
    swap,
    token_mask,
)

__version__ = "0.1.0"

__all__ = [
    "AdjustedBleu",
    "AugmentConfig",
    "BilingualLexicon",
    "ConfigError",
    "CorpusStats",
    "DataError",
    "HallucinationReport",
    "Histogram",
    "Manifest",
    "OneToOneAlignment",
    "SentencePair",
    "TaskContext",
    "TaskSpec",
    "WordAlignment",
    "adjusted_bleu",
    "apply_task",
    "as_one_to_one",
    "augment_corpus",
    "build_lexicon",
    "build_lexicon_from_files",
    "copy_source",
    "corpus_stats",
    "disjoint_hallucinations",
    "filter_pair",
    "intersect",
    "is_hallucination",
    "line_rng",
    "make_task",
    "monotone_reorder",
    "parse_alignment_line",
    "read_lexicon_tsv",
    "replace_aligned",
    "reverse",
    "score_histogram",
    "score_sentences",
    "single_system_report",
    "swap",
    "token_mask",
    "write_lexicon_tsv",
]
