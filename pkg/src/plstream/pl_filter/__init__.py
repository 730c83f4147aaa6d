from .filtering import (
    DEFAULT_MAX_WORD_LEN,
    FilterConfig,
    FilterReport,
    PseudoLabelFilter,
    apply_filters,
    h1_repeated_unigram,
    h2_max_word_len,
    h3_word_ratio,
)
from .mux import MuxSchedule, mux
from .selection import (
    PSEUDO_WER,
    MetricSelector,
    SelectionPolicy,
    attach_perplexity,
    cross_model_wer,
    select,
)

__all__ = [
    "DEFAULT_MAX_WORD_LEN", "FilterConfig", "FilterReport", "PseudoLabelFilter",
    "apply_filters", "h1_repeated_unigram", "h2_max_word_len", "h3_word_ratio",
    "MuxSchedule", "mux", "PSEUDO_WER", "MetricSelector", "SelectionPolicy",
    "attach_perplexity", "cross_model_wer", "select",
]
