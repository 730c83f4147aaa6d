from .manifest import (
    Manifest,
    ManifestError,
    Utterance,
    load_manifest,
    read_manifest,
    write_manifest,
)
from .normalize import (
    NormalizationRules,
    UnsupportedLanguageError,
    normalize_text,
    number_to_words_en,
)
from .wer import (
    EditOp,
    WerBreakdown,
    corpus_wer,
    edit_alignment,
    edit_distance,
    wer,
    word_breakdown,
)

__all__ = [
    "Manifest", "ManifestError", "Utterance", "load_manifest", "read_manifest",
    "write_manifest", "NormalizationRules", "UnsupportedLanguageError",
    "normalize_text", "number_to_words_en", "EditOp", "WerBreakdown",
    "corpus_wer", "edit_alignment", "edit_distance", "wer", "word_breakdown",
]
