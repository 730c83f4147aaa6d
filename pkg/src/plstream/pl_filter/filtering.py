"""Hallucination filters for pseudo-labelled utterances.

Three rejection heuristics run in a fixed order on (normalized) pseudo-labels:

* H1 - the same word repeated ``k`` or more times in a row,
* H2 - some word longer than the per-language maximum word length,
* H3 - a speaking rate (words per second) outside ``[min, max]``.

An utterance is charged to the first heuristic that rejects it.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..corpus import Manifest, NormalizationRules, Utterance, normalize_text
from ..utils.validation import check_finite_real, check_positive_int

logger = logging.getLogger(__name__)

REASONS = ("H1", "H2", "H3")


def load_default_config() -> dict:
    text = resources.files("plstream").joinpath("data/filter_config.json").read_text("utf-8")
    return json.loads(text)


DEFAULT_MAX_WORD_LEN: dict[str, int] = dict(load_default_config()["max_word_len"])


@dataclass(frozen=True)
class FilterConfig:
    repeat_unigram_k: int = 3
    max_word_len: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_MAX_WORD_LEN))
    word_ratio_min: float = 1.0
    word_ratio_max: float = 4.0
    language: str = "en"
    repeat_mode: str = "consecutive"
    normalize_first: bool = True

    def __post_init__(self):
        check_positive_int(self.repeat_unigram_k, "repeat_unigram_k", minimum=2)
        lo = check_finite_real(self.word_ratio_min, "word_ratio_min")
        hi = check_finite_real(self.word_ratio_max, "word_ratio_max")
        if not lo < hi:
            raise ValueError(f"word_ratio_min ({lo}) must be < word_ratio_max ({hi})")
        for lang, n in self.max_word_len.items():
            check_positive_int(n, f"max_word_len[{lang}]")
        if self.repeat_mode not in ("consecutive", "total"):
            raise ValueError(f"repeat_mode must be 'consecutive' or 'total', got {self.repeat_mode!r}")

    @property
    def threshold(self) -> int:
        try:
            return self.max_word_len[self.language]
        except KeyError:
            raise KeyError(f"no max word length configured for language {self.language!r}") from None

    @classmethod
    def from_file(cls, path: str | Path) -> "FilterConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict) -> "FilterConfig":
        base = load_default_config()
        base.update(data)
        base["max_word_len"] = {k.lower(): int(v) for k, v in base["max_word_len"].items()}
        base["language"] = base["language"].lower()
        return cls(**base)

    def to_dict(self) -> dict:
        return {
            "repeat_unigram_k": self.repeat_unigram_k,
            "repeat_mode": self.repeat_mode,
            "max_word_len": dict(self.max_word_len),
            "word_ratio_min": self.word_ratio_min,
            "word_ratio_max": self.word_ratio_max,
            "language": self.language,
            "normalize_first": self.normalize_first,
        }


@dataclass
class FilterReport:
    kept: int = 0
    rejected_counts: dict[str, int] = field(default_factory=lambda: {r: 0 for r in REASONS})
    rejected: list[tuple[str, str]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.kept + len(self.rejected)

    def rejected_ids(self, reason: str | None = None) -> list[str]:
        return [uid for uid, r in self.rejected if reason is None or r == reason]

    def to_dict(self) -> dict:
        return {
            "kept": self.kept,
            "rejected_counts": dict(self.rejected_counts),
            "rejected": [{"id": uid, "reason": r} for uid, r in self.rejected],
        }


def h1_repeated_unigram(text: str, k: int = 3, mode: str = "consecutive") -> bool:
    """True if some word occurs ``k`` or more times (consecutively by default)."""
    words = text.split()
    if mode == "total":
        return any(c >= k for c in Counter(words).values())
    run = 0
    prev = None
    for w in words:
        run = run + 1 if w == prev else 1
        if run >= k:
            return True
        prev = w
    return False


def h2_max_word_len(text: str, threshold: int) -> bool:
    # A word exactly at the threshold is allowed.
    return any(len(w) > threshold for w in text.split())


def h3_word_ratio(text: str, duration_s: float, cfg: FilterConfig | None = None) -> tuple[float, bool]:
    cfg = cfg or FilterConfig()
    if not duration_s > 0:
        raise ValueError(f"duration_s must be > 0 for the word-rate filter, got {duration_s}")
    ratio = len(text.split()) / duration_s
    return ratio, ratio < cfg.word_ratio_min or ratio > cfg.word_ratio_max


def rejection_reason(text: str, duration_s: float, cfg: FilterConfig) -> str | None:
    if h1_repeated_unigram(text, cfg.repeat_unigram_k, cfg.repeat_mode):
        return "H1"
    if h2_max_word_len(text, cfg.threshold):
        return "H2"
    if h3_word_ratio(text, duration_s, cfg)[1]:
        return "H3"
    return None


def apply_filters(
    manifest: Manifest,
    cfg: FilterConfig | None = None,
    model_tag: str = "whisper",
    rules: NormalizationRules | None = None,
) -> tuple[Manifest, FilterReport]:
    """Normalize the ``model_tag`` pseudo-labels and drop hallucinated ones.

    Returns the kept utterances (order preserved, pseudo-label replaced by its
    normalized form) and an accounting report.
    """
    cfg = cfg or FilterConfig()
    rules = rules or NormalizationRules(language=cfg.language)
    for u in manifest:
        if model_tag not in u.pl_text:
            raise KeyError(f"utterance {u.id!r} has no pseudo-label for model tag {model_tag!r}")
    report = FilterReport()
    kept: list[Utterance] = []
    for u in manifest:
        raw = u.pl_text[model_tag]
        normed = normalize_text(raw, rules)
        reason = rejection_reason(normed if cfg.normalize_first else raw, u.duration_s, cfg)
        if reason is None:
            kept.append(u.with_pl(model_tag, normed))
        else:
            report.rejected_counts[reason] += 1
            report.rejected.append((u.id, reason))
    report.kept = len(kept)
    logger.info("filter %s: kept %d of %d (%s)", model_tag, report.kept, report.total,
                report.rejected_counts)
    return Manifest(kept, manifest.source_tag), report


class PseudoLabelFilter(BaseEstimator, TransformerMixin):
    """Estimator wrapper around :func:`apply_filters`.

    With ``max_word_len="auto"``, :meth:`fit` measures the longest word of the
    supervised manifest it is given (reference texts) and uses it as the H2
    threshold; otherwise the per-language table is used and ``fit`` only
    validates parameters.
    """

    def __init__(self, model_tag="whisper", repeat_unigram_k=3, repeat_mode="consecutive",
                 max_word_len=None, word_ratio_min=1.0, word_ratio_max=4.0,
                 language="en", normalize_first=True):
        self.model_tag = model_tag
        self.repeat_unigram_k = repeat_unigram_k
        self.repeat_mode = repeat_mode
        self.max_word_len = max_word_len
        self.word_ratio_min = word_ratio_min
        self.word_ratio_max = word_ratio_max
        self.language = language
        self.normalize_first = normalize_first

    def fit(self, X: Manifest | None = None, y=None):
        table = dict(DEFAULT_MAX_WORD_LEN)
        if self.max_word_len == "auto":
            if X is None:
                raise ValueError("max_word_len='auto' needs a supervised manifest to fit on")
            rules = NormalizationRules(language=self.language)
            longest = max(
                (len(w) for u in X if u.ref_text for w in normalize_text(u.ref_text, rules).split()),
                default=0,
            )
            if longest < 1:
                raise ValueError("supervised manifest has no reference words")
            table[self.language] = longest
        elif isinstance(self.max_word_len, dict):
            table.update(self.max_word_len)
        elif self.max_word_len is not None:
            table[self.language] = self.max_word_len
        self.config_ = FilterConfig(
            repeat_unigram_k=self.repeat_unigram_k,
            max_word_len=table,
            word_ratio_min=self.word_ratio_min,
            word_ratio_max=self.word_ratio_max,
            language=self.language,
            repeat_mode=self.repeat_mode,
            normalize_first=self.normalize_first,
        )
        self.threshold_ = self.config_.threshold
        return self

    def transform(self, X: Manifest) -> Manifest:
        check_is_fitted(self, "config_")
        kept, self.report_ = apply_filters(X, self.config_, self.model_tag)
        return kept
