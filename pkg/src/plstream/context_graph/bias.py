"""Named-entity bias lists."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from ..corpus import NormalizationRules, normalize_text

MAX_WORDS = 4
MIN_SINGLE_WORD_CHARS = 5


@dataclass(frozen=True)
class BiasEntry:
    phrase: tuple[str, ...]
    source: str = "NE"

    def __post_init__(self):
        words = tuple(self.phrase)
        object.__setattr__(self, "phrase", words)
        if not 1 <= len(words) <= MAX_WORDS:
            raise ValueError(f"bias phrase must have 1..{MAX_WORDS} words, got {len(words)}")
        if len(words) == 1 and len(words[0]) < MIN_SINGLE_WORD_CHARS:
            raise ValueError(f"single-word bias phrase {words[0]!r} is shorter than "
                             f"{MIN_SINGLE_WORD_CHARS} characters")

    @property
    def text(self) -> str:
        return " ".join(self.phrase)


def keep_phrase(words: tuple[str, ...]) -> bool:
    if not 1 <= len(words) <= MAX_WORDS:
        return False
    return not (len(words) == 1 and len(words[0]) < MIN_SINGLE_WORD_CHARS)


def curate_bias_list(raw_entries: Iterable[str | Iterable[str]],
                     rules: NormalizationRules | None = None,
                     source: str = "NE") -> list[BiasEntry]:
    """Normalize raw entity strings and keep 1-4 word phrases.

    Single words under five characters are dropped, as are exact duplicates
    (first occurrence wins). Case is folded with the same rules as transcripts
    so phrases match LM n-grams.
    """
    rules = rules or NormalizationRules()
    out: list[BiasEntry] = []
    seen: set[tuple[str, ...]] = set()
    for raw in raw_entries:
        text = raw if isinstance(raw, str) else " ".join(raw)
        words = tuple(normalize_text(text, rules).split())
        if not keep_phrase(words) or words in seen:
            continue
        seen.add(words)
        out.append(BiasEntry(words, source))
    return out


def read_bias_list(path: str | Path, rules: NormalizationRules | None = None) -> list[BiasEntry]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return curate_bias_list((ln for ln in lines if ln.strip()), rules)
