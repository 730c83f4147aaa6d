"""Transcript normalization: punctuation stripping, number verbalization, casing."""

from __future__ import annotations

import re
import unicodedata
import warnings
from dataclasses import dataclass

_ONES = (
    "zero one two three four five six seven eight nine ten eleven twelve "
    "thirteen fourteen fifteen sixteen seventeen eighteen nineteen"
).split()
_TENS = "_ _ twenty thirty forty fifty sixty seventy eighty ninety".split()

# Digit names for languages without a full verbalization table.
_DIGITS = {
    "ca": "zero u dos tres quatre cinc sis set vuit nou".split(),
    "de": "null eins zwei drei vier fünf sechs sieben acht neun".split(),
    "es": "cero uno dos tres cuatro cinco seis siete ocho nueve".split(),
    "fr": "zéro un deux trois quatre cinq six sept huit neuf".split(),
    "it": "zero uno due tre quattro cinque sei sette otto nove".split(),
}
SUPPORTED_LANGUAGES = ("en",) + tuple(_DIGITS)

_APOSTROPHES = {"'", "’"}
_DIGIT_RUN = re.compile(r"\d+")


class UnsupportedLanguageError(ValueError):
    def __init__(self, language: str):
        self.language = language
        super().__init__(
            f"no number verbalization table for language {language!r}; "
            "disable verbalize_numbers or use one of " + ", ".join(SUPPORTED_LANGUAGES)
        )


@dataclass(frozen=True)
class NormalizationRules:
    uppercase: bool = True
    strip_punctuation: bool = True
    verbalize_numbers: bool = True
    language: str = "en"


def _en_below_thousand(n: int) -> list[str]:
    words: list[str] = []
    hundreds, rest = divmod(n, 100)
    if hundreds:
        words += [_ONES[hundreds], "hundred"]
    if rest or not words:
        if rest < 20:
            if rest or not words:
                words.append(_ONES[rest])
        else:
            tens, ones = divmod(rest, 10)
            words.append(_TENS[tens])
            if ones:
                words.append(_ONES[ones])
    return words


def number_to_words_en(n: int) -> str:
    """Spell out ``0 <= n <= 999_999`` in English, e.g. 1205 -> 'one thousand two hundred five'."""
    if not 0 <= n <= 999_999:
        raise ValueError(f"{n} outside the 0..999,999 table")
    thousands, rest = divmod(n, 1000)
    words: list[str] = []
    if thousands:
        words += _en_below_thousand(thousands) + ["thousand"]
    if rest or not words:
        words += _en_below_thousand(rest)
    return " ".join(words)


def _digit_names(language: str) -> list[str]:
    if language == "en":
        return _ONES[:10]
    return _DIGITS[language]


def verbalize_digits(text: str, language: str) -> str:
    if language not in SUPPORTED_LANGUAGES:
        raise UnsupportedLanguageError(language)
    names = _digit_names(language)
    fallback_used = False

    def spell(match: re.Match) -> str:
        nonlocal fallback_used
        group = match.group(0)
        digits = [int(ch) for ch in group]
        if language == "en" and len(group) <= 6 and not (len(group) > 1 and group[0] == "0"):
            return f" {number_to_words_en(int(group))} "
        if language != "en":
            fallback_used = True
        return " " + " ".join(names[d] for d in digits) + " "

    out = _DIGIT_RUN.sub(spell, text)
    if fallback_used:
        warnings.warn(
            f"digit-by-digit number spelling used for language {language!r}",
            stacklevel=3,
        )
    return out


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or unicodedata.category(ch).startswith("M")


def strip_punctuation(text: str) -> str:
    """Replace Unicode punctuation (categories P*) with spaces.

    Apostrophes between two word characters survive so contractions stay intact.
    """
    out = []
    n = len(text)
    for i, ch in enumerate(text):
        if not unicodedata.category(ch).startswith("P"):
            out.append(ch)
            continue
        if (
            ch in _APOSTROPHES
            and 0 < i < n - 1
            and _is_word_char(text[i - 1])
            and _is_word_char(text[i + 1])
        ):
            out.append(ch)
        else:
            out.append(" ")
    return "".join(out)


def _normalize_once(text: str, rules: NormalizationRules) -> str:
    text = unicodedata.normalize("NFKC", text)
    if rules.strip_punctuation:
        text = strip_punctuation(text)
    if rules.verbalize_numbers:
        text = verbalize_digits(text, rules.language)
    if rules.uppercase:
        text = text.upper()
    return " ".join(text.split())


def normalize_text(text: str, rules: NormalizationRules | None = None) -> str:
    """Normalize a transcript; the result is a fixpoint of this function."""
    rules = rules or NormalizationRules()
    if rules.verbalize_numbers and rules.language not in SUPPORTED_LANGUAGES:
        raise UnsupportedLanguageError(rules.language)
    # A single pass is almost always stable; NFKC/casing interactions on exotic
    # code points can need one more.
    prev = text
    for _ in range(8):
        cur = _normalize_once(prev, rules)
        if cur == prev:
            return cur
        prev = cur
    return prev
