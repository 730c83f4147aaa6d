"""Levenshtein word alignment and word error rate."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .normalize import NormalizationRules, normalize_text

MATCH, SUB, INS, DEL = "match", "sub", "ins", "del"


@dataclass(frozen=True)
class EditOp:
    op: str
    ref: str | None
    hyp: str | None


@dataclass(frozen=True)
class WerBreakdown:
    substitutions: int
    insertions: int
    deletions: int
    ref_words: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.insertions + self.deletions

    @property
    def wer(self) -> float:
        if self.ref_words == 0:
            raise ValueError("WER is undefined for an empty reference")
        return self.errors / self.ref_words

    def __add__(self, other: "WerBreakdown") -> "WerBreakdown":
        return WerBreakdown(
            self.substitutions + other.substitutions,
            self.insertions + other.insertions,
            self.deletions + other.deletions,
            self.ref_words + other.ref_words,
        )

    def to_dict(self) -> dict:
        return {
            "wer": self.wer,
            "sub": self.substitutions,
            "ins": self.insertions,
            "del": self.deletions,
            "ref_words": self.ref_words,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _cost_table(ref: Sequence[str], hyp: Sequence[str]) -> list[list[int]]:
    n, m = len(ref), len(hyp)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        d[i][0] = i
    for j in range(1, m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        ri = ref[i - 1]
        row, prev = d[i], d[i - 1]
        for j in range(1, m + 1):
            diag = prev[j - 1] + (ri != hyp[j - 1])
            row[j] = min(diag, row[j - 1] + 1, prev[j] + 1)
    return d


def edit_distance(ref: Sequence[str], hyp: Sequence[str]) -> int:
    return _cost_table(ref, hyp)[len(ref)][len(hyp)]


def edit_alignment(ref_words: Sequence[str], hyp_words: Sequence[str]) -> list[EditOp]:
    """Minimum-cost alignment of two word sequences.

    When several predecessors are optimal the backtrace prefers the diagonal
    (match/substitution), then insertion, then deletion.
    """
    ref, hyp = list(ref_words), list(hyp_words)
    d = _cost_table(ref, hyp)
    ops: list[EditOp] = []
    i, j = len(ref), len(hyp)
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            same = ref[i - 1] == hyp[j - 1]
            if d[i][j] == d[i - 1][j - 1] + (not same):
                ops.append(EditOp(MATCH if same else SUB, ref[i - 1], hyp[j - 1]))
                i, j = i - 1, j - 1
                continue
        if j > 0 and d[i][j] == d[i][j - 1] + 1:
            ops.append(EditOp(INS, None, hyp[j - 1]))
            j -= 1
            continue
        ops.append(EditOp(DEL, ref[i - 1], None))
        i -= 1
    ops.reverse()
    return ops


def count_edits(ops: Iterable[EditOp], ref_words: int) -> WerBreakdown:
    s = i = d = 0
    for op in ops:
        if op.op == SUB:
            s += 1
        elif op.op == INS:
            i += 1
        elif op.op == DEL:
            d += 1
    return WerBreakdown(s, i, d, ref_words)


def word_breakdown(ref_words: Sequence[str], hyp_words: Sequence[str]) -> WerBreakdown:
    return count_edits(edit_alignment(ref_words, hyp_words), len(ref_words))


def wer(ref: str, hyp: str, rules: NormalizationRules | None = None) -> WerBreakdown:
    """Word error rate of ``hyp`` against ``ref`` after normalizing both sides."""
    rules = rules or NormalizationRules()
    ref_words = normalize_text(ref, rules).split()
    if not ref_words:
        raise ValueError("reference is empty after normalization; WER undefined")
    hyp_words = normalize_text(hyp, rules).split()
    return word_breakdown(ref_words, hyp_words)


def corpus_wer(pairs: Iterable[tuple[str, str]],
               rules: NormalizationRules | None = None) -> WerBreakdown:
    """Pooled breakdown over ``(ref, hyp)`` pairs (errors / total reference words)."""
    total = WerBreakdown(0, 0, 0, 0)
    for ref, hyp in pairs:
        total = total + wer(ref, hyp, rules)
    return total


__all__ = [
    "EditOp", "WerBreakdown", "edit_alignment", "edit_distance", "count_edits",
    "word_breakdown", "wer", "corpus_wer", "MATCH", "SUB", "INS", "DEL",
]
