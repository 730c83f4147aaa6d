"""Byte-pair style subword vocabulary with a word-initial marker."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..utils.validation import check_positive_int

WORD_START = "▁"
UNK_PIECE = "<unk>"


@dataclass(frozen=True)
class SubwordVocab:
    """Pieces are numbered from 1; id 0 is ``<unk>`` and ``size`` is the blank id."""

    pieces: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)
    _max_len: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.pieces)) != len(self.pieces):
            raise ValueError("duplicate pieces in vocabulary")
        object.__setattr__(self, "_index", {p: i + 1 for i, p in enumerate(self.pieces)})
        object.__setattr__(self, "_max_len", max((len(p) for p in self.pieces), default=1))

    unk_id = 0

    @property
    def size(self) -> int:
        """Number of non-blank ids (pieces plus ``<unk>``)."""
        return len(self.pieces) + 1

    @property
    def blank_id(self) -> int:
        return self.size

    def id_to_piece(self, idx: int) -> str:
        if idx == self.unk_id:
            return UNK_PIECE
        if 1 <= idx <= len(self.pieces):
            return self.pieces[idx - 1]
        raise IndexError(f"token id {idx} out of range")

    def piece_to_id(self, piece: str) -> int:
        return self._index.get(piece, self.unk_id)

    def encode_word(self, word: str) -> list[int]:
        s = WORD_START + word
        out: list[int] = []
        i, n = 0, len(s)
        while i < n:
            for length in range(min(self._max_len, n - i), 0, -1):
                idx = self._index.get(s[i:i + length])
                if idx is not None:
                    out.append(idx)
                    i += length
                    break
            else:
                out.append(self.unk_id)
                i += 2 if i == 0 else 1
        return out

    def encode(self, text: str) -> list[int]:
        ids: list[int] = []
        for w in text.split():
            ids.extend(self.encode_word(w))
        return ids

    def decode(self, ids: Iterable[int]) -> str:
        return "".join(self.id_to_piece(int(i)) for i in ids).replace(WORD_START, " ").strip()

    def to_dict(self) -> dict:
        return {"format": "plstream-subword-v1", "pieces": list(self.pieces)}

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), ensure_ascii=False, indent=1), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SubwordVocab":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if data.get("format") != "plstream-subword-v1":
            raise ValueError(f"{path}: not a subword vocabulary file")
        return cls(tuple(data["pieces"]))


def base_alphabet(words: Iterable[str]) -> list[str]:
    chars = sorted({ch for w in words for ch in w})
    return chars + [WORD_START + ch for ch in chars]


def train_subwords(corpus: Iterable[str], vocab_size: int | None) -> SubwordVocab:
    """Learn ``vocab_size`` pieces by greedy pair merging.

    Starts from every corpus character in a plain and a word-initial form, then
    repeatedly merges the most frequent adjacent pair (ties broken by the
    lexicographically smallest pair). ``vocab_size=None`` keeps merging until
    no new pair is left.
    """
    exhaust = vocab_size is None
    vocab_size = float("inf") if exhaust else check_positive_int(vocab_size, "vocab_size")
    word_freq = Counter(w for line in corpus for w in line.split())
    pieces = base_alphabet(word_freq)
    if vocab_size < len(pieces):
        raise ValueError(f"vocab_size {vocab_size} is below the alphabet size {len(pieces)}")
    known = set(pieces)
    segs = {w: [WORD_START + w[0], *w[1:]] for w in word_freq}
    while len(pieces) < vocab_size:
        pairs: Counter = Counter()
        for w, sym in segs.items():
            f = word_freq[w]
            for a, b in zip(sym, sym[1:]):
                pairs[(a, b)] += f
        candidates = [(c, p) for p, c in pairs.items() if p[0] + p[1] not in known]
        if not candidates:
            if exhaust:
                break
            raise ValueError(
                f"corpus supports only {len(pieces)} pieces, cannot reach vocab_size {vocab_size}"
            )
        best_count = max(c for c, _ in candidates)
        a, b = min(p for c, p in candidates if c == best_count)
        merged = a + b
        pieces.append(merged)
        known.add(merged)
        for w, sym in segs.items():
            if len(sym) < 2:
                continue
            out, i = [], 0
            while i < len(sym):
                if i + 1 < len(sym) and sym[i] == a and sym[i + 1] == b:
                    out.append(merged)
                    i += 2
                else:
                    out.append(sym[i])
                    i += 1
            segs[w] = out
    return SubwordVocab(tuple(pieces))


def tokenize(vocab: SubwordVocab, text: str) -> list[int]:
    return vocab.encode(text)


def detokenize(vocab: SubwordVocab, ids: Sequence[int]) -> str:
    return vocab.decode(ids)


class SubwordTokenizer(BaseEstimator, TransformerMixin):
    """``vocab_size=None`` merges until every word is covered as far as possible."""

    def __init__(self, vocab_size=200):
        self.vocab_size = vocab_size

    def fit(self, X: Iterable[str], y=None):
        self.vocab_ = train_subwords(X, self.vocab_size)
        return self

    def transform(self, X: Iterable[str]) -> list[list[int]]:
        check_is_fitted(self, "vocab_")
        return [self.vocab_.encode(t) for t in X]

    def inverse_transform(self, X: Iterable[Sequence[int]]) -> list[str]:
        check_is_fitted(self, "vocab_")
        return [self.vocab_.decode(ids) for ids in X]
