"""Word-level backoff n-gram language model.

Probabilities and backoff weights are kept in log10, as in ARPA files. Two
discounting schemes are available:

``witten-bell``
    For a context ``h`` with ``c(h)`` continuation tokens of ``T(h)`` distinct
    types, a seen word gets ``c(h, w) / (c(h) + T(h))``. Unigrams interpolate
    with a uniform distribution over the vocabulary so ``<unk>`` keeps mass.

``add-k``
    Seen words get ``(c(h, w) + k) / (c(h) + k |V|)``; at the unigram level every
    vocabulary word is "seen".

In both cases the leftover mass of a context is handed to the shorter context
through a backoff weight normalized over the words the context did not see,
so every conditional distribution sums to one.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..utils.validation import check_finite_real, check_positive_int

BOS, EOS, UNK = "<s>", "</s>", "<unk>"
# log10 probability ARPA files conventionally give the unpredictable <s>.
BOS_LOGPROB = -99.0

Ngram = tuple[str, ...]


class NGramLM(BaseEstimator):
    """Backoff n-gram LM with a scikit-learn style ``fit``.

    After fitting, ``entries_[n]`` maps each n-gram to ``(logprob, backoff)``;
    the backoff is ``None`` for the highest order.
    """

    def __init__(self, order=3, smoothing="witten-bell", k=1.0, prune_min_count=1):
        self.order = order
        self.smoothing = smoothing
        self.k = k
        self.prune_min_count = prune_min_count

    # ------------------------------------------------------------------ fit
    def fit(self, X: Iterable[str], y=None):
        order = check_positive_int(self.order, "order")
        check_positive_int(self.prune_min_count, "prune_min_count")
        if self.smoothing not in ("witten-bell", "add-k"):
            raise ValueError(f"smoothing must be 'witten-bell' or 'add-k', got {self.smoothing!r}")
        if self.smoothing == "add-k" and check_finite_real(self.k, "k") <= 0:
            raise ValueError("k must be > 0 for add-k smoothing")

        sentences = [s.split() for s in X]
        if not sentences:
            raise ValueError("cannot train a language model on an empty corpus")

        counts = count_ngrams(sentences, order)
        for n in range(2, order + 1):
            counts[n] = Counter({g: c for g, c in counts[n].items() if c >= self.prune_min_count})
        self.counts_ = counts

        vocab = sorted({g[0] for g in counts[1]} | {EOS, UNK})
        self.vocab_ = frozenset(vocab) | {BOS}
        self._predictable = tuple(vocab)
        self.entries_ = {n: {} for n in range(1, order + 1)}
        self._estimate_unigrams(counts[1], vocab)
        for n in range(2, order + 1):
            self._estimate_order(n, counts[n], len(vocab))
        for v in self.entries_[order].values():
            v[1] = None
        return self

    def _estimate_unigrams(self, uni: Counter, vocab: Sequence[str]) -> None:
        total = sum(uni.values())
        size = len(vocab)
        entries = self.entries_[1]
        if self.smoothing == "witten-bell":
            types = sum(1 for c in uni.values() if c > 0)
            denom = total + types
            for w in vocab:
                entries[(w,)] = [math.log10((uni.get((w,), 0) + types / size) / denom), 0.0]
        else:
            denom = total + self.k * size
            for w in vocab:
                entries[(w,)] = [math.log10((uni.get((w,), 0) + self.k) / denom), 0.0]
        entries[(BOS,)] = [BOS_LOGPROB, 0.0]

    def _estimate_order(self, n: int, grams: Counter, vocab_size: int) -> None:
        by_context: dict[Ngram, dict[str, int]] = defaultdict(dict)
        for g, c in grams.items():
            by_context[g[:-1]][g[-1]] = c
        entries = self.entries_[n]
        lower = self.entries_[n - 1]
        for h in sorted(by_context):
            conts = by_context[h]
            c_h = sum(conts.values())
            t_h = len(conts)
            if self.smoothing == "witten-bell":
                probs = {w: c / (c_h + t_h) for w, c in conts.items()}
            else:
                denom = c_h + self.k * vocab_size
                probs = {w: (c + self.k) / denom for w, c in conts.items()}
            for w, p in probs.items():
                entries[h + (w,)] = [math.log10(p), 0.0]
            left = 1.0 - math.fsum(probs.values())
            lower_seen = math.fsum(10.0 ** self._logprob(h[1:], w) for w in conts)
            lower[h][1] = math.log10(left) - math.log10(1.0 - lower_seen)

    # ----------------------------------------------------------- scoring
    def _logprob(self, context: Ngram, word: str) -> float:
        n = len(context) + 1
        hit = self.entries_[n].get(context + (word,)) if n <= len(self.entries_) else None
        if hit is not None:
            return hit[0]
        ctx = self.entries_[n - 1].get(context)
        bow = ctx[1] if ctx is not None and ctx[1] is not None else 0.0
        return bow + self._logprob(context[1:], word)

    def map_word(self, word: str) -> str:
        return word if word in self.vocab_ else UNK

    def logprob(self, context: Sequence[str], word: str) -> float:
        """log10 P(word | context) with Katz-style backoff.

        Only the last ``order - 1`` context words are used; out-of-vocabulary
        words map to ``<unk>``.
        """
        check_is_fitted(self, "entries_")
        keep = len(self.entries_) - 1
        ctx = tuple(self.map_word(w) for w in context)
        ctx = ctx[len(ctx) - keep:] if keep else ()
        return self._logprob(ctx, self.map_word(word))

    def sentence_logprob(self, text: str) -> tuple[float, int]:
        """Total log10 probability of ``text`` (with ``</s>``) and the token count."""
        words = text.split()
        history = [BOS]
        total = 0.0
        for w in words + [EOS]:
            total += self.logprob(history, w)
            history.append(w)
        return total, len(words) + 1

    def perplexity(self, text: str) -> float:
        if not text.split():
            raise ValueError("perplexity of an empty text is undefined")
        total, n = self.sentence_logprob(text)
        return 10.0 ** (-total / n)

    def corpus_perplexity(self, texts: Iterable[str]) -> float:
        total = 0.0
        count = 0
        for t in texts:
            if not t.split():
                continue
            lp, n = self.sentence_logprob(t)
            total += lp
            count += n
        if not count:
            raise ValueError("perplexity of an empty corpus is undefined")
        return 10.0 ** (-total / count)

    def score(self, X, y=None) -> float:
        """Negative corpus perplexity (larger is better)."""
        return -self.corpus_perplexity(X)

    def context_mass(self, context: Sequence[str]) -> float:
        """Sum of P(w | context) over every predictable word."""
        return math.fsum(10.0 ** self.logprob(context, w) for w in self.predictable_words)

    # ------------------------------------------------------------ access
    @property
    def predictable_words(self) -> tuple[str, ...]:
        check_is_fitted(self, "entries_")
        return self._predictable

    @property
    def max_order(self) -> int:
        check_is_fitted(self, "entries_")
        return len(self.entries_)

    def contains(self, words: Sequence[str]) -> bool:
        n = len(words)
        return 1 <= n <= self.max_order and tuple(words) in self.entries_[n]

    def ngram_logprob(self, words: Sequence[str]) -> float:
        """Stored log10 probability of an n-gram entry (KeyError if absent)."""
        return self.entries_[len(words)][tuple(words)][0]

    def iter_entries(self):
        """Yield ``(ngram, logprob, backoff)`` in order, then lexicographically."""
        for n in sorted(self.entries_):
            for g in sorted(self.entries_[n]):
                lp, bo = self.entries_[n][g]
                yield g, lp, bo

    def num_entries(self) -> int:
        return sum(len(v) for v in self.entries_.values())

    @classmethod
    def from_entries(cls, entries: dict[int, dict[Ngram, tuple[float, float | None]]]) -> "NGramLM":
        order = max(entries)
        lm = cls(order=order)
        lm.entries_ = {n: {g: [lp, bo] for g, (lp, bo) in entries.get(n, {}).items()}
                       for n in range(1, order + 1)}
        words = {g[0] for g in lm.entries_[1]}
        lm.vocab_ = frozenset(words | {UNK, EOS, BOS})
        lm._predictable = tuple(sorted(w for w in lm.vocab_ if w != BOS))
        if (UNK,) not in lm.entries_[1]:
            raise ValueError("model has no <unk> unigram; scoring would not be total")
        return lm


def count_ngrams(sentences: Iterable[Sequence[str]], order: int) -> dict[int, Counter]:
    """Count 1..order-grams over ``<s> w1 .. wn </s>``; ``<s>`` is never a unigram."""
    counts = {n: Counter() for n in range(1, order + 1)}
    for words in sentences:
        toks = [BOS, *words, EOS]
        for n in range(1, order + 1):
            c = counts[n]
            for i in range(len(toks) - n + 1):
                g = tuple(toks[i:i + n])
                if n == 1 and g[0] == BOS:
                    continue
                c[g] += 1
    return counts


def train(corpus: Iterable[str], order: int = 3, smoothing: str = "witten-bell",
          prune_min_count: int = 1, k: float = 1.0) -> NGramLM:
    return NGramLM(order=order, smoothing=smoothing, k=k, prune_min_count=prune_min_count).fit(corpus)


def logprob(lm: NGramLM, context: Sequence[str], word: str) -> float:
    return lm.logprob(context, word)


def perplexity(lm: NGramLM, text: str) -> float:
    return lm.perplexity(text)
