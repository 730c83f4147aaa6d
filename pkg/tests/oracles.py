"""Brute-force reference implementations used as test oracles.

None of these import the code under test; they are deliberately slow and
written for clarity.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def logsumexp(values):
    values = list(values)
    if not values:
        return -math.inf
    m = max(values)
    if m == -math.inf:
        return m
    return m + math.log(sum(math.exp(v - m) for v in values))


# ---------------------------------------------------------------- alignment
def all_alignments(ref, hyp):
    """Every monotone alignment as a list of ('M'|'S'|'I'|'D') operations."""
    if not ref and not hyp:
        yield []
        return
    if ref and hyp:
        op = "M" if ref[0] == hyp[0] else "S"
        for rest in all_alignments(ref[1:], hyp[1:]):
            yield [op] + rest
    if hyp:
        for rest in all_alignments(ref, hyp[1:]):
            yield ["I"] + rest
    if ref:
        for rest in all_alignments(ref[1:], hyp):
            yield ["D"] + rest


def brute_edit_cost(ref, hyp) -> int:
    return min(sum(op != "M" for op in a) for a in all_alignments(list(ref), list(hyp)))


# -------------------------------------------------------------------- losses
def rnnt_paths_loss(lattice: np.ndarray, target) -> float:
    """-log of the summed probability of every blank/emit path through the lattice."""
    T, U1, V1 = lattice.shape
    U, blank = U1 - 1, V1 - 1
    if T == 0:
        return math.inf
    totals = []
    # A path is a permutation of (T - 1) inner blanks and U emissions, then a final blank.
    for emit_pos in itertools.combinations(range(T - 1 + U), U):
        t = u = 0
        lp = 0.0
        for i in range(T - 1 + U):
            if i in emit_pos:
                lp += lattice[t, u, target[u]]
                u += 1
            else:
                lp += lattice[t, u, blank]
                t += 1
        lp += lattice[t, u, blank]
        totals.append(lp)
    return -logsumexp(totals)


def ctc_collapse(path, blank):
    out, prev = [], None
    for k in path:
        if k != blank and k != prev:
            out.append(k)
        prev = k
    return out


def ctc_enumeration_loss(logp: np.ndarray, target) -> float:
    T, V1 = logp.shape
    blank = V1 - 1
    totals = [
        sum(logp[t, k] for t, k in enumerate(path))
        for path in itertools.product(range(V1), repeat=T)
        if ctc_collapse(path, blank) == list(target)
    ]
    return -logsumexp(totals)


def finite_difference(fn, x: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        plus, minus = x.copy(), x.copy()
        plus[idx] += eps
        minus[idx] -= eps
        grad[idx] = (fn(plus) - fn(minus)) / (2 * eps)
    return grad


# ------------------------------------------------------------ pattern scan
def naive_scan(patterns: dict, text, longest_only: bool = False) -> float:
    """Sum bonuses of every pattern occurrence by checking every end position."""
    text = list(text)
    total = 0.0
    for end in range(1, len(text) + 1):
        hits = [(len(p), b) for p, b in patterns.items()
                if len(p) <= end and tuple(text[end - len(p):end]) == tuple(p)]
        if not hits:
            continue
        total += max(hits)[1] if longest_only else sum(b for _, b in hits)
    return total


# ---------------------------------------------------------------- decoding
def exhaustive_decode(enc_rows, joint_logprobs, blank, n_tokens, max_symbols, bonus_of):
    """Score of every token sequence: log-sum-exp over alignments plus its bonus.

    ``joint_logprobs(row, tokens)`` gives the per-step distribution and
    ``bonus_of(tokens)`` the fusion bonus for the full sequence.
    """
    scores: dict[tuple, list[float]] = {}

    def frame(t, tokens, lp):
        if t == len(enc_rows):
            scores.setdefault(tokens, []).append(lp)
            return

        def emit(toks, acc, n):
            dist = joint_logprobs(enc_rows[t], toks)
            frame(t + 1, toks, acc + dist[blank])
            if n < max_symbols:
                for k in range(n_tokens):
                    emit(toks + (k,), acc + dist[k], n + 1)

        emit(tokens, lp, 0)

    frame(0, (), 0.0)
    return {toks: logsumexp(v) + bonus_of(toks) for toks, v in scores.items()}


# --------------------------------------------------------------------- misc
def windows_ok(sources, window: int, supervised: str = "sup") -> bool:
    """Every full slice of ``window`` consecutive items contains a supervised one."""
    return all(supervised in sources[i:i + window] for i in range(len(sources) - window + 1))


SPELLED = {
    0: "ZERO", 3: "THREE", 7: "SEVEN", 11: "ELEVEN", 15: "FIFTEEN", 20: "TWENTY",
    21: "TWENTY ONE", 40: "FORTY", 99: "NINETY NINE", 100: "ONE HUNDRED",
    101: "ONE HUNDRED ONE", 115: "ONE HUNDRED FIFTEEN", 342: "THREE HUNDRED FORTY TWO",
    1000: "ONE THOUSAND", 1001: "ONE THOUSAND ONE", 2024: "TWO THOUSAND TWENTY FOUR",
    19000: "NINETEEN THOUSAND", 100000: "ONE HUNDRED THOUSAND",
    999999: "NINE HUNDRED NINETY NINE THOUSAND NINE HUNDRED NINETY NINE",
    500010: "FIVE HUNDRED THOUSAND TEN",
}


# ------------------------------------------------------- planted corpora
MAX_WORD_LEN_TABLE = {"ca": 16, "en": 16, "de": 30, "fr": 20, "es": 25, "it": 22}
_SYLLABLES = ["ka", "lo", "mi", "ne", "ru", "ta", "po", "si", "de", "fu"]


def planted_corpus(n: int, seed: int, language: str = "en", n_h1: int = 0, n_h2: int = 0,
                   n_h3: int = 0):
    """Records ``(id, duration_s, text)`` plus the planted id sets per heuristic.

    Clean texts use distinct short words, a speaking rate inside [1.2, 3.8]
    words/s and occasionally a word exactly at the length limit. Each planted
    utterance violates exactly one heuristic.
    """
    rng = np.random.default_rng(seed)
    limit = MAX_WORD_LEN_TABLE[language]
    ids = [f"u{i:05d}" for i in range(n)]
    order = rng.permutation(n)
    h1 = {ids[i] for i in order[:n_h1]}
    h2 = {ids[i] for i in order[n_h1:n_h1 + n_h2]}
    h3 = {ids[i] for i in order[n_h1 + n_h2:n_h1 + n_h2 + n_h3]}
    records = []
    for uid in ids:
        n_words = int(rng.integers(4, 12))
        words = []
        while len(words) < n_words:
            w = "".join(rng.choice(_SYLLABLES, size=int(rng.integers(1, 4))))
            if not words or w != words[-1]:
                words.append(w)
        if rng.random() < 0.2:
            words[int(rng.integers(len(words)))] = "b" * limit
        if uid in h1:
            pos = int(rng.integers(len(words)))
            words[pos:pos] = [words[pos]] * int(rng.integers(2, 5))
        if uid in h2:
            words[int(rng.integers(len(words)))] = "z" * (limit + int(rng.integers(1, 10)))
        if uid in h3:
            rate = float(rng.choice([rng.uniform(0.2, 0.95), rng.uniform(4.1, 9.0)]))
        else:
            rate = float(rng.uniform(1.2, 3.8))
        text = " ".join(w + ("," if rng.random() < 0.1 else "") for w in words)
        if rng.random() < 0.3:
            text = text.capitalize() + "."
        records.append((uid, len(words) / rate, text))
    return records, {"H1": h1, "H2": h2, "H3": h3}
