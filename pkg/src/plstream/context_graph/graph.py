"""Aho-Corasick context graph over subword ids for shallow fusion.

Every LM n-gram and every bias phrase becomes a pattern (a token sequence)
carrying a probability-domain bonus:

=====================================  ================================
pattern                                bonus
=====================================  ================================
plain LM n-gram                        ``lm_scale * 10**logprob``
bias phrase that is an LM n-gram       ``lm_scale * 10**logprob + alpha_in_lm``
bias phrase absent from the LM         ``alpha_out_lm``
bias phrase, graph built without LM    ``plain_bias``
=====================================  ================================

A decoder keeps one automaton state per hypothesis and adds the bonus of
every pattern that ends at the token it just emitted.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from ..lm import BOS, EOS, UNK, NGramLM
from .bias import BiasEntry
from .subword import SubwordVocab

ROOT = 0
FORMAT = "plstream-context-graph-v1"


@dataclass(frozen=True)
class FusionCosts:
    plain_bias: float = 0.7
    alpha_in_lm: float = 0.5
    alpha_out_lm: float = 1.5
    lm_scale: float = 1.0

    def __post_init__(self):
        for name in ("plain_bias", "alpha_in_lm", "alpha_out_lm", "lm_scale"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.plain_bias <= 0:
            raise ValueError("plain_bias must be > 0")


class ContextGraph:
    """Immutable Aho-Corasick automaton with per-pattern bonuses.

    ``stack_orders=False`` makes a transition collect only the bonus of the
    longest pattern ending there instead of all of them.
    """

    def __init__(self, patterns: dict[tuple[int, ...], float] | None = None,
                 stack_orders: bool = True):
        patterns = dict(patterns or {})
        for toks, bonus in patterns.items():
            if not toks:
                raise ValueError("empty pattern")
            if not (math.isfinite(bonus) and bonus >= 0):
                raise ValueError(f"pattern {toks} has invalid bonus {bonus}")
        self.patterns = {tuple(int(t) for t in k): float(v) for k, v in sorted(patterns.items())}
        self.stack_orders = stack_orders
        self.children: list[dict[int, int]] = [{}]
        self.bonus: list[float] = [0.0]
        self.pattern_end: list[bool] = [False]
        self.depth: list[int] = [0]
        for toks, b in self.patterns.items():
            node = ROOT
            for t in toks:
                nxt = self.children[node].get(t)
                if nxt is None:
                    nxt = len(self.children)
                    self.children[node][t] = nxt
                    self.children.append({})
                    self.bonus.append(0.0)
                    self.pattern_end.append(False)
                    self.depth.append(self.depth[node] + 1)
                node = nxt
            self.pattern_end[node] = True
            self.bonus[node] = b
        self._link()
        self._cache: dict[tuple[int, int], tuple[int, float]] = {}

    def _link(self) -> None:
        n = len(self.children)
        self.fail = [ROOT] * n
        self.output = [-1] * n
        self.match_total = [0.0] * n
        queue = deque()
        for t in sorted(self.children[ROOT]):
            child = self.children[ROOT][t]
            queue.append(child)
        while queue:
            node = queue.popleft()
            f = self.fail[node]
            self.output[node] = f if self.pattern_end[f] else self.output[f]
            if self.stack_orders:
                self.match_total[node] = self.bonus[node] + self.match_total[f]
            else:
                self.match_total[node] = (self.bonus[node] if self.pattern_end[node]
                                          else self.match_total[f])
            for t in sorted(self.children[node]):
                child = self.children[node][t]
                g = f
                while True:
                    target = self.children[g].get(t)
                    if target is not None and target != child:
                        self.fail[child] = target
                        break
                    if g == ROOT:
                        self.fail[child] = ROOT
                        break
                    g = self.fail[g]
                queue.append(child)

    # --------------------------------------------------------------- search
    @property
    def num_nodes(self) -> int:
        return len(self.children)

    def advance(self, state: int, token: int) -> tuple[int, float]:
        """Consume ``token`` from ``state``; return the new state and the bonus earned."""
        key = (state, token)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        node = state
        while True:
            nxt = self.children[node].get(token)
            if nxt is not None:
                result = (nxt, self.match_total[nxt])
                break
            if node == ROOT:
                result = (ROOT, 0.0)
                break
            node = self.fail[node]
        self._cache[key] = result
        return result

    def walk(self, tokens: Iterable[int], state: int = ROOT) -> int:
        for t in tokens:
            state, _ = self.advance(state, t)
        return state

    def scan_total(self, tokens: Iterable[int]) -> float:
        state, total = ROOT, 0.0
        for t in tokens:
            state, delta = self.advance(state, t)
            total += delta
        return total

    def find(self, tokens: Sequence[int]) -> int | None:
        """Node reached by walking ``tokens`` along trie edges, or None."""
        node = ROOT
        for t in tokens:
            node = self.children[node].get(t)
            if node is None:
                return None
        return node

    # -------------------------------------------------------- serialization
    def to_dict(self) -> dict:
        return {
            "format": FORMAT,
            "stack_orders": self.stack_orders,
            "patterns": [[list(k), v] for k, v in self.patterns.items()],
        }

    def digest(self) -> str:
        payload = {
            "children": [sorted(c.items()) for c in self.children],
            "fail": self.fail,
            "output": self.output,
            "bonus": [repr(b) for b in self.bonus],
            "pattern_end": self.pattern_end,
            "stack_orders": self.stack_orders,
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()

    def save(self, path: str | Path) -> None:
        data = self.to_dict()
        data["digest"] = self.digest()
        Path(path).write_text(json.dumps(data, separators=(",", ":")), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "ContextGraph":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if data.get("format") != FORMAT:
            raise ValueError(f"{path}: not a context graph file")
        graph = cls({tuple(k): v for k, v in data["patterns"]}, data.get("stack_orders", True))
        if "digest" in data and data["digest"] != graph.digest():
            raise ValueError(f"{path}: digest mismatch")
        return graph

    def __eq__(self, other) -> bool:
        return isinstance(other, ContextGraph) and self.digest() == other.digest()

    def __repr__(self) -> str:
        return f"ContextGraph(patterns={len(self.patterns)}, nodes={self.num_nodes})"


def _lm_patterns(lm: NGramLM):
    for words, lp, _ in lm.iter_entries():
        if any(w in (BOS, EOS, UNK) for w in words):
            continue
        yield words, lp


def build_graph(lm: NGramLM | None, bias: Iterable[BiasEntry] | None, vocab: SubwordVocab,
                costs: FusionCosts | None = None, stack_orders: bool = True) -> ContextGraph:
    """Tokenize LM n-grams and bias phrases into one Aho-Corasick graph."""
    costs = costs or FusionCosts()
    bias = list(bias or [])
    if lm is None and not bias:
        raise ValueError("build_graph needs an LM, a bias list, or both")

    word_bonus: dict[tuple[str, ...], float] = {}
    if lm is not None:
        for words, lp in _lm_patterns(lm):
            word_bonus[words] = costs.lm_scale * 10.0 ** lp
    for entry in bias:
        words = entry.phrase
        if lm is None:
            word_bonus[words] = costs.plain_bias
        elif lm.contains(words):
            word_bonus[words] = costs.lm_scale * 10.0 ** lm.ngram_logprob(words) + costs.alpha_in_lm
        else:
            word_bonus[words] = costs.alpha_out_lm

    patterns: dict[tuple[int, ...], float] = {}
    for words in sorted(word_bonus):
        toks = tuple(vocab.encode(" ".join(words)))
        if not toks:
            raise ValueError(f"pattern {words!r} is empty after tokenization")
        # Distinct word sequences can share a tokenization (e.g. via <unk>).
        patterns[toks] = patterns.get(toks, 0.0) + word_bonus[words]
    return ContextGraph(patterns, stack_orders=stack_orders)
