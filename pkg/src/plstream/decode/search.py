"""Frame-synchronous transducer beam search with context-graph fusion.

Scores are natural-log acoustic probabilities plus the probability-domain
bonuses returned by ``ContextGraph.advance``. Hypotheses with identical token
sequences are merged with log-sum-exp; since the graph state and accumulated
bonus depend only on the tokens, merging keeps both consistent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..context_graph import ROOT, ContextGraph, SubwordVocab
from ..transducer import TableTransducer
from ..utils.validation import check_positive_int
from .config import StreamingConfig

MAX_SYMBOLS_PER_FRAME = 10


@dataclass(frozen=True)
class BeamHypothesis:
    tokens: tuple[int, ...]
    log_score: float
    ac_state: int = ROOT
    emitted_in_frame: int = 0


@dataclass(frozen=True)
class ChunkTrace:
    start: int
    end: int
    best_tokens: tuple[int, ...]
    best_text: str


@dataclass(frozen=True)
class DecodeResult:
    best_text: str
    best_tokens: tuple[int, ...]
    nbest: list[tuple[str, float]]
    nbest_tokens: list[tuple[tuple[int, ...], float]]
    trace: list[ChunkTrace] = field(default_factory=list)

    @property
    def best_score(self) -> float:
        return self.nbest[0][1]

    def to_dict(self) -> dict:
        return {
            "best_text": self.best_text,
            "best_tokens": list(self.best_tokens),
            "nbest": [{"text": t, "score": s} for t, s in self.nbest],
            "trace": [
                {"start": c.start, "end": c.end, "best_text": c.best_text} for c in self.trace
            ],
        }


def _text(tokens: Sequence[int], vocab: SubwordVocab | None) -> str:
    if vocab is None:
        return " ".join(str(t) for t in tokens)
    return vocab.decode(tokens)


def _check_common(model: TableTransducer, beam: int, graph, vocab) -> None:
    check_positive_int(beam, "beam")
    if vocab is not None and vocab.size != model.vocab_size:
        raise ValueError(f"vocabulary has {vocab.size} ids but the model has {model.vocab_size}")
    if graph is not None and not isinstance(graph, ContextGraph):
        raise TypeError("graph must be a ContextGraph")


class _FrameScorer:
    """Caches joint log-probs per predictor context for one encoder row."""

    def __init__(self, model: TableTransducer, enc_vec: np.ndarray):
        self.model = model
        self.enc_vec = enc_vec
        self.cache: dict[tuple[int, int], np.ndarray] = {}

    def __call__(self, tokens: tuple[int, ...]) -> np.ndarray:
        key = self.model.context_index(tokens)
        lp = self.cache.get(key)
        if lp is None:
            lp = self.model.joint_logprobs(self.enc_vec, tokens)
            self.cache[key] = lp
        return lp


def _rank_key(item):
    hyp, done = item
    return (-hyp.log_score, hyp.tokens, done)


def _merge(pool: dict, hyp: BeamHypothesis) -> None:
    old = pool.get(hyp.tokens)
    if old is None:
        pool[hyp.tokens] = hyp
    else:
        pool[hyp.tokens] = BeamHypothesis(
            hyp.tokens, float(np.logaddexp(old.log_score, hyp.log_score)),
            hyp.ac_state, hyp.emitted_in_frame,
        )


class _Transitions:
    """Per-state vectors of next states and bonuses over all tokens."""

    def __init__(self, graph: ContextGraph | None, n_tokens: int):
        self.graph = graph
        self.n_tokens = n_tokens
        self.cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def __call__(self, state: int) -> tuple[np.ndarray, np.ndarray]:
        hit = self.cache.get(state)
        if hit is None:
            if self.graph is None:
                hit = (np.full(self.n_tokens, state), np.zeros(self.n_tokens))
            else:
                pairs = [self.graph.advance(state, k) for k in range(self.n_tokens)]
                hit = (np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs]))
            self.cache[state] = hit
        return hit


def _beam_frame(beam_hyps: list[BeamHypothesis], score, blank: int, beam: int,
                trans: _Transitions, max_symbols: int) -> list[BeamHypothesis]:
    finished: dict[tuple[int, ...], BeamHypothesis] = {}
    active = [BeamHypothesis(h.tokens, h.log_score, h.ac_state, 0) for h in beam_hyps]
    while active:
        expanded: dict[tuple[int, ...], BeamHypothesis] = {}
        for h in active:
            lp = score(h.tokens)
            _merge(finished, BeamHypothesis(h.tokens, h.log_score + float(lp[blank]), h.ac_state, 0))
            if h.emitted_in_frame >= max_symbols:
                continue
            states, bonus = trans(h.ac_state)
            cand = h.log_score + lp[:blank] + bonus
            # Only the best `beam` extensions of one hypothesis can survive pruning.
            for k in np.argsort(-cand, kind="stable")[:beam]:
                _merge(expanded, BeamHypothesis(
                    h.tokens + (int(k),), float(cand[k]), int(states[k]), h.emitted_in_frame + 1,
                ))
        pool = [(h, True) for h in finished.values()] + [(h, False) for h in expanded.values()]
        pool.sort(key=_rank_key)
        kept = pool[:beam]
        finished = {h.tokens: h for h, done in kept if done}
        active = [h for h, done in kept if not done]
    return sorted(finished.values(), key=lambda h: (-h.log_score, h.tokens))


class BeamSearcher:
    """Incremental decoder: feed encoder rows chunk by chunk, read results any time."""

    def __init__(self, model: TableTransducer, beam: int = 4, graph: ContextGraph | None = None,
                 vocab: SubwordVocab | None = None, max_symbols: int = MAX_SYMBOLS_PER_FRAME):
        _check_common(model, beam, graph, vocab)
        self.model = model
        self.beam = beam
        self.graph = graph
        self.vocab = vocab
        self.max_symbols = check_positive_int(max_symbols, "max_symbols")
        self.hyps = [BeamHypothesis((), 0.0, ROOT, 0)]
        self.trace: list[ChunkTrace] = []
        self.frames_done = 0
        self._trans = _Transitions(graph, model.vocab_size)

    def feed(self, enc_rows: np.ndarray) -> None:
        start = self.frames_done
        for row in enc_rows:
            scorer = _FrameScorer(self.model, row)
            self.hyps = _beam_frame(self.hyps, scorer, self.model.blank, self.beam,
                                    self._trans, self.max_symbols)
        self.frames_done += len(enc_rows)
        best = self.hyps[0].tokens
        self.trace.append(ChunkTrace(start, self.frames_done, best, _text(best, self.vocab)))

    def result(self) -> DecodeResult:
        nbest_tokens = [(h.tokens, h.log_score) for h in self.hyps]
        nbest = [(_text(t, self.vocab), s) for t, s in nbest_tokens]
        return DecodeResult(nbest[0][0], nbest_tokens[0][0], nbest, nbest_tokens, list(self.trace))


def _check_frames(frames) -> list[int]:
    frames = [int(f) for f in frames]
    if not frames:
        raise ValueError("cannot decode an empty frame sequence")
    return frames


def beam_search(model: TableTransducer, frames: Sequence[int], beam: int = 4,
                graph: ContextGraph | None = None, vocab: SubwordVocab | None = None,
                max_symbols: int = MAX_SYMBOLS_PER_FRAME) -> DecodeResult:
    """Offline decode: every frame sees the whole history."""
    frames = _check_frames(frames)
    searcher = BeamSearcher(model, beam, graph, vocab, max_symbols)
    searcher.feed(model.encode(frames))
    return searcher.result()


def streaming_decode(model: TableTransducer, frames: Sequence[int], config: StreamingConfig,
                     beam: int = 4, graph: ContextGraph | None = None,
                     vocab: SubwordVocab | None = None,
                     max_symbols: int = MAX_SYMBOLS_PER_FRAME) -> DecodeResult:
    """Decode chunk by chunk; each chunk is encoded from its visible history only."""
    frames = _check_frames(frames)
    searcher = BeamSearcher(model, beam, graph, vocab, max_symbols)
    vis = config.visibility(len(frames))
    if vis is None:
        # Unlimited left context is the offline encoder restricted to a prefix.
        for start, end in config.chunks(len(frames)):
            searcher.feed(model.encode(frames[:end])[start:end])
        return searcher.result()
    left = config.effective_left_frames
    for start, end in config.chunks(len(frames)):
        lo = max(0, start - left)
        local = model.encode(frames[lo:end], np.minimum(vis[lo:end], np.arange(1, end - lo + 1)))
        searcher.feed(local[start - lo:])
    return searcher.result()


def greedy_search(model: TableTransducer, frames: Sequence[int],
                  graph: ContextGraph | None = None, vocab: SubwordVocab | None = None,
                  max_symbols: int = MAX_SYMBOLS_PER_FRAME) -> DecodeResult:
    """Pick the best symbol (blank first, then lowest id on ties) at every step."""
    frames = _check_frames(frames)
    _check_common(model, 1, graph, vocab)
    trans = _Transitions(graph, model.vocab_size)
    tokens: tuple[int, ...] = ()
    score, state = 0.0, ROOT
    blank = model.blank
    for row in model.encode(frames):
        emitted = 0
        while True:
            lp = model.joint_logprobs(row, tokens)
            blank_score = score + float(lp[blank])
            if emitted >= max_symbols:
                score = blank_score
                break
            states, bonus = trans(state)
            cand = score + lp[:blank] + bonus
            k = int(np.argmax(cand))
            if not cand[k] > blank_score:
                score = blank_score
                break
            score, state = float(cand[k]), int(states[k])
            tokens += (k,)
            emitted += 1
    text = _text(tokens, vocab)
    return DecodeResult(text, tokens, [(text, score)], [(tokens, score)],
                        [ChunkTrace(0, len(frames), tokens, text)])
