"""Corpus-level decoding over a list of streaming configurations."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..context_graph import ContextGraph, SubwordVocab
from ..corpus import Manifest, NormalizationRules, corpus_wer
from ..transducer import TableTransducer
from ..utils.validation import check_positive_int
from .config import OFFLINE_LABEL, StreamingConfig, fuse_configs, sweep_labels
from .search import beam_search, streaming_decode


@dataclass(frozen=True)
class SweepRow:
    label: str
    wer: float
    chunk_ms: int | None
    left_ms: int | None

    def to_dict(self) -> dict:
        return {"label": self.label, "wer": self.wer, "chunk_ms": self.chunk_ms,
                "left_ms": self.left_ms}


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, label: str) -> SweepRow:
        for row in self.rows:
            if row.label == label:
                return row
        raise KeyError(label)

    @property
    def labels(self) -> list[str]:
        return [r.label for r in self.rows]

    def to_list(self) -> list[dict]:
        return [r.to_dict() for r in self.rows]

    def to_json(self) -> str:
        return json.dumps(self.to_list(), indent=2)


def decode_manifest(model: TableTransducer, manifest: Manifest, config: StreamingConfig,
                    beam: int = 4, graph: ContextGraph | None = None,
                    vocab: SubwordVocab | None = None) -> list[str]:
    out = []
    for utt in manifest:
        if utt.frames is None:
            raise ValueError(f"utterance {utt.id!r} has no frames")
        if config.is_offline:
            res = beam_search(model, utt.frames, beam, graph, vocab)
        else:
            res = streaming_decode(model, utt.frames, config, beam, graph, vocab)
        out.append(res.best_text)
    return out


def manifest_wer(manifest: Manifest, hyps: Sequence[str],
                 rules: NormalizationRules | None = None) -> float:
    refs = []
    for utt in manifest:
        if not utt.ref_text:
            raise ValueError(f"utterance {utt.id!r} has no reference text")
        refs.append(utt.ref_text)
    return corpus_wer(zip(refs, hyps), rules).wer


def sweep(model: TableTransducer, manifest: Manifest, beam: int = 4,
          graph: ContextGraph | None = None, vocab: SubwordVocab | None = None,
          labels: Iterable[str] | None = None, frame_ms: int = 40,
          rules: NormalizationRules | None = None) -> SweepReport:
    """Corpus WER for each configuration; defaults to the 13-entry grid."""
    for utt in manifest:
        if not utt.ref_text:
            raise ValueError(f"utterance {utt.id!r} has no reference text")
    rows = []
    for label in (sweep_labels() if labels is None else list(labels)):
        cfg = fuse_configs(label, frame_ms)
        hyps = decode_manifest(model, manifest, cfg, beam, graph, vocab)
        rows.append(SweepRow(label, manifest_wer(manifest, hyps, rules), cfg.chunk_ms, cfg.left_ms))
    return SweepReport(tuple(rows))


class StreamingDecoder(BaseEstimator):
    """Estimator wrapper: ``predict`` maps frame sequences to transcripts.

    ``fit`` only validates the model/vocabulary/graph combination; the model is
    not trained here.
    """

    def __init__(self, model=None, vocab=None, graph=None, beam=4, config=OFFLINE_LABEL):
        self.model = model
        self.vocab = vocab
        self.graph = graph
        self.beam = beam
        self.config = config

    def fit(self, X=None, y=None):
        if not isinstance(self.model, TableTransducer):
            raise TypeError("model must be a TableTransducer")
        if self.vocab is not None and self.vocab.size != self.model.vocab_size:
            raise ValueError("vocabulary size does not match the model")
        check_positive_int(self.beam, "beam")
        self.config_ = (self.config if isinstance(self.config, StreamingConfig)
                        else fuse_configs(self.config))
        return self

    def predict(self, X: Iterable[Sequence[int]]) -> list[str]:
        check_is_fitted(self, "config_")
        out = []
        for frames in X:
            if self.config_.is_offline:
                res = beam_search(self.model, frames, self.beam, self.graph, self.vocab)
            else:
                res = streaming_decode(self.model, frames, self.config_, self.beam,
                                       self.graph, self.vocab)
            out.append(res.best_text)
        return out

    def score(self, X, y) -> float:
        """Negative corpus WER, so that larger is better."""
        return -corpus_wer(zip(y, self.predict(X))).wer
