"""End-to-end run on the synthetic corpus, writing every intermediate artifact."""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .context_graph import build_graph, curate_bias_list, train_subwords
from .corpus import write_manifest
from .decode import StreamingConfig, decode_manifest, manifest_wer, sweep
from .lm import NGramLM, write_arpa
from .pl_filter import FilterConfig, SelectionPolicy, apply_filters, cross_model_wer, mux, select
from .synthetic import (
    CorpusConfig,
    make_acoustics,
    raw_entities,
    simulate_test_corpus,
    simulate_training_corpus,
)

logger = logging.getLogger(__name__)

PL_TAG = "strong"
WEAK_TAG = "weak"


@dataclass
class DemoArtifacts:
    """In-memory results of one pipeline run."""

    supervised: object
    pseudo: object
    filtered: object
    filter_report: object
    selected: object
    lm: object
    vocab: object
    bias: list
    model: object
    test: object
    graphs: dict
    fusion_wer: dict
    sweep: object | None


def build_pipeline(seed: int = 0, cfg: CorpusConfig | None = None, beam: int = 4,
                   run_sweep: bool = True) -> DemoArtifacts:
    cfg = cfg or CorpusConfig()
    rng = np.random.default_rng(seed)
    sup, pl, _ = simulate_training_corpus(cfg, rng)
    filtered, report = apply_filters(pl, FilterConfig(), PL_TAG)
    logger.info("filter kept %d of %d", report.kept, report.total)
    scored = cross_model_wer(filtered, WEAK_TAG, PL_TAG)
    selected = select(scored, SelectionPolicy(mode="threshold", threshold=0.25))
    texts = [u.ref_text for u in sup] + [u.pl_text[PL_TAG] for u in selected]
    lm = NGramLM(order=3).fit(texts)
    vocab = train_subwords(texts, None)
    acoustics = make_acoustics(vocab)
    test = simulate_test_corpus(cfg, acoustics, rng)
    model = acoustics.build_model(seed)
    bias = curate_bias_list(raw_entities())
    graphs = {
        "none": None,
        "lm": build_graph(lm, None, vocab),
        "bias": build_graph(None, bias, vocab),
        "lm+bias": build_graph(lm, bias, vocab),
    }
    offline = StreamingConfig()
    fusion = {}
    for name, graph in graphs.items():
        hyps = decode_manifest(model, test, offline, beam, graph, vocab)
        fusion[name] = manifest_wer(test, hyps)
        logger.info("offline WER %s: %.4f", name, fusion[name])
    report_sweep = sweep(model, test, beam, graphs["lm+bias"], vocab) if run_sweep else None
    return DemoArtifacts(sup, pl, filtered, report, selected, lm, vocab, bias, model, test,
                         graphs, fusion, report_sweep)


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_demo(out_dir: str | Path, seed: int = 0, beam: int = 4) -> dict:
    """Run the pipeline and write artifacts plus ``report.json`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    art = build_pipeline(seed, beam=beam)

    write_manifest(art.supervised, out / "supervised.jsonl")
    write_manifest(art.pseudo, out / "pseudo.jsonl")
    write_manifest(art.filtered, out / "filtered.jsonl")
    (out / "filter_report.json").write_text(json.dumps(art.filter_report.to_dict(), indent=2))
    write_manifest(art.selected, out / "selected.jsonl")
    schedule = mux(art.supervised, art.selected, batch_size_utts=16, weights=(0.2, 0.8), seed=seed)
    (out / "mux.json").write_text(json.dumps(schedule.to_dict(), indent=1))
    write_arpa(art.lm, out / "lm.arpa")
    art.vocab.save(out / "vocab.json")
    (out / "bias.txt").write_text("".join(e.text + "\n" for e in art.bias), encoding="utf-8")
    art.graphs["lm+bias"].save(out / "graph.json")
    art.model.save(out / "model.json")
    write_manifest(art.test, out / "test.jsonl")
    (out / "sweep.json").write_text(art.sweep.to_json())

    report = {
        "seed": seed,
        "beam": beam,
        "filter": art.filter_report.to_dict()["rejected_counts"],
        "kept": art.filter_report.kept,
        "selected": len(art.selected),
        "lm_entries": art.lm.num_entries(),
        "vocab_size": art.vocab.size,
        "bias_entries": len(art.bias),
        "graph_digest": art.graphs["lm+bias"].digest(),
        "offline_wer": art.fusion_wer,
        "sweep": art.sweep.to_list(),
        "artifacts": {p.name: _digest(p) for p in sorted(out.iterdir())
                      if p.is_file() and p.name != "report.json"},
    }
    (out / "report.json").write_text(json.dumps(report, indent=2))
    return report
