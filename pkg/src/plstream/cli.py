"""Command-line entry point: ``plstream <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .context_graph import ContextGraph, FusionCosts, SubwordVocab, build_graph, read_bias_list, train_subwords
from .corpus import ManifestError, corpus_wer, read_manifest, write_manifest
from .decode import OFFLINE_LABEL, decode_manifest, fuse_configs, manifest_wer, sweep
from .lm import ArpaFormatError, NGramLM, read_arpa, write_arpa
from .pl_filter import FilterConfig, SelectionPolicy, apply_filters, cross_model_wer, mux, select
from .transducer import LossConfig, TableTransducer, ctc_loss, combined_loss, rnnt_loss

logger = logging.getLogger("plstream")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit_error(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def _write_json(path: str | None, payload) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _read_lines(path: str) -> list[str]:
    return [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]


def _csv_ints(text: str) -> list[int]:
    text = text.strip()
    return [int(x) for x in text.split(",")] if text else []


# ------------------------------------------------------------- subcommands
def cmd_filter(args) -> int:
    cfg = FilterConfig.from_file(args.config) if args.config else FilterConfig()
    if args.language:
        cfg = FilterConfig.from_dict({**cfg.to_dict(), "language": args.language})
    kept, report = apply_filters(read_manifest(args.inp), cfg, args.model_tag)
    write_manifest(kept, args.out)
    _write_json(args.report, report.to_dict())
    return 0


def cmd_select(args, parser) -> int:
    if args.mode == "threshold" and args.budget_hours is not None:
        parser.error("--budget-hours conflicts with --mode threshold")
    if args.mode != "threshold" and args.threshold is not None:
        parser.error(f"--threshold conflicts with --mode {args.mode}")
    manifest = read_manifest(args.inp)
    if args.pseudo_wer:
        manifest = cross_model_wer(manifest, args.pseudo_wer[0], args.pseudo_wer[1], args.metric)
    policy = SelectionPolicy(args.metric, args.direction, args.mode, args.budget_hours,
                             args.threshold, args.seed)
    out = select(manifest, policy)
    write_manifest(out, args.out)
    logger.info("selected %d of %d utterances", len(out), len(manifest))
    return 0


def cmd_mux(args) -> int:
    sched = mux(read_manifest(args.sup), read_manifest(args.pl), args.batch,
                (args.w_sup, args.w_pl), args.seed, args.length, args.batch_seconds)
    _write_json(args.out, sched.to_dict())
    return 0


def cmd_train_lm(args) -> int:
    lm = NGramLM(order=args.order, smoothing=args.smoothing, k=args.k,
                 prune_min_count=args.prune_min_count).fit(_read_lines(args.inp))
    write_arpa(lm, args.out)
    return 0


def cmd_tokenizer(args) -> int:
    size = None if args.vocab_size == "max" else int(args.vocab_size)
    vocab = train_subwords(_read_lines(args.inp), size)
    vocab.save(args.out)
    return 0


def cmd_graph(args) -> int:
    lm = read_arpa(args.arpa) if args.arpa else None
    bias = read_bias_list(args.bias) if args.bias else None
    costs = FusionCosts(args.bias_cost, args.alpha_in, args.alpha_out, args.lm_scale)
    graph = build_graph(lm, bias, SubwordVocab.load(args.vocab), costs,
                        stack_orders=not args.longest_only)
    graph.save(args.out)
    _write_json(None, {"nodes": graph.num_nodes, "patterns": len(graph.patterns),
                       "digest": graph.digest()})
    return 0


def cmd_loss(args) -> int:
    model = TableTransducer.load(args.model)
    frames, target = _csv_ints(args.frames), _csv_ints(args.target)
    cfg = LossConfig(args.lam)
    payload = {
        "rnnt": rnnt_loss(model.lattice(frames, target), target),
        "ctc": ctc_loss(model.ctc_logprobs(frames), target),
        "combined": combined_loss(model, frames, target, cfg),
        "lambda": cfg.lam,
    }
    _write_json(args.out, payload)
    return 0


def cmd_decode(args, parser) -> int:
    if args.sweep and args.config:
        parser.error("--sweep conflicts with --config")
    model = TableTransducer.load(args.model)
    vocab = SubwordVocab.load(args.vocab) if args.vocab else None
    graph = ContextGraph.load(args.graph) if args.graph else None
    manifest = read_manifest(args.manifest)
    if args.sweep:
        _write_json(args.out, sweep(model, manifest, args.beam, graph, vocab,
                                    frame_ms=args.frame_ms).to_list())
        return 0
    label = args.config or OFFLINE_LABEL
    cfg = fuse_configs(label, args.frame_ms)
    hyps = decode_manifest(model, manifest, cfg, args.beam, graph, vocab)
    payload = {"config": label, "beam": args.beam,
               "results": [{"id": u.id, "text": h} for u, h in zip(manifest, hyps)]}
    if all(u.ref_text for u in manifest):
        payload["wer"] = manifest_wer(manifest, hyps)
    _write_json(args.out, payload)
    return 0


def cmd_eval(args) -> int:
    manifest = read_manifest(args.manifest)
    if args.hyps:
        data = json.loads(Path(args.hyps).read_text(encoding="utf-8"))
        hyp_by_id = {r["id"]: r["text"] for r in data["results"]}
    else:
        hyp_by_id = {u.id: u.pl_text.get(args.tag, "") for u in manifest}
    pairs = []
    for u in manifest:
        if not u.ref_text:
            raise ValueError(f"utterance {u.id!r} has no reference text")
        if u.id not in hyp_by_id:
            raise KeyError(f"no hypothesis for utterance {u.id!r}")
        pairs.append((u.ref_text, hyp_by_id[u.id]))
    _write_json(args.out, corpus_wer(pairs).to_dict())
    return 0


def cmd_demo(args) -> int:
    from .demo import run_demo

    report = run_demo(args.out, seed=args.seed, beam=args.beam)
    _write_json(None, {"out": str(args.out), "offline_wer": report["offline_wer"]})
    return 0


# ------------------------------------------------------------------ parser
def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="plstream", description="Pseudo-label filtering, n-gram fusion and "
                                             "streaming transducer decoding toolkit.")
    p.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker threads (work is currently serial; results never depend on it)")
    p.add_argument("--log-level", default="WARNING",
                   choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("filter", help="drop hallucinated pseudo-labels")
    s.add_argument("--config")
    s.add_argument("--model-tag", required=True)
    s.add_argument("--language")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--report")

    s = sub.add_parser("select", help="metric-based data selection")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--metric", default="pseudo_wer")
    s.add_argument("--mode", choices=["budget", "threshold", "random"], default="budget")
    s.add_argument("--budget-hours", type=float)
    s.add_argument("--threshold", type=float)
    s.add_argument("--direction", choices=["asc", "desc", "ascending", "descending"], default="asc")
    s.add_argument("--pseudo-wer", nargs=2, metavar=("HYP_TAG", "REF_TAG"),
                   help="compute the metric as WER of HYP_TAG against REF_TAG first")

    s = sub.add_parser("mux", help="interleave supervised and pseudo-labelled data")
    s.add_argument("--sup", required=True)
    s.add_argument("--pl", required=True)
    s.add_argument("--batch", type=int, default=600)
    s.add_argument("--batch-seconds", type=float)
    s.add_argument("--w-sup", type=float, default=0.5)
    s.add_argument("--w-pl", type=float, default=0.5)
    s.add_argument("--length", type=int)
    s.add_argument("--out")

    s = sub.add_parser("train-lm", help="train a backoff n-gram LM and write ARPA")
    s.add_argument("--in", dest="inp", required=True, help="one normalized sentence per line")
    s.add_argument("--out", required=True)
    s.add_argument("--order", type=int, default=3)
    s.add_argument("--smoothing", choices=["witten-bell", "add-k"], default="witten-bell")
    s.add_argument("--k", type=float, default=1.0)
    s.add_argument("--prune-min-count", type=int, default=1)

    s = sub.add_parser("tokenizer", help="train a subword vocabulary")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--vocab-size", default="max", help="integer, or 'max' to merge exhaustively")

    g = sub.add_parser("graph", help="context graph operations")
    gsub = g.add_subparsers(dest="graph_command", required=True, parser_class=_Parser)
    s = gsub.add_parser("build", help="build the Aho-Corasick fusion graph")
    s.add_argument("--arpa")
    s.add_argument("--bias")
    s.add_argument("--vocab", required=True)
    s.add_argument("--bias-cost", type=float, default=0.7)
    s.add_argument("--alpha-in", type=float, default=0.5)
    s.add_argument("--alpha-out", type=float, default=1.5)
    s.add_argument("--lm-scale", type=float, default=1.0)
    s.add_argument("--longest-only", action="store_true")
    s.add_argument("--out", required=True)

    s = sub.add_parser("loss", help="RNN-T / CTC / combined loss for one utterance")
    s.add_argument("--model", required=True)
    s.add_argument("--frames", required=True, help="comma-separated frame symbols")
    s.add_argument("--target", required=True, help="comma-separated token ids")
    s.add_argument("--lambda", dest="lam", type=float, default=0.1)
    s.add_argument("--out")

    s = sub.add_parser("decode", help="beam-search decode a manifest")
    s.add_argument("--model", required=True)
    s.add_argument("--manifest", required=True)
    s.add_argument("--vocab")
    s.add_argument("--beam", type=int, default=4)
    s.add_argument("--graph")
    s.add_argument("--config", help='streaming label such as "cs=320ms;lf=2.56s"')
    s.add_argument("--sweep", action="store_true")
    s.add_argument("--frame-ms", type=int, default=40)
    s.add_argument("--out")

    s = sub.add_parser("eval", help="corpus WER report")
    s.add_argument("--manifest", required=True)
    grp = s.add_mutually_exclusive_group(required=True)
    grp.add_argument("--hyps", help="decode output JSON")
    grp.add_argument("--tag", help="score a pseudo-label tag against the references")
    s.add_argument("--out")

    s = sub.add_parser("demo", help="run the full pipeline on the synthetic corpus")
    s.add_argument("--out", default="plstream-demo")
    s.add_argument("--beam", type=int, default=4)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _emit_error("usage", str(exc), 2)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        return _emit_error("usage", "--threads must be >= 1", 2)
    handlers = {
        "filter": cmd_filter,
        "select": lambda a: cmd_select(a, parser),
        "mux": cmd_mux,
        "train-lm": cmd_train_lm,
        "tokenizer": cmd_tokenizer,
        "graph": cmd_graph,
        "loss": cmd_loss,
        "decode": lambda a: cmd_decode(a, parser),
        "eval": cmd_eval,
        "demo": cmd_demo,
    }
    try:
        return handlers[args.command](args)
    except UsageError as exc:
        return _emit_error("usage", str(exc), 2)
    except FileNotFoundError as exc:
        return _emit_error("file_not_found", str(exc), 1)
    except (ManifestError, ArpaFormatError) as exc:
        return _emit_error("format", str(exc), 1)
    except (ValueError, KeyError, TypeError) as exc:
        return _emit_error(type(exc).__name__, str(exc), 1)


if __name__ == "__main__":
    sys.exit(main())
