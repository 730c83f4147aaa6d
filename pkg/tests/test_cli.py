import json
import subprocess
import sys

import pytest

from plstream.cli import main
from plstream.corpus import Manifest, Utterance, read_manifest, write_manifest
from plstream.transducer import TableTransducer


def _err(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "filter" in capsys.readouterr().out


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 2
    assert _err(capsys)["error"] == "usage"


def test_module_entry_point_exit_code():
    proc = subprocess.run([sys.executable, "-m", "plstream.cli", "nope"], capture_output=True, text=True)
    assert proc.returncode == 2 and json.loads(proc.stderr)["error"] == "usage"


def test_missing_file(tmp_path, capsys):
    code = main(["train-lm", "--in", str(tmp_path / "none.txt"), "--out", str(tmp_path / "x.arpa")])
    assert code == 1 and _err(capsys)["error"] == "file_not_found"


def test_bad_threads(capsys):
    assert main(["--threads", "0", "demo"]) == 2


@pytest.fixture
def pl_manifest(tmp_path):
    path = tmp_path / "pl.jsonl"
    write_manifest(Manifest([
        Utterance("a", 2.0, pl_text={"big": "hello there world", "small": "hello their world"}),
        Utterance("b", 3.0, pl_text={"big": "go go go go", "small": "go go"}),
        Utterance("c", 1.5, pl_text={"big": "good morning", "small": "good morning"}),
    ]), path)
    return path


def test_filter(tmp_path, pl_manifest, capsys):
    out, rep = tmp_path / "kept.jsonl", tmp_path / "rep.json"
    assert main(["filter", "--model-tag", "big", "--in", str(pl_manifest), "--out", str(out),
                 "--report", str(rep)]) == 0
    assert read_manifest(out).ids == ["a", "c"]
    assert json.loads(rep.read_text())["rejected_counts"]["H1"] == 1


def test_select_threshold_with_pseudo_wer(tmp_path, pl_manifest):
    out = tmp_path / "sel.jsonl"
    assert main(["select", "--in", str(pl_manifest), "--out", str(out), "--mode", "threshold",
                 "--threshold", "0.25", "--pseudo-wer", "small", "big"]) == 0
    assert read_manifest(out).ids == ["c"]


def test_select_conflicting_flags(tmp_path, pl_manifest, capsys):
    code = main(["select", "--in", str(pl_manifest), "--out", str(tmp_path / "o"),
                 "--mode", "threshold", "--threshold", "0.2", "--budget-hours", "1"])
    assert code == 2 and "conflicts" in _err(capsys)["message"]


def test_mux(tmp_path, pl_manifest):
    sup = tmp_path / "sup.jsonl"
    write_manifest(Manifest([Utterance("s", 1.0, ref_text="x")]), sup)
    out = tmp_path / "mux.json"
    assert main(["mux", "--sup", str(sup), "--pl", str(pl_manifest), "--batch", "2",
                 "--w-sup", "0.2", "--w-pl", "0.8", "--length", "10", "--out", str(out)]) == 0
    items = json.loads(out.read_text())["items"]
    assert len(items) == 10


def test_lm_tokenizer_graph_chain(tmp_path, capsys):
    text = tmp_path / "text.txt"
    text.write_text("THE CAT SAT\nTHE DOG RAN\nNEW YORK CITY\n")
    bias = tmp_path / "bias.txt"
    bias.write_text("new york\nsan\n")
    assert main(["train-lm", "--in", str(text), "--out", str(tmp_path / "lm.arpa")]) == 0
    assert "\\end\\" in (tmp_path / "lm.arpa").read_text()
    assert main(["tokenizer", "--in", str(text), "--out", str(tmp_path / "v.json")]) == 0
    capsys.readouterr()
    assert main(["graph", "build", "--arpa", str(tmp_path / "lm.arpa"), "--bias", str(bias),
                 "--vocab", str(tmp_path / "v.json"), "--out", str(tmp_path / "g.json")]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["patterns"] > 0 and len(info["digest"]) == 64


def test_bad_arpa_reports_format_error(tmp_path, capsys):
    (tmp_path / "bad.arpa").write_text("\\data\\\nngram 1=2\n\n\\1-grams:\n-1\ta\n\\end\\\n")
    (tmp_path / "v.json").write_text(json.dumps({"format": "plstream-subword-v1", "pieces": ["▁a"]}))
    code = main(["graph", "build", "--arpa", str(tmp_path / "bad.arpa"), "--vocab",
                 str(tmp_path / "v.json"), "--out", str(tmp_path / "g.json")])
    assert code == 1 and _err(capsys)["error"] == "format"


def test_loss(tmp_path, capsys):
    TableTransducer.random(2, 3, seed=1).save(tmp_path / "m.json")
    assert main(["loss", "--model", str(tmp_path / "m.json"), "--frames", "0,1,2",
                 "--target", "1", "--lambda", "0.5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert abs(out["combined"] - 0.5 * (out["rnnt"] + out["ctc"])) < 1e-12


def test_decode_and_eval(tmp_path, capsys):
    TableTransducer.random(2, 3, seed=1).save(tmp_path / "m.json")
    man = tmp_path / "test.jsonl"
    write_manifest(Manifest([Utterance("u", 0.2, ref_text="0 1", frames=(0, 1, 2, 1, 0))]), man)
    dec = tmp_path / "dec.json"
    assert main(["decode", "--model", str(tmp_path / "m.json"), "--manifest", str(man),
                 "--config", "cs=80ms;lf=inf", "--out", str(dec)]) == 0
    data = json.loads(dec.read_text())
    assert data["config"] == "cs=80ms;lf=inf" and "wer" in data
    assert main(["eval", "--manifest", str(man), "--hyps", str(dec)]) == 0
    assert json.loads(capsys.readouterr().out)["wer"] == data["wer"]
    sweep_out = tmp_path / "sweep.json"
    assert main(["decode", "--model", str(tmp_path / "m.json"), "--manifest", str(man),
                 "--sweep", "--beam", "2", "--out", str(sweep_out)]) == 0
    assert len(json.loads(sweep_out.read_text())) == 13
    assert main(["decode", "--model", str(tmp_path / "m.json"), "--manifest", str(man),
                 "--sweep", "--config", "cs=80ms;lf=inf"]) == 2


def test_eval_tag(tmp_path, capsys):
    man = tmp_path / "m.jsonl"
    write_manifest(Manifest([Utterance("u", 1.0, ref_text="a b", pl_text={"w": "a c"})]), man)
    assert main(["eval", "--manifest", str(man), "--tag", "w"]) == 0
    assert json.loads(capsys.readouterr().out)["wer"] == 0.5
