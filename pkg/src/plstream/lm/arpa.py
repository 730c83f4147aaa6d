"""ARPA text format reader/writer."""

from __future__ import annotations

import re
from pathlib import Path

from .ngram import NGramLM

_NGRAM_DECL = re.compile(r"^ngram\s+(\d+)\s*=\s*(\d+)$")
_SECTION = re.compile(r"^\\(\d+)-grams:$")


class ArpaFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _fmt(x: float) -> str:
    s = f"{x:.7f}"
    return "0.0000000" if s == "-0.0000000" else s


def format_arpa(lm: NGramLM) -> str:
    order = lm.max_order
    lines = ["", "\\data\\"]
    for n in range(1, order + 1):
        lines.append(f"ngram {n}={len(lm.entries_[n])}")
    for n in range(1, order + 1):
        lines += ["", f"\\{n}-grams:"]
        for g in sorted(lm.entries_[n]):
            lp, bo = lm.entries_[n][g]
            row = f"{_fmt(lp)}\t{' '.join(g)}"
            if n < order and bo is not None:
                row += f"\t{_fmt(bo)}"
            lines.append(row)
    lines += ["", "\\end\\", ""]
    return "\n".join(lines)


def write_arpa(lm: NGramLM, path: str | Path) -> None:
    Path(path).write_text(format_arpa(lm), encoding="utf-8")


def parse_arpa(text: str) -> NGramLM:
    lines = text.split("\n")
    i = 0
    n_lines = len(lines)

    def skip_blank(k: int) -> int:
        while k < n_lines and not lines[k].strip():
            k += 1
        return k

    i = skip_blank(i)
    if i >= n_lines or lines[i].strip() != "\\data\\":
        raise ArpaFormatError("expected '\\data\\' header", i + 1 if i < n_lines else None)
    i += 1
    declared: dict[int, int] = {}
    decl_line: dict[int, int] = {}
    while i < n_lines and lines[i].strip():
        m = _NGRAM_DECL.match(lines[i].strip())
        if not m:
            raise ArpaFormatError(f"malformed count declaration {lines[i].strip()!r}", i + 1)
        n, c = int(m.group(1)), int(m.group(2))
        if n in declared:
            raise ArpaFormatError(f"order {n} declared twice", i + 1)
        declared[n] = c
        decl_line[n] = i + 1
        i += 1
    if not declared:
        raise ArpaFormatError("no 'ngram N=M' declarations after \\data\\", i + 1)
    order = max(declared)
    if sorted(declared) != list(range(1, order + 1)):
        raise ArpaFormatError(f"declared orders {sorted(declared)} are not 1..{order}", i)

    entries: dict[int, dict] = {n: {} for n in range(1, order + 1)}
    seen_sections: set[int] = set()
    ended = False
    i = skip_blank(i)
    while i < n_lines:
        raw = lines[i].strip()
        if raw == "\\end\\":
            ended = True
            break
        m = _SECTION.match(raw)
        if not m:
            raise ArpaFormatError(f"expected an n-gram section header, got {raw!r}", i + 1)
        n = int(m.group(1))
        if n not in declared:
            raise ArpaFormatError(f"section for undeclared order {n}", i + 1)
        if n in seen_sections:
            raise ArpaFormatError(f"duplicate \\{n}-grams: section", i + 1)
        seen_sections.add(n)
        header_line = i + 1
        i += 1
        while i < n_lines and lines[i].strip() and not lines[i].strip().startswith("\\"):
            fields = lines[i].split()
            if len(fields) not in (n + 1, n + 2):
                raise ArpaFormatError(f"expected {n} words plus log values, got {lines[i]!r}", i + 1)
            if len(fields) == n + 2 and n == order:
                raise ArpaFormatError("highest-order entries carry no backoff weight", i + 1)
            try:
                lp = float(fields[0])
                bo = float(fields[n + 1]) if len(fields) == n + 2 else (None if n == order else 0.0)
            except ValueError:
                raise ArpaFormatError(f"non-numeric value in {lines[i]!r}", i + 1) from None
            g = tuple(fields[1:n + 1])
            if g in entries[n]:
                raise ArpaFormatError(f"duplicate n-gram {' '.join(g)!r}", i + 1)
            entries[n][g] = (lp, bo)
            i += 1
        if len(entries[n]) != declared[n]:
            raise ArpaFormatError(
                f"\\{n}-grams: has {len(entries[n])} entries but line {decl_line[n]} "
                f"declares {declared[n]}",
                header_line,
            )
        i = skip_blank(i)
    if not ended:
        raise ArpaFormatError("missing '\\end\\' marker", n_lines)
    missing = set(declared) - seen_sections
    if missing:
        raise ArpaFormatError(f"missing section(s) for order(s) {sorted(missing)}")
    try:
        return NGramLM.from_entries(entries)
    except ValueError as exc:
        raise ArpaFormatError(str(exc)) from None


def read_arpa(path: str | Path) -> NGramLM:
    return parse_arpa(Path(path).read_text(encoding="utf-8"))
