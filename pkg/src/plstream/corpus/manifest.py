"""JSONL manifests of utterance metadata."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

_KNOWN_FIELDS = ("id", "duration_s", "ref_text", "pl", "metrics", "frames")


class ManifestError(ValueError):
    """Raised for malformed manifest files; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Utterance:
    id: str
    duration_s: float
    ref_text: str | None = None
    pl_text: dict[str, str] = field(default_factory=dict)
    metrics: dict[str, float] = field(default_factory=dict)
    # Frame-symbol sequence consumed by the toy transducer decoder.
    frames: tuple[int, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ManifestError("utterance id must be a nonempty string")
        d = float(self.duration_s)
        if not math.isfinite(d) or d < 0:
            raise ManifestError(f"utterance {self.id!r}: duration_s must be >= 0, got {self.duration_s}")
        object.__setattr__(self, "duration_s", d)
        if self.frames is not None:
            object.__setattr__(self, "frames", tuple(int(f) for f in self.frames))

    def with_pl(self, tag: str, text: str) -> "Utterance":
        pl = dict(self.pl_text)
        pl[tag] = text
        return self.replace(pl_text=pl)

    def with_metric(self, name: str, value: float) -> "Utterance":
        metrics = dict(self.metrics)
        metrics[name] = float(value)
        return self.replace(metrics=metrics)

    def replace(self, **changes) -> "Utterance":
        values = {
            "id": self.id,
            "duration_s": self.duration_s,
            "ref_text": self.ref_text,
            "pl_text": self.pl_text,
            "metrics": self.metrics,
            "frames": self.frames,
        }
        values.update(changes)
        return Utterance(**values)

    def to_record(self) -> dict:
        rec: dict = {"id": self.id, "duration_s": self.duration_s}
        if self.ref_text is not None:
            rec["ref_text"] = self.ref_text
        if self.pl_text:
            rec["pl"] = dict(self.pl_text)
        if self.metrics:
            rec["metrics"] = dict(self.metrics)
        if self.frames is not None:
            rec["frames"] = list(self.frames)
        return rec

    @classmethod
    def from_record(cls, rec: dict, line: int | None = None) -> "Utterance":
        if not isinstance(rec, dict):
            raise ManifestError("record must be a JSON object", line)
        unknown = set(rec) - set(_KNOWN_FIELDS)
        if unknown:
            raise ManifestError(f"unknown field(s) {sorted(unknown)}", line)
        if "id" not in rec or "duration_s" not in rec:
            raise ManifestError("record requires 'id' and 'duration_s'", line)
        dur = rec["duration_s"]
        if isinstance(dur, bool) or not isinstance(dur, (int, float)):
            raise ManifestError(f"duration_s must be a number, got {dur!r}", line)
        if not math.isfinite(dur) or dur < 0:
            raise ManifestError(f"duration_s must be >= 0, got {dur}", line)
        ref = rec.get("ref_text")
        if ref is not None and not isinstance(ref, str):
            raise ManifestError("ref_text must be a string", line)
        pl = rec.get("pl", {})
        if not isinstance(pl, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in pl.items()
        ):
            raise ManifestError("pl must map model tags to strings", line)
        metrics = rec.get("metrics", {})
        if not isinstance(metrics, dict) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in metrics.values()
        ):
            raise ManifestError("metrics must map names to numbers", line)
        frames = rec.get("frames")
        if frames is not None and not (
            isinstance(frames, list)
            and all(isinstance(f, int) and not isinstance(f, bool) and f >= 0 for f in frames)
        ):
            raise ManifestError("frames must be a list of nonnegative integers", line)
        try:
            return cls(
                id=rec["id"],
                duration_s=dur,
                ref_text=ref,
                pl_text=dict(pl),
                metrics={k: float(v) for k, v in metrics.items()},
                frames=frames,
            )
        except ManifestError as exc:
            raise ManifestError(str(exc), line) from None


class Manifest:
    """Ordered, immutable collection of utterances with unique ids."""

    def __init__(self, utterances: Iterable[Utterance] = (), source_tag: str = ""):
        self._utts = tuple(utterances)
        self.source_tag = source_tag
        seen: set[str] = set()
        for u in self._utts:
            if u.id in seen:
                raise ManifestError(f"duplicate utterance id {u.id!r}")
            seen.add(u.id)
        self._index = {u.id: i for i, u in enumerate(self._utts)}

    @property
    def utterances(self) -> tuple[Utterance, ...]:
        return self._utts

    def __len__(self) -> int:
        return len(self._utts)

    def __iter__(self) -> Iterator[Utterance]:
        return iter(self._utts)

    def __getitem__(self, key):
        if isinstance(key, str):
            return self._utts[self._index[key]]
        if isinstance(key, slice):
            return Manifest(self._utts[key], self.source_tag)
        return self._utts[key]

    def __contains__(self, utt_id: str) -> bool:
        return utt_id in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, Manifest):
            return NotImplemented
        return self._utts == other._utts and self.source_tag == other.source_tag

    def __repr__(self) -> str:
        return f"Manifest(n={len(self)}, source_tag={self.source_tag!r})"

    @property
    def ids(self) -> list[str]:
        return [u.id for u in self._utts]

    @property
    def total_duration_s(self) -> float:
        return sum(u.duration_s for u in self._utts)

    def map(self, fn) -> "Manifest":
        return Manifest((fn(u) for u in self._utts), self.source_tag)

    def subset(self, ids: Iterable[str]) -> "Manifest":
        """Utterances whose id is in ``ids``, in manifest order."""
        keep = set(ids)
        return Manifest((u for u in self._utts if u.id in keep), self.source_tag)


def read_manifest(path: str | Path, source_tag: str | None = None) -> Manifest:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"manifest not found: {path}")
    utts: list[Utterance] = []
    seen: dict[str, int] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"invalid JSON ({exc.msg})", lineno) from None
            utt = Utterance.from_record(rec, lineno)
            if utt.id in seen:
                raise ManifestError(
                    f"duplicate id {utt.id!r} (first seen on line {seen[utt.id]})", lineno
                )
            seen[utt.id] = lineno
            utts.append(utt)
    return Manifest(utts, source_tag if source_tag is not None else path.stem)


load_manifest = read_manifest


def write_manifest(manifest: Manifest, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for u in manifest:
            fh.write(json.dumps(u.to_record(), ensure_ascii=False, sort_keys=False))
            fh.write("\n")
