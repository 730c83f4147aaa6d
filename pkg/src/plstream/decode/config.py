"""Chunk / left-context settings for simulated streaming."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..utils.validation import check_positive_int

FULL = None
FRAME_MS = 40

SWEEP_CHUNKS_MS = (320, 640, 1280, 2560)
SWEEP_LEFT_LABELS = ("2.56s", "5.12s", "inf")
OFFLINE_LABEL = "cs=full;lf=inf"

_LABEL = re.compile(r"^cs=(?P<cs>\d+ms|full);lf=(?P<lf>\d+(?:\.\d+)?s|inf)$")


@dataclass(frozen=True)
class StreamingConfig:
    """``None`` for either field means FULL (whole utterance / all history)."""

    chunk_frames: int | None = FULL
    left_context_frames: int | None = FULL
    frame_ms: int = FRAME_MS

    def __post_init__(self):
        check_positive_int(self.frame_ms, "frame_ms")
        if self.chunk_frames is not FULL:
            check_positive_int(self.chunk_frames, "chunk_frames")
        if self.left_context_frames is not FULL:
            check_positive_int(self.left_context_frames, "left_context_frames")

    @property
    def is_offline(self) -> bool:
        return self.chunk_frames is FULL and self.left_context_frames is FULL

    @property
    def effective_left_frames(self) -> int | None:
        """Left context rounded down to whole chunks; None when unlimited."""
        if self.left_context_frames is FULL or self.chunk_frames is FULL:
            return self.left_context_frames
        return (self.left_context_frames // self.chunk_frames) * self.chunk_frames

    @property
    def chunk_ms(self) -> int | None:
        return None if self.chunk_frames is FULL else self.chunk_frames * self.frame_ms

    @property
    def left_ms(self) -> int | None:
        return None if self.left_context_frames is FULL else self.left_context_frames * self.frame_ms

    def chunks(self, n_frames: int) -> list[tuple[int, int]]:
        if n_frames == 0:
            return []
        step = n_frames if self.chunk_frames is FULL else self.chunk_frames
        return [(s, min(s + step, n_frames)) for s in range(0, n_frames, step)]

    def visibility(self, n_frames: int) -> np.ndarray | None:
        """Frames visible to the encoder at each position, current frame included."""
        if self.left_context_frames is FULL or self.chunk_frames is FULL:
            return None
        left = self.effective_left_frames
        vis = np.empty(n_frames, dtype=np.int64)
        for start, end in self.chunks(n_frames):
            vis[start:end] = np.arange(1, end - start + 1) + left
        return vis

    def label(self) -> str:
        cs = "full" if self.chunk_frames is FULL else f"{self.chunk_ms}ms"
        if self.left_context_frames is FULL:
            lf = "inf"
        else:
            lf = f"{self.left_ms / 1000:g}s"
        return f"cs={cs};lf={lf}"


def fuse_configs(label: str, frame_ms: int = FRAME_MS) -> StreamingConfig:
    """Parse labels such as ``"cs=320ms;lf=2.5s"`` or ``"cs=640ms;lf=inf"``.

    The chunk must be a whole number of frames. The left context is rounded
    down to whole frames. ``cs=full`` is accepted for the offline setting.
    """
    m = _LABEL.match(label.strip())
    if m is None:
        raise ValueError(f"malformed streaming label {label!r}; expected 'cs=<int>ms;lf=<real>s|inf'")
    frame_ms = check_positive_int(frame_ms, "frame_ms")
    cs = m.group("cs")
    if cs == "full":
        chunk = FULL
    else:
        ms = int(cs[:-2])
        if ms == 0 or ms % frame_ms:
            raise ValueError(f"chunk of {ms} ms is not a positive multiple of {frame_ms} ms frames")
        chunk = ms // frame_ms
    lf = m.group("lf")
    if lf == "inf":
        left = FULL
    else:
        ms = Fraction(lf[:-1]) * 1000
        left = math.floor(ms / frame_ms)
        if left < 1:
            raise ValueError(f"left context {lf} is shorter than one frame")
    return StreamingConfig(chunk, left, frame_ms)


def sweep_labels() -> list[str]:
    """Twelve chunk x left-context settings followed by the offline setting."""
    labels = [f"cs={cs}ms;lf={lf}" for cs in SWEEP_CHUNKS_MS for lf in SWEEP_LEFT_LABELS]
    return labels + [OFFLINE_LABEL]
