"""Deterministic table-driven transducer.

The "acoustic" side maps frame symbols to vectors through lookup tables and a
causal moving average; the prediction network is a lookup over the last two
emitted tokens (start-padded); the joint is a single linear map followed by a
log-softmax over ``V`` tokens plus blank (id ``V``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..utils.validation import check_int_sequence, check_positive_int

FORMAT = "plstream-table-transducer-v1"
# Name of the parameter generation recipe used by ``TableTransducer.random``.
RANDOM_RECIPE = "normal-v1"

UNLIMITED = None


def log_softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    m = np.max(x, axis=axis, keepdims=True)
    shifted = x - m
    return shifted - np.log(np.sum(np.exp(shifted), axis=axis, keepdims=True))


def _as_visibility(visibility, n_frames: int) -> np.ndarray | None:
    """Per-frame left-context budgets (frames, current one included); None = unlimited."""
    if visibility is None:
        return None
    if np.isscalar(visibility):
        vis = np.full(n_frames, int(visibility), dtype=np.int64)
    else:
        vis = np.asarray(list(visibility), dtype=np.int64)
        if vis.shape != (n_frames,):
            raise ValueError(f"visibility has length {vis.size}, expected {n_frames}")
    if n_frames and vis.min() < 1:
        raise ValueError("visibility must be >= 1 for every frame")
    return vis


@dataclass(frozen=True, eq=False)
class TableTransducer:
    embed: np.ndarray       # (F, H) averaged over the visible window
    predictor: np.ndarray   # (V + 1, V + 1, H), indexed [second-last, last]; V is the start pad
    joint: np.ndarray       # (V + 1, H)
    skip: np.ndarray | None = None  # (F, H) added for the current frame only
    seed: int | None = None

    def __post_init__(self):
        embed = np.array(self.embed, dtype=np.float64)
        joint = np.array(self.joint, dtype=np.float64)
        pred = np.array(self.predictor, dtype=np.float64)
        skip = np.zeros_like(embed) if self.skip is None else np.array(self.skip, dtype=np.float64)
        if embed.ndim != 2 or joint.ndim != 2 or pred.ndim != 3:
            raise ValueError("embed/joint must be 2-D and predictor 3-D")
        v1, h = joint.shape
        if embed.shape[1] != h or pred.shape != (v1, v1, h) or skip.shape != embed.shape:
            raise ValueError(
                f"inconsistent shapes: embed {embed.shape}, skip {skip.shape}, "
                f"predictor {pred.shape}, joint {joint.shape}"
            )
        if v1 < 2:
            raise ValueError("need at least one non-blank token")
        for name, arr in (("embed", embed), ("skip", skip), ("predictor", pred), ("joint", joint)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} has non-finite entries")
            arr.setflags(write=False)
        object.__setattr__(self, "embed", embed)
        object.__setattr__(self, "joint", joint)
        object.__setattr__(self, "predictor", pred)
        object.__setattr__(self, "skip", skip)

    # ---------------------------------------------------------------- shape
    @property
    def vocab_size(self) -> int:
        return self.joint.shape[0] - 1

    @property
    def blank(self) -> int:
        return self.vocab_size

    @property
    def frame_alphabet_size(self) -> int:
        return self.embed.shape[0]

    @property
    def hidden(self) -> int:
        return self.joint.shape[1]

    @classmethod
    def random(cls, vocab_size: int, frame_alphabet_size: int, hidden: int = 8,
               seed: int = 0, scale: float = 1.0) -> "TableTransducer":
        """Draw all tables from ``numpy.random.default_rng(seed)``.

        Draw order: embed, predictor, joint, each standard normal times
        ``scale``; the skip table is zero.
        """
        v = check_positive_int(vocab_size, "vocab_size")
        f = check_positive_int(frame_alphabet_size, "frame_alphabet_size")
        h = check_positive_int(hidden, "hidden")
        rng = np.random.default_rng(seed)
        embed = rng.standard_normal((f, h)) * scale
        pred = rng.standard_normal((v + 1, v + 1, h)) * scale
        joint = rng.standard_normal((v + 1, h)) * scale
        return cls(embed=embed, predictor=pred, joint=joint, seed=seed)

    def with_joint(self, joint: np.ndarray) -> "TableTransducer":
        return TableTransducer(self.embed, self.predictor, joint, self.skip, self.seed)

    # -------------------------------------------------------------- forward
    def check_frames(self, frames: Sequence[int]) -> np.ndarray:
        return check_int_sequence(frames, "frames", upper=self.frame_alphabet_size)

    def encode(self, frames: Sequence[int], visibility=UNLIMITED) -> np.ndarray:
        """Causal encoder output, shape ``(T, H)``.

        Row ``t`` is the mean of ``embed`` over the last ``visibility[t]`` frames
        up to and including ``t`` (all of them when unlimited), plus
        ``skip[frames[t]]``.
        """
        fr = self.check_frames(frames)
        vis = _as_visibility(visibility, len(fr))
        out = np.empty((len(fr), self.hidden))
        for t in range(len(fr)):
            lo = 0 if vis is None else max(0, t - int(vis[t]) + 1)
            out[t] = self.embed[fr[lo:t + 1]].mean(axis=0) + self.skip[fr[t]]
        return out

    def context_index(self, prefix: Sequence[int]) -> tuple[int, int]:
        start = self.vocab_size
        a = prefix[-2] if len(prefix) >= 2 else start
        b = prefix[-1] if len(prefix) >= 1 else start
        return int(a), int(b)

    def predictor_vector(self, prefix: Sequence[int]) -> np.ndarray:
        return self.predictor[self.context_index(prefix)]

    def joint_logprobs(self, enc_vec: np.ndarray, prefix: Sequence[int]) -> np.ndarray:
        """Log-probabilities over ``V`` tokens and blank for one (frame, prefix) pair."""
        z = self.joint @ (enc_vec + self.predictor_vector(prefix))
        return log_softmax(z)

    def hidden_states(self, enc: np.ndarray, target: Sequence[int]) -> np.ndarray:
        """Joint inputs for every lattice cell, shape ``(T, U + 1, H)``."""
        tgt = [int(x) for x in target]
        preds = np.stack([self.predictor_vector(tgt[:u]) for u in range(len(tgt) + 1)])
        return enc[:, None, :] + preds[None, :, :]

    def lattice(self, frames: Sequence[int], target: Sequence[int], visibility=UNLIMITED) -> np.ndarray:
        """Log-probability lattice of shape ``(T, U + 1, V + 1)``."""
        check_int_sequence(target, "target", upper=self.vocab_size)
        hid = self.hidden_states(self.encode(frames, visibility), target)
        return log_softmax(hid @ self.joint.T)

    def ctc_hidden(self, enc: np.ndarray) -> np.ndarray:
        return enc + self.predictor_vector(())

    def ctc_logprobs(self, frames: Sequence[int], visibility=UNLIMITED) -> np.ndarray:
        """Frame-level log-probabilities ``(T, V + 1)`` from the joint at empty context."""
        return log_softmax(self.ctc_hidden(self.encode(frames, visibility)) @ self.joint.T)

    # ------------------------------------------------------------------ I/O
    def to_dict(self) -> dict:
        def arr(a: np.ndarray) -> dict:
            flat = a.reshape(-1)
            nz = np.flatnonzero(flat)
            # Hand-wired tables are mostly zero; store them as index/value pairs.
            if 2 * nz.size < flat.size:
                return {"shape": list(a.shape), "indices": nz.tolist(), "values": flat[nz].tolist()}
            return {"shape": list(a.shape), "data": flat.tolist()}

        return {
            "format": FORMAT,
            "recipe": RANDOM_RECIPE,
            "seed": self.seed,
            "vocab_size": self.vocab_size,
            "frame_alphabet_size": self.frame_alphabet_size,
            "hidden": self.hidden,
            "embed": arr(self.embed),
            "skip": arr(self.skip),
            "predictor": arr(self.predictor),
            "joint": arr(self.joint),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TableTransducer":
        if data.get("format") != FORMAT:
            raise ValueError("not a table transducer model")

        def arr(key: str) -> np.ndarray:
            spec = data[key]
            if "data" in spec:
                return np.asarray(spec["data"], dtype=np.float64).reshape(spec["shape"])
            out = np.zeros(int(np.prod(spec["shape"])))
            out[np.asarray(spec["indices"], dtype=np.int64)] = spec["values"]
            return out.reshape(spec["shape"])

        skip = arr("skip") if "skip" in data else None
        return cls(embed=arr("embed"), predictor=arr("predictor"), joint=arr("joint"),
                   skip=skip, seed=data.get("seed"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "TableTransducer":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
