"""Seeded interleaving of supervised and pseudo-labelled utterances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..corpus import Manifest
from ..utils.validation import check_positive_int, check_weights

SUPERVISED = "sup"
PSEUDO = "pl"


@dataclass(frozen=True)
class MuxSchedule:
    batch_size_utts: int | None
    weight_supervised: float
    weight_pl: float
    items: tuple[tuple[str, str], ...]
    batch_duration_s: float | None = None

    def __len__(self) -> int:
        return len(self.items)

    def to_dict(self) -> dict:
        return {
            "batch_size_utts": self.batch_size_utts,
            "batch_duration_s": self.batch_duration_s,
            "weight_supervised": self.weight_supervised,
            "weight_pl": self.weight_pl,
            "items": [{"source": s, "id": i} for s, i in self.items],
        }


class _Cycler:
    """Walks a manifest in order, wrapping around at the end of each epoch."""

    def __init__(self, manifest: Manifest):
        self.utts = manifest.utterances
        self.pos = 0

    def next(self):
        u = self.utts[self.pos]
        self.pos = (self.pos + 1) % len(self.utts)
        return u


def mux(
    supervised: Manifest,
    pl: Manifest,
    batch_size_utts: int | None = 600,
    weights: tuple[float, float] = (0.5, 0.5),
    seed: int = 0,
    length: int | None = None,
    batch_duration_s: float | None = None,
) -> MuxSchedule:
    """Build a weighted interleaving that keeps supervised data in every batch.

    Each position draws its source with probability ``weights``; if the current
    run of pseudo-labelled items would otherwise reach ``batch_size_utts``
    items (or ``batch_duration_s`` seconds), a supervised item is injected.
    Sources are consumed in manifest order, cyclically. ``length`` defaults to
    ``len(supervised) + len(pl)``.
    """
    w_sup, w_pl = check_weights(weights)
    if not len(supervised) or not len(pl):
        raise ValueError("both manifests must be nonempty")
    if batch_size_utts is None and batch_duration_s is None:
        raise ValueError("give batch_size_utts or batch_duration_s")
    if batch_size_utts is not None:
        check_positive_int(batch_size_utts, "batch_size_utts")
    if batch_duration_s is not None and not batch_duration_s > 0:
        raise ValueError("batch_duration_s must be > 0")
    if w_sup == 0:
        raise ValueError("weight_supervised = 0 contradicts the one-supervised-item-per-batch guarantee")
    n = length if length is not None else len(supervised) + len(pl)
    check_positive_int(n, "length", minimum=0)

    rng = np.random.default_rng(seed)
    draws = rng.random(n)
    sup_it, pl_it = _Cycler(supervised), _Cycler(pl)
    items: list[tuple[str, str]] = []
    run_items = 0
    run_dur = 0.0
    for k in range(n):
        use_pl = draws[k] >= w_sup
        if use_pl:
            nxt = pl_it.utts[pl_it.pos]
            if batch_size_utts is not None and run_items + 1 >= batch_size_utts:
                use_pl = False
            if batch_duration_s is not None and run_dur + nxt.duration_s >= batch_duration_s:
                use_pl = False
        if use_pl:
            u = pl_it.next()
            items.append((PSEUDO, u.id))
            run_items += 1
            run_dur += u.duration_s
        else:
            u = sup_it.next()
            items.append((SUPERVISED, u.id))
            run_items = 0
            run_dur = 0.0
    return MuxSchedule(batch_size_utts, w_sup, w_pl, tuple(items), batch_duration_s)


def windows_satisfied(schedule: MuxSchedule, window: int) -> bool:
    """True if every run of ``window`` consecutive items holds a supervised id."""
    run = 0
    for source, _ in schedule.items:
        run = 0 if source == SUPERVISED else run + 1
        if run >= window:
            return False
    return True
