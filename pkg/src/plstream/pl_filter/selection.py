"""Metric-driven data selection: thresholds, fixed hour budgets, random subsets."""

from __future__ import annotations

import logging
import operator
import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..corpus import Manifest, NormalizationRules, normalize_text, word_breakdown
from ..utils.validation import check_finite_real

logger = logging.getLogger(__name__)

PSEUDO_WER = "pseudo_wer"
MODES = ("threshold", "budget", "random")
DIRECTIONS = ("ascending", "descending")
_DIRECTION_ALIASES = {"asc": "ascending", "desc": "descending"}


def cross_model_wer(
    manifest: Manifest,
    hyp_tag: str,
    ref_tag: str,
    metric_name: str = PSEUDO_WER,
    rules: NormalizationRules | None = None,
) -> Manifest:
    """Attach the WER of one teacher's pseudo-label against another's.

    An empty reference pseudo-label scores 1.0 (with a warning).
    """
    rules = rules or NormalizationRules()
    out = []
    for u in manifest:
        missing = [t for t in (hyp_tag, ref_tag) if t not in u.pl_text]
        if missing:
            raise KeyError(f"utterance {u.id!r} lacks pseudo-label(s) {missing}")
        ref_words = normalize_text(u.pl_text[ref_tag], rules).split()
        if not ref_words:
            warnings.warn(f"utterance {u.id!r}: empty {ref_tag!r} pseudo-label, {metric_name} set to 1.0",
                          stacklevel=2)
            value = 1.0
        else:
            hyp_words = normalize_text(u.pl_text[hyp_tag], rules).split()
            value = word_breakdown(ref_words, hyp_words).wer
        out.append(u.with_metric(metric_name, value))
    return Manifest(out, manifest.source_tag)


@dataclass(frozen=True)
class SelectionPolicy:
    metric_name: str = PSEUDO_WER
    direction: str = "ascending"
    mode: str = "budget"
    budget_hours: float | None = None
    threshold: float | None = None
    seed: int = 0

    def __post_init__(self):
        direction = _DIRECTION_ALIASES.get(self.direction, self.direction)
        object.__setattr__(self, "direction", direction)
        if direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "threshold":
            if self.threshold is None:
                raise ValueError("threshold mode requires a threshold")
            if self.budget_hours is not None:
                raise ValueError("threshold mode does not take budget_hours")
            check_finite_real(self.threshold, "threshold")
        else:
            if self.threshold is not None:
                raise ValueError(f"{self.mode} mode does not take a threshold")
            if self.budget_hours is None or check_finite_real(self.budget_hours, "budget_hours") <= 0:
                raise ValueError(f"{self.mode} mode requires budget_hours > 0")

    def passes(self, value: float) -> bool:
        """Threshold predicate: ``<=`` for ascending metrics, ``>=`` for descending."""
        cmp = operator.le if self.direction == "ascending" else operator.ge
        return cmp(value, self.threshold)


def _metric_values(manifest: Manifest, name: str) -> list[float]:
    if len(manifest) and not any(name in u.metrics for u in manifest):
        raise KeyError(f"unknown metric {name!r}")
    values = []
    for u in manifest:
        if name not in u.metrics:
            raise KeyError(f"utterance {u.id!r} is missing metric {name!r}")
        values.append(u.metrics[name])
    return values


def _budget_prefix(manifest: Manifest, order: list[int], budget_s: float) -> list[str]:
    chosen: list[str] = []
    total = 0.0
    for idx in order:
        u = manifest[idx]
        if total + u.duration_s > budget_s:
            break
        total += u.duration_s
        chosen.append(u.id)
    return chosen


def select(manifest: Manifest, policy: SelectionPolicy) -> Manifest:
    """Select a subset of ``manifest`` according to ``policy``.

    Budget mode ranks by the metric (ties broken by id) and keeps the longest
    ranked prefix whose total duration fits in the budget. Random mode does the
    same over a seeded permutation. The result keeps manifest order.
    """
    if policy.mode == "random":
        order = list(np.random.default_rng(policy.seed).permutation(len(manifest)))
    else:
        values = _metric_values(manifest, policy.metric_name)
        if policy.mode == "threshold":
            return manifest.subset(u.id for u, v in zip(manifest, values) if policy.passes(v))
        sign = 1.0 if policy.direction == "ascending" else -1.0
        order = sorted(range(len(manifest)), key=lambda i: (sign * values[i], manifest[i].id))

    budget_s = policy.budget_hours * 3600.0
    chosen = _budget_prefix(manifest, order, budget_s)
    if len(manifest) and not chosen:
        shortest = min(u.duration_s for u in manifest)
        if shortest > budget_s:
            warnings.warn(
                f"budget of {policy.budget_hours} h is below the shortest utterance "
                f"({shortest:.1f} s); selection is empty",
                stacklevel=2,
            )
    logger.info("selected %d of %d utterances (%s)", len(chosen), len(manifest), policy)
    return manifest.subset(chosen)


class MetricSelector(BaseEstimator, TransformerMixin):
    """Estimator form of :func:`select`; ``fit`` only validates the policy."""

    def __init__(self, metric_name=PSEUDO_WER, direction="ascending", mode="budget",
                 budget_hours=None, threshold=None, seed=0):
        self.metric_name = metric_name
        self.direction = direction
        self.mode = mode
        self.budget_hours = budget_hours
        self.threshold = threshold
        self.seed = seed

    def fit(self, X=None, y=None):
        self.policy_ = SelectionPolicy(
            metric_name=self.metric_name,
            direction=self.direction,
            mode=self.mode,
            budget_hours=self.budget_hours,
            threshold=self.threshold,
            seed=self.seed,
        )
        return self

    def transform(self, X: Manifest) -> Manifest:
        check_is_fitted(self, "policy_")
        return select(X, self.policy_)


def attach_perplexity(manifest: Manifest, lm, model_tag: str,
                      metric_name: str = "ppl") -> Manifest:
    """Score each ``model_tag`` pseudo-label with an n-gram LM perplexity.

    Empty pseudo-labels get ``inf``.
    """
    out = []
    for u in manifest:
        text = u.pl_text.get(model_tag)
        if text is None:
            raise KeyError(f"utterance {u.id!r} has no pseudo-label for model tag {model_tag!r}")
        value = lm.perplexity(text) if text.split() else float("inf")
        out.append(u.with_metric(metric_name, value))
    return Manifest(out, manifest.source_tag)
