"""Small input validation helpers shared by the estimators."""

from __future__ import annotations

import math
from numbers import Integral, Real

import numpy as np


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_finite_real(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value


def check_interval(value, name: str, low: float, high: float,
                   closed: str = "both") -> float:
    """Check ``low <= value <= high`` with the requested closedness."""
    value = check_finite_real(value, name)
    lo_ok = value >= low if closed in ("both", "left") else value > low
    hi_ok = value <= high if closed in ("both", "right") else value < high
    if not (lo_ok and hi_ok):
        raise ValueError(f"{name}={value} outside of [{low}, {high}] ({closed})")
    return value


def check_weights(weights, name: str = "weights", atol: float = 1e-9) -> tuple[float, ...]:
    ws = tuple(check_finite_real(w, name) for w in weights)
    if any(w < 0 for w in ws):
        raise ValueError(f"{name} must be nonnegative, got {ws}")
    if abs(sum(ws) - 1.0) > atol:
        raise ValueError(f"{name} must sum to 1, got {sum(ws)}")
    return ws


def check_int_sequence(seq, name: str, upper: int | None = None) -> np.ndarray:
    """Convert to a 1-D int64 array, optionally checking ``0 <= x < upper``."""
    arr = np.asarray(list(seq), dtype=np.int64).reshape(-1)
    if arr.size and arr.min() < 0:
        raise ValueError(f"{name} contains negative ids")
    if upper is not None and arr.size and arr.max() >= upper:
        raise ValueError(f"{name} contains id {int(arr.max())} >= {upper}")
    return arr
