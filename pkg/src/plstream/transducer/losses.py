"""Reference RNN-T and CTC losses with forward-backward gradients.

All recursions run in the natural-log domain on dense numpy arrays. Losses are
negative log-likelihoods; an infeasible target returns ``+inf``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..utils.validation import check_interval
from .model import TableTransducer, log_softmax

NEG_INF = -np.inf


@dataclass(frozen=True)
class LossConfig:
    lam: float = 0.1

    def __post_init__(self):
        check_interval(self.lam, "lambda", 0.0, 1.0)


def _lse(a: float, b: float) -> float:
    return np.logaddexp(a, b)


# ----------------------------------------------------------------- RNN-T
def rnnt_forward(lattice: np.ndarray, target: Sequence[int], blank: int) -> np.ndarray:
    """Forward variables ``alpha[t, u]`` (log prob of reaching cell (t, u))."""
    T, U1, _ = lattice.shape
    y = [int(v) for v in target]
    alpha = np.full((T, U1), NEG_INF)
    alpha[0, 0] = 0.0
    for t in range(T):
        for u in range(U1):
            if t == 0 and u == 0:
                continue
            stay = alpha[t - 1, u] + lattice[t - 1, u, blank] if t > 0 else NEG_INF
            emit = alpha[t, u - 1] + lattice[t, u - 1, y[u - 1]] if u > 0 else NEG_INF
            alpha[t, u] = _lse(stay, emit)
    return alpha


def rnnt_backward(lattice: np.ndarray, target: Sequence[int], blank: int) -> np.ndarray:
    """Backward variables ``beta[t, u]`` (log prob of finishing from (t, u))."""
    T, U1, _ = lattice.shape
    U = U1 - 1
    y = [int(v) for v in target]
    beta = np.full((T, U1), NEG_INF)
    beta[T - 1, U] = lattice[T - 1, U, blank]
    for t in range(T - 1, -1, -1):
        for u in range(U, -1, -1):
            if t == T - 1 and u == U:
                continue
            stay = lattice[t, u, blank] + beta[t + 1, u] if t < T - 1 else NEG_INF
            emit = lattice[t, u, y[u]] + beta[t, u + 1] if u < U else NEG_INF
            beta[t, u] = _lse(stay, emit)
    return beta


def _check_lattice(lattice: np.ndarray, target: Sequence[int]) -> None:
    if lattice.ndim != 3:
        raise ValueError("lattice must have shape (T, U + 1, V + 1)")
    if lattice.shape[1] != len(target) + 1:
        raise ValueError(f"lattice has U + 1 = {lattice.shape[1]} but target has {len(target)} tokens")


def rnnt_loss(lattice: np.ndarray, target: Sequence[int], blank: int | None = None) -> float:
    """Negative log of the summed probability of all blank/emit paths."""
    lattice = np.asarray(lattice, dtype=np.float64)
    _check_lattice(lattice, target)
    blank = lattice.shape[2] - 1 if blank is None else blank
    if lattice.shape[0] == 0:
        return float("inf")
    alpha = rnnt_forward(lattice, target, blank)
    T, U1, _ = lattice.shape
    return float(-(alpha[T - 1, U1 - 1] + lattice[T - 1, U1 - 1, blank]))


def rnnt_loss_and_grad(lattice: np.ndarray, target: Sequence[int],
                       blank: int | None = None) -> tuple[float, np.ndarray]:
    """Loss and its gradient with respect to every lattice log-probability."""
    lattice = np.asarray(lattice, dtype=np.float64)
    _check_lattice(lattice, target)
    blank = lattice.shape[2] - 1 if blank is None else blank
    grad = np.zeros_like(lattice)
    T, U1, _ = lattice.shape
    if T == 0:
        return float("inf"), grad
    U = U1 - 1
    y = [int(v) for v in target]
    alpha = rnnt_forward(lattice, y, blank)
    beta = rnnt_backward(lattice, y, blank)
    log_z = beta[0, 0]
    if not np.isfinite(log_z):
        return float("inf"), grad
    for t in range(T):
        for u in range(U1):
            if not np.isfinite(alpha[t, u]):
                continue
            if t < T - 1:
                grad[t, u, blank] = -np.exp(alpha[t, u] + lattice[t, u, blank] + beta[t + 1, u] - log_z)
            elif u == U:
                grad[t, u, blank] = -np.exp(alpha[t, u] + lattice[t, u, blank] - log_z)
            if u < U:
                grad[t, u, y[u]] = -np.exp(alpha[t, u] + lattice[t, u, y[u]] + beta[t, u + 1] - log_z)
    return float(-log_z), grad


# ------------------------------------------------------------------- CTC
def _extend(target: Sequence[int], blank: int) -> list[int]:
    ext = [blank]
    for v in target:
        ext += [int(v), blank]
    return ext


def _ctc_alpha(logp: np.ndarray, ext: list[int], blank: int) -> np.ndarray:
    T, S = logp.shape[0], len(ext)
    alpha = np.full((T, S), NEG_INF)
    alpha[0, 0] = logp[0, ext[0]]
    if S > 1:
        alpha[0, 1] = logp[0, ext[1]]
    for t in range(1, T):
        for s in range(S):
            a = alpha[t - 1, s]
            if s >= 1:
                a = _lse(a, alpha[t - 1, s - 1])
            if s >= 2 and ext[s] != blank and ext[s] != ext[s - 2]:
                a = _lse(a, alpha[t - 1, s - 2])
            alpha[t, s] = a + logp[t, ext[s]]
    return alpha


def _ctc_beta(logp: np.ndarray, ext: list[int], blank: int) -> np.ndarray:
    T, S = logp.shape[0], len(ext)
    beta = np.full((T, S), NEG_INF)
    beta[T - 1, S - 1] = logp[T - 1, ext[S - 1]]
    if S > 1:
        beta[T - 1, S - 2] = logp[T - 1, ext[S - 2]]
    for t in range(T - 2, -1, -1):
        for s in range(S):
            b = beta[t + 1, s]
            if s + 1 < S:
                b = _lse(b, beta[t + 1, s + 1])
            if s + 2 < S and ext[s] != blank and ext[s] != ext[s + 2]:
                b = _lse(b, beta[t + 1, s + 2])
            beta[t, s] = b + logp[t, ext[s]]
    return beta


def ctc_loss(frame_logprobs: np.ndarray, target: Sequence[int], blank: int | None = None) -> float:
    """CTC negative log-likelihood over the blank-extended label sequence."""
    logp = np.asarray(frame_logprobs, dtype=np.float64)
    blank = logp.shape[1] - 1 if blank is None else blank
    T = logp.shape[0]
    if T == 0:
        return float("inf") if len(target) else 0.0
    ext = _extend(target, blank)
    alpha = _ctc_alpha(logp, ext, blank)
    S = len(ext)
    end = alpha[T - 1, S - 1] if S == 1 else _lse(alpha[T - 1, S - 1], alpha[T - 1, S - 2])
    return float(-end) if np.isfinite(end) else float("inf")


def ctc_loss_and_grad(frame_logprobs: np.ndarray, target: Sequence[int],
                      blank: int | None = None) -> tuple[float, np.ndarray]:
    logp = np.asarray(frame_logprobs, dtype=np.float64)
    blank = logp.shape[1] - 1 if blank is None else blank
    grad = np.zeros_like(logp)
    loss = ctc_loss(logp, target, blank)
    if not np.isfinite(loss) or logp.shape[0] == 0:
        return loss, grad
    ext = _extend(target, blank)
    alpha = _ctc_alpha(logp, ext, blank)
    beta = _ctc_beta(logp, ext, blank)
    log_z = -loss
    # alpha and beta both include the emission at t, so remove it once.
    occ = alpha + beta - logp[:, ext] - log_z
    for s, k in enumerate(ext):
        finite = np.isfinite(occ[:, s])
        grad[finite, k] -= np.exp(occ[finite, s])
    return loss, grad


# --------------------------------------------------------------- combined
def _softmax_backward(grad_logp: np.ndarray, logp: np.ndarray) -> np.ndarray:
    """Map d/d(log_softmax(z)) to d/dz."""
    return grad_logp - np.exp(logp) * grad_logp.sum(axis=-1, keepdims=True)


def _mix(a: float, b: float, lam: float) -> float:
    if lam == 0.0:
        return a
    if lam == 1.0:
        return b
    return (1.0 - lam) * a + lam * b


def combined_loss(model: TableTransducer, frames: Sequence[int], target: Sequence[int],
                  cfg: LossConfig | float = LossConfig(), visibility=None) -> float:
    """``(1 - lam) * rnnt + lam * ctc`` for one utterance."""
    lam = cfg.lam if isinstance(cfg, LossConfig) else LossConfig(cfg).lam
    r = rnnt_loss(model.lattice(frames, target, visibility), target, model.blank) if lam < 1 else 0.0
    c = ctc_loss(model.ctc_logprobs(frames, visibility), target, model.blank) if lam > 0 else 0.0
    return _mix(r, c, lam)


def combined_loss_and_joint_grad(model: TableTransducer, frames: Sequence[int],
                                 target: Sequence[int], cfg: LossConfig | float = LossConfig(),
                                 visibility=None) -> tuple[float, np.ndarray]:
    """Combined loss and its analytic gradient with respect to the joint matrix."""
    lam = cfg.lam if isinstance(cfg, LossConfig) else LossConfig(cfg).lam
    check_target = [int(v) for v in target]
    enc = model.encode(frames, visibility)
    grad = np.zeros_like(model.joint)
    r = c = 0.0
    if lam < 1:
        hid = model.hidden_states(enc, check_target)
        lat = log_softmax(hid @ model.joint.T)
        r, g_lat = rnnt_loss_and_grad(lat, check_target, model.blank)
        g_z = _softmax_backward(g_lat, lat)
        grad += (1.0 - lam) * np.einsum("tuk,tuh->kh", g_z, hid)
    if lam > 0:
        hid_c = model.ctc_hidden(enc)
        logp = log_softmax(hid_c @ model.joint.T)
        c, g_logp = ctc_loss_and_grad(logp, check_target, model.blank)
        g_z = _softmax_backward(g_logp, logp)
        grad += lam * (g_z.T @ hid_c)
    return _mix(r, c, lam), grad


def grad_check(model: TableTransducer, frames: Sequence[int], target: Sequence[int],
               cfg: LossConfig | float = LossConfig(), epsilon: float = 1e-4,
               floor: float = 1e-6) -> float:
    """Largest relative gap between analytic and central-difference joint gradients.

    The relative gap of one entry is ``|a - n| / max(|a|, |n|, floor)``. The
    default step keeps round-off (about ``1e-16 * loss / epsilon``) small next
    to gradient entries near the floor when the loss itself is large.
    """
    check_interval(epsilon, "epsilon", 1e-6, 1e-3)
    loss, analytic = combined_loss_and_joint_grad(model, frames, target, cfg)
    if not np.isfinite(loss):
        raise ValueError("loss is infinite; gradient undefined")
    joint = np.array(model.joint)
    worst = 0.0
    for idx in np.ndindex(joint.shape):
        plus = joint.copy()
        plus[idx] += epsilon
        minus = joint.copy()
        minus[idx] -= epsilon
        numeric = (combined_loss(model.with_joint(plus), frames, target, cfg)
                   - combined_loss(model.with_joint(minus), frames, target, cfg)) / (2 * epsilon)
        a = analytic[idx]
        worst = max(worst, abs(a - numeric) / max(abs(a), abs(numeric), floor))
    return worst
