"""Toy table transducer and reference RNN-T / CTC losses."""

from .losses import (
    LossConfig,
    combined_loss,
    combined_loss_and_joint_grad,
    ctc_loss,
    ctc_loss_and_grad,
    grad_check,
    rnnt_backward,
    rnnt_forward,
    rnnt_loss,
    rnnt_loss_and_grad,
)
from .model import RANDOM_RECIPE, TableTransducer, log_softmax

__all__ = [
    "LossConfig",
    "RANDOM_RECIPE",
    "TableTransducer",
    "combined_loss",
    "combined_loss_and_joint_grad",
    "ctc_loss",
    "ctc_loss_and_grad",
    "grad_check",
    "log_softmax",
    "rnnt_backward",
    "rnnt_forward",
    "rnnt_loss",
    "rnnt_loss_and_grad",
]
