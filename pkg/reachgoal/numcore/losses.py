# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Losses usable as the loss_fn of net_gradient
"""
from typing import Tuple

import numpy as np


def sigmoid(logits):
    """Logistic function, evaluated through tanh so large magnitudes do not overflow"""
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(logits, dtype=np.float64)))


def bce_with_logits(logits, labels):
    """
    Binary cross-entropy on raw logits: softplus(logit) - label * logit.

    Args:
        logits: Real scores, any shape
        labels: 0/1 labels broadcastable to logits

    Returns:
        The elementwise loss
    """
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if np.any((labels != 0.0) & (labels != 1.0)):
        raise ValueError("Labels must be 0 or 1")
    return np.logaddexp(0.0, logits) - labels * logits


def mean_bce_loss(logits: np.ndarray, labels: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean binary cross-entropy over a batch of single-logit outputs and its gradient"""
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64).reshape(logits.shape)
    loss = float(np.mean(bce_with_logits(logits, labels)))
    grad = (sigmoid(logits) - labels) / logits.shape[0]
    return loss, grad


def mean_squared_loss(outputs: np.ndarray, targets: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean over the batch of the squared residual summed over output components"""
    outputs = np.asarray(outputs, dtype=np.float64)
    residual = outputs - np.asarray(targets, dtype=np.float64).reshape(outputs.shape)
    loss = float(np.mean(np.sum(residual**2, axis=-1)))
    return loss, 2.0 * residual / outputs.shape[0]
