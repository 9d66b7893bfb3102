# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Self-supervised training of the reachability network on random-walk pairs
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from reachgoal.exceptions import NonFiniteLossError
from reachgoal.numcore.optim import AdamState, adam_step
from reachgoal.rnet.buffer import TrajectoryBuffer, sample_pairs
from reachgoal.rnet.model import RNetModel, rnet_logit, rnet_loss_and_gradient

logger = logging.getLogger(__file__)

LOSS_WINDOW = 100
PROBE_PAIRS = 1024


@dataclass
class RNetStats:
    """Summary of one call to rnet_train"""
    steps: int
    window_losses: List[float] = field(default_factory=list)
    probe_accuracy: float = float("nan")

    @property
    def final_loss(self) -> Optional[float]:
        return self.window_losses[-1] if self.window_losses else None


def balanced_accuracy(logits: np.ndarray, labels: np.ndarray) -> float:
    """Mean of the true positive and true negative rates, predicting reachable when the logit is positive"""
    predicted = np.asarray(logits) > 0.0
    labels = np.asarray(labels) > 0.5
    rates = [np.mean(predicted[labels == cls] == cls) for cls in (True, False) if np.any(labels == cls)]
    return float(np.mean(rates))


def rnet_train(model: RNetModel,
               buffer: TrajectoryBuffer,
               steps: int,
               batch_size: int,
               adam: AdamState,
               rng: np.random.Generator,
               start_step: int = 0) -> Tuple[RNetModel, AdamState, RNetStats]:
    """
    Run Adam updates of the mean pair cross-entropy.

    Args:
        model: The current network snapshot, left untouched
        buffer: Random-walk trajectories to sample pairs from
        steps: Number of optimizer updates, may be 0
        batch_size: Pairs per update
        adam: Optimizer state carried between retrains
        rng: Source of pair batches and of the probe set
        start_step: Update counter used in error messages

    Returns:
        The trained snapshot, the new optimizer state and the training statistics
    """
    if adam.m.shape[0] != model.num_params:
        raise ValueError(f"Optimizer state has {adam.m.shape[0]} entries, the RNet has {model.num_params} parameters")
    stats = RNetStats(steps=steps)
    flat = model.flat()
    window = []
    for step in range(steps):
        batch = sample_pairs(buffer, batch_size, rng, model.tau_reach)
        loss, grad = rnet_loss_and_gradient(model.with_flat(flat), batch.first, batch.second, batch.labels)
        if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
            raise NonFiniteLossError("reachability", loss, start_step + step)
        flat, adam = adam_step(flat, grad, adam)
        window.append(loss)
        if len(window) == LOSS_WINDOW:
            stats.window_losses.append(float(np.mean(window)))
            window = []
    if window:
        stats.window_losses.append(float(np.mean(window)))

    trained = model.with_flat(flat) if steps else model
    probe = sample_pairs(buffer, PROBE_PAIRS, rng, trained.tau_reach)
    stats.probe_accuracy = balanced_accuracy(rnet_logit(trained, probe.first, probe.second), probe.labels)
    logger.info("RNet trained for %d steps: final loss %s, probe balanced accuracy %.3f", steps, stats.final_loss,
                stats.probe_accuracy)
    return trained, adam, stats
