# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
from reachgoal.numcore.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from reachgoal.numcore.gradcheck import check_gradient, numeric_gradient, relative_error
from reachgoal.numcore.losses import bce_with_logits, mean_bce_loss, mean_squared_loss, sigmoid
from reachgoal.numcore.network import (NetParams, NetSpec, net_backward, net_forward, net_forward_cached,
                                       net_gradient, net_init)
from reachgoal.numcore.optim import AdamState, adam_step
from reachgoal.numcore.pca import pca_2d

__all__ = [
    "AdamState", "Checkpoint", "NetParams", "NetSpec", "adam_step", "bce_with_logits", "check_gradient",
    "load_checkpoint", "mean_bce_loss", "mean_squared_loss", "net_backward", "net_forward", "net_forward_cached",
    "net_gradient", "net_init", "numeric_gradient", "pca_2d", "relative_error", "save_checkpoint", "sigmoid"
]
