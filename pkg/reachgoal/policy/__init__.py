# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
from reachgoal.policy.replay import ReplayBuffer, Transition, TransitionBatch
from reachgoal.policy.sac import (SACConfig, SACState, actor_loss, actor_mean, actor_sample, critic_loss,
                                  critic_targets, replay_push, replay_sample, sac_update, squashed_sample,
                                  temperature_loss)

__all__ = [
    "ReplayBuffer", "SACConfig", "SACState", "Transition", "TransitionBatch", "actor_loss", "actor_mean",
    "actor_sample", "critic_loss", "critic_targets", "replay_push", "replay_sample", "sac_update", "squashed_sample",
    "temperature_loss"
]
