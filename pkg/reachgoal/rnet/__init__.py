# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
from reachgoal.rnet.buffer import PairBatch, Trajectory, TrajectoryBuffer, reachability_label, sample_pairs
from reachgoal.rnet.model import RNetModel, embed, rnet_distance, rnet_logit, rnet_score
from reachgoal.rnet.training import RNetStats, rnet_train

__all__ = [
    "PairBatch", "RNetModel", "RNetStats", "Trajectory", "TrajectoryBuffer", "embed", "reachability_label",
    "rnet_distance", "rnet_logit", "rnet_score", "rnet_train", "sample_pairs"
]
