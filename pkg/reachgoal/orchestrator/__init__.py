# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
from reachgoal.orchestrator.config import ABLATIONS, RunConfig, run_tag
from reachgoal.orchestrator.evaluation import EvalReport, eval_goal_set, evaluate
from reachgoal.orchestrator.training import (EpisodeResult, TrainResult, compute_reward, run_ablation, run_episode,
                                             train)

__all__ = [
    "ABLATIONS", "EpisodeResult", "EvalReport", "RunConfig", "TrainResult", "compute_reward", "eval_goal_set",
    "evaluate", "run_ablation", "run_episode", "run_tag", "train"
]
