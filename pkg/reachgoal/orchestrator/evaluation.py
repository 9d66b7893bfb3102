# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Evaluation of the deterministic policy on a fixed goal set with the oracle metric
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from reachgoal.envs import Environment, PusherEnv, hand_distance, make_env
from reachgoal.orchestrator.config import SUCCESS_DISTANCE, RunConfig
from reachgoal.policy.sac import SACState, actor_mean

logger = logging.getLogger(__file__)


@dataclass
class EvalReport:
    """Final distances of one evaluation, in goal-index order"""
    step: int
    goals: np.ndarray
    final_distances: np.ndarray
    mean: float
    std: float
    # room index -> fraction of that room's goals ending closer than SUCCESS_DISTANCE
    room_success: Dict[int, float] = field(default_factory=dict)
    hand_distance: Optional[float] = None

    def summary_lines(self) -> List[str]:
        """`key value` lines for printing"""
        lines = [f"step {self.step:d}", f"mean {self.mean:.10g}", f"std {self.std:.10g}"]
        lines.extend(f"room{room}_success {fraction:.10g}" for room, fraction in sorted(self.room_success.items()))
        if self.hand_distance is not None:
            lines.append(f"hand_distance {self.hand_distance:.10g}")
        return lines


def eval_goal_set(config: RunConfig, env: Environment) -> np.ndarray:
    """The evaluation goals of a run; they depend on eval_goal_seed only, never on the run seed"""
    return np.array(env.sample_eval_goals(config.eval_goal_count, np.random.default_rng(config.eval_goal_seed)))


def evaluate(sac: SACState, env: Environment, goals: Sequence, horizon: int, step: int = 0) -> EvalReport:
    """
    Roll the deterministic policy toward every goal from the start state.

    All goals are rolled in lock-step with one environment per goal and one batched actor
    pass per step.

    Args:
        sac: The agent; only its actor is read
        env: Any instance of the environment to evaluate in, left untouched
        goals: Non-empty goal set
        horizon: Steps per rollout
        step: Policy-step count recorded in the report

    Returns:
        The report with oracle final distances
    """
    goals = env.check_observation(np.atleast_2d(np.asarray(goals, dtype=np.float64)))
    if goals.shape[0] == 0:
        raise ValueError("Evaluation needs at least one goal")
    rollouts = [make_env(env.name) for _ in range(goals.shape[0])]
    states = np.array([rollout.reset() for rollout in rollouts])
    for _ in range(horizon):
        actions = actor_mean(sac, states, goals)
        states = np.array([rollout.step(action) for rollout, action in zip(rollouts, actions)])

    distances = np.asarray(env.oracle_distance(states, goals), dtype=np.float64)
    report = EvalReport(step=step,
                        goals=goals,
                        final_distances=distances,
                        mean=float(np.mean(distances)),
                        std=float(np.std(distances)))
    rooms = [env.room_of_observation(goal) for goal in goals]
    if rooms and rooms[0] is not None:
        rooms = np.array(rooms)
        report.room_success = {
            int(room): float(np.mean(distances[rooms == room] < SUCCESS_DISTANCE))
            for room in np.unique(rooms)
        }
    if isinstance(env, PusherEnv):
        report.hand_distance = float(np.mean(hand_distance(states, goals)))
    logger.info("Evaluation at step %d: mean %.4f std %.4f rooms %s hand %s", step, report.mean, report.std,
                report.room_success, report.hand_distance)
    return report
