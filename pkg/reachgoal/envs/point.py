# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Open arena without walls. Small enough to sanity-check the policy learner on its own.
"""
from typing import List

import numpy as np

from reachgoal.envs.base import Environment, clamp_action, euclidean

START_POSITION = (0.5, 0.5)
MAX_STEP = 0.05


class PointEnv(Environment):
    """A point moved directly by its action inside the unit square"""
    name = "point"
    observation_dim = 2
    action_dim = 2
    horizon = 50

    def __init__(self):
        self._position = np.array(START_POSITION, dtype=np.float64)

    def reset(self) -> np.ndarray:
        self._position = np.array(START_POSITION, dtype=np.float64)
        return self.observation()

    def observation(self) -> np.ndarray:
        return self._position.copy()

    def set_observation(self, observation) -> None:
        self._position = np.array(self.check_observation(observation), dtype=np.float64)

    def step(self, action) -> np.ndarray:
        action = clamp_action(action, self.action_dim)
        self._position = np.clip(self._position + MAX_STEP * action, 0.0, 1.0)
        return self.observation()

    def oracle_distance(self, state, goal):
        return euclidean(self.check_observation(state), self.check_observation(goal))

    def sample_eval_goals(self, count: int, rng: np.random.Generator) -> List[np.ndarray]:
        if count < 1:
            raise ValueError(f"Need at least one goal, got {count}")
        return list(rng.uniform(0.0, 1.0, size=(count, self.observation_dim)))
