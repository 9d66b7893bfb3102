# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Common interface of the deterministic continuous-control environments
"""
from abc import ABC, abstractmethod
from typing import List, Optional

import numpy as np


def clamp_action(action, action_dim: int) -> np.ndarray:
    """
    Sanitize an action: non-finite components are replaced and everything is clamped to [-1, 1].

    Args:
        action: The raw action
        action_dim: The expected number of components

    Returns:
        The clamped action as a float vector
    """
    action = np.asarray(action, dtype=np.float64).reshape(-1)
    if action.shape[0] != action_dim:
        raise ValueError(f"Expected an action with {action_dim} components, got {action.shape[0]}")
    action = np.nan_to_num(action, nan=0.0, posinf=1.0, neginf=-1.0)
    return np.clip(action, -1.0, 1.0)


def euclidean(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Euclidean distance along the last axis, broadcasting over leading axes"""
    return np.sqrt(np.sum((np.asarray(first) - np.asarray(second))**2, axis=-1))


class Environment(ABC):
    """
    A deterministic environment whose observation is its full state.

    Instances are not shared between threads; every call to step is a pure function of the
    current state and the action.
    """
    name = ""
    observation_dim = 0
    action_dim = 2
    horizon = 0
    # observation components written as goal_x goal_y
    goal_columns = (0, 1)

    @abstractmethod
    def reset(self) -> np.ndarray:
        """Return to the fixed start state and return its observation"""

    @abstractmethod
    def step(self, action) -> np.ndarray:
        """Apply one clamped action and return the new observation"""

    @abstractmethod
    def observation(self) -> np.ndarray:
        """The observation of the current state"""

    @abstractmethod
    def set_observation(self, observation) -> None:
        """Overwrite the internal state with the one described by an observation"""

    @abstractmethod
    def oracle_distance(self, state, goal):
        """Privileged distance between a state and a goal, used by toplines and evaluation"""

    @abstractmethod
    def sample_eval_goals(self, count: int, rng: np.random.Generator) -> List[np.ndarray]:
        """Draw an evaluation goal set"""

    def room_of_observation(self, observation) -> Optional[int]:  # pylint:disable=unused-argument
        """Room index of an observation, for environments that have rooms"""
        return None

    def random_action(self, rng: np.random.Generator) -> np.ndarray:
        """A uniformly random action in [-1, 1]^action_dim"""
        return rng.uniform(-1.0, 1.0, size=self.action_dim)

    def check_observation(self, observation) -> np.ndarray:
        """
        Ensure the trailing axis matches this environment's observation size

        Returns:
            The observation as a float array
        """
        observation = np.asarray(observation, dtype=np.float64)
        if observation.shape[-1] != self.observation_dim:
            raise ValueError(f"{self.name} observations have {self.observation_dim} components, "
                             f"got {observation.shape[-1]}")
        return observation
