# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Planar pusher: a disk-shaped hand pushes a disk-shaped puck on a unit table.

Observation: (hand_x, hand_y, puck_x, puck_y). Action: hand displacement direction,
scaled by the maximum hand step.
"""
from typing import List

import numpy as np

from reachgoal.envs.base import Environment, clamp_action, euclidean

HAND_RADIUS = 0.04
PUCK_RADIUS = 0.05
MAX_HAND_STEP = 0.05
HAND_START = (0.5, 0.1)
PUCK_START = (0.5, 0.5)


def hand_distance(state, goal):
    """
    Distance between the hand positions of two pusher observations.

    Not part of the evaluation metric; reported as a diagnostic next to the puck distance.
    """
    state = np.asarray(state, dtype=np.float64)
    goal = np.asarray(goal, dtype=np.float64)
    if state.shape[-1] != PusherEnv.observation_dim or goal.shape[-1] != PusherEnv.observation_dim:
        raise ValueError("hand_distance is only defined for pusher observations")
    return euclidean(state[..., :2], goal[..., :2])


def _contact_normal(start: np.ndarray, motion: np.ndarray, puck: np.ndarray) -> np.ndarray:
    """Unit vector from the hand to the puck at the first moment of contact along the hand's sweep"""
    reach = HAND_RADIUS + PUCK_RADIUS
    offset = start - puck
    a = float(motion @ motion)
    c = float(offset @ offset) - reach**2
    if c > 0.0 and a > 0.0:
        b = 2.0 * float(motion @ offset)
        t = (-b - np.sqrt(max(b * b - 4.0 * a * c, 0.0))) / (2.0 * a)
        normal = puck - (start + min(max(t, 0.0), 1.0) * motion)
    else:
        # disks already overlapping before the move
        normal = puck - (start + motion)
    if a > 0.0 and normal @ motion < 0.0:
        normal = normal - (normal @ motion) / a * motion
    norm = float(np.linalg.norm(normal))
    if norm > 0.0:
        return normal / norm
    norm = float(np.sqrt(a))
    return motion / norm if norm > 0.0 else np.array([0.0, 1.0])


def resolve_push(start: np.ndarray, hand: np.ndarray, puck: np.ndarray) -> np.ndarray:
    """
    Push the puck out of the hand along the contact normal.

    The normal is taken where the hand first touches the puck during its move, so the puck
    never moves against the hand's motion. The puck then slides along that normal until the
    disks no longer overlap, stopping at the table edge.

    Args:
        start: Hand center before its move
        hand: Hand center after its move
        puck: Puck center before resolution

    Returns:
        The new puck center
    """
    reach = HAND_RADIUS + PUCK_RADIUS
    if float(np.linalg.norm(puck - hand)) >= reach:
        return puck
    normal = _contact_normal(start, hand - start, puck)
    away = puck - hand
    along = float(away @ normal)
    slide = -along + np.sqrt(max(along**2 - float(away @ away) + reach**2, 0.0))
    displacement = slide * normal
    limit = 1.0
    for axis in range(2):
        if displacement[axis] > 0.0:
            limit = min(limit, (1.0 - puck[axis]) / displacement[axis])
        elif displacement[axis] < 0.0:
            limit = min(limit, puck[axis] / -displacement[axis])
    return np.clip(puck + max(limit, 0.0) * displacement, 0.0, 1.0)


class PusherEnv(Environment):
    """Two-disk pushing task; only the puck position counts for the oracle distance"""
    name = "pusher"
    observation_dim = 4
    goal_columns = (2, 3)
    action_dim = 2
    horizon = 50

    def __init__(self):
        self._hand = np.array(HAND_START, dtype=np.float64)
        self._puck = np.array(PUCK_START, dtype=np.float64)

    def reset(self) -> np.ndarray:
        self._hand = np.array(HAND_START, dtype=np.float64)
        self._puck = np.array(PUCK_START, dtype=np.float64)
        return self.observation()

    def observation(self) -> np.ndarray:
        return np.concatenate([self._hand, self._puck])

    def set_observation(self, observation) -> None:
        observation = self.check_observation(observation)
        self._hand = np.array(observation[:2], dtype=np.float64)
        self._puck = np.array(observation[2:], dtype=np.float64)

    def step(self, action) -> np.ndarray:
        action = clamp_action(action, self.action_dim)
        previous = self._hand
        self._hand = np.clip(previous + MAX_HAND_STEP * action, 0.0, 1.0)
        self._puck = resolve_push(previous, self._hand, self._puck)
        return self.observation()

    def oracle_distance(self, state, goal):
        state = self.check_observation(state)
        goal = self.check_observation(goal)
        return euclidean(state[..., 2:], goal[..., 2:])

    def sample_eval_goals(self, count: int, rng: np.random.Generator) -> List[np.ndarray]:
        if count < 1:
            raise ValueError(f"Need at least one goal, got {count}")
        return list(rng.uniform(0.0, 1.0, size=(count, self.observation_dim)))
