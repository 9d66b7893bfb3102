# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Four-room maze navigated by a point agent with a heading and a speed.

Observation: (x, y, cos(theta), sin(theta), v). Action: (turn, accelerate).
Rooms: 1 top-left, 2 bottom-left, 3 bottom-right, 4 top-right. Doors join 1-2, 2-3 and 3-4;
the wall between rooms 1 and 4 is solid, so the only way from 1 to 4 goes through 2 and 3.
"""
import math
from typing import List, Optional

import numpy as np

from reachgoal.envs.base import Environment, clamp_action, euclidean

START_POSITION = (0.1, 0.9)
TURN_RATE = 0.3
VELOCITY_DECAY = 0.9
ACCELERATION = 0.02
MAX_SPEED = 0.05
WALL_MARGIN = 1e-3

# (x1, y1, x2, y2)
WALLS = np.array([
    # outer boundary
    [0.0, 0.0, 1.0, 0.0],
    [1.0, 0.0, 1.0, 1.0],
    [1.0, 1.0, 0.0, 1.0],
    [0.0, 1.0, 0.0, 0.0],
    # x = 0.5, door between rooms 2 and 3 at y in [0.2, 0.3]
    [0.5, 0.0, 0.5, 0.2],
    [0.5, 0.3, 0.5, 1.0],
    # y = 0.5, doors 1-2 at x in [0.2, 0.3] and 3-4 at x in [0.7, 0.8]
    [0.0, 0.5, 0.2, 0.5],
    [0.3, 0.5, 0.7, 0.5],
    [0.8, 0.5, 1.0, 0.5],
])

ROOMS = {
    1: ((0.0, 0.5), (0.5, 1.0)),
    2: ((0.0, 0.5), (0.0, 0.5)),
    3: ((0.5, 1.0), (0.0, 0.5)),
    4: ((0.5, 1.0), (0.5, 1.0)),
}


def _cross(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    return first[..., 0] * second[..., 1] - first[..., 1] * second[..., 0]


def first_wall_hit(start, end, walls: np.ndarray = WALLS) -> Optional[float]:
    """
    Find where the motion segment start -> end first touches a wall.

    Args:
        start: Position before the motion
        end: Candidate position after the motion
        walls: Wall segments as rows (x1, y1, x2, y2)

    Returns:
        The fraction t in [0, 1] of the motion at the first contact, or None if the motion is free
    """
    start = np.asarray(start, dtype=np.float64)
    motion = np.asarray(end, dtype=np.float64) - start
    length_sq = float(motion @ motion)
    if length_sq == 0.0:
        return None

    wall_start = walls[:, :2]
    wall_dir = walls[:, 2:] - wall_start
    offset = wall_start - start
    denom = _cross(motion, wall_dir)
    offset_cross_motion = _cross(offset, motion)

    hits = []
    proper = np.abs(denom) > 1e-15
    with np.errstate(divide="ignore", invalid="ignore"):
        t = _cross(offset, wall_dir) / denom
        u = offset_cross_motion / denom
    crossing = proper & (t >= 0.0) & (t <= 1.0) & (u >= 0.0) & (u <= 1.0)
    hits.extend(t[crossing].tolist())

    # walls lying on the line of motion
    collinear = ~proper & (np.abs(offset_cross_motion) <= 1e-15)
    for index in np.flatnonzero(collinear):
        t0 = float(offset[index] @ motion) / length_sq
        t1 = float((walls[index, 2:] - start) @ motion) / length_sq
        low, high = min(t0, t1), max(t0, t1)
        if high >= 0.0 and low <= 1.0:
            hits.append(max(low, 0.0))

    return min(hits) if hits else None


def distance_to_walls(position, walls: np.ndarray = WALLS) -> float:
    """Smallest distance from a point to any wall segment"""
    position = np.asarray(position, dtype=np.float64)
    wall_start = walls[:, :2]
    wall_dir = walls[:, 2:] - wall_start
    along = np.clip(np.sum((position - wall_start) * wall_dir, axis=1) / np.sum(wall_dir**2, axis=1), 0.0, 1.0)
    closest = wall_start + along[:, None] * wall_dir
    return float(np.min(euclidean(closest, position)))


def is_free(position) -> bool:
    """Whether a position is inside the maze and clear of every wall by at least the wall margin"""
    x, y = position
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        return False
    return distance_to_walls(position) >= WALL_MARGIN


def room_of(position) -> int:
    """
    Index of the room containing a position.

    A point belongs to the left rooms iff x < 0.5 and to the top rooms iff y > 0.5, so
    (0.5, 0.5) lies in room 3.

    Args:
        position: (x, y) inside the unit square; further components are ignored

    Returns:
        The room index, 1 to 4
    """
    x, y = float(position[0]), float(position[1])
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError(f"Position ({x}, {y}) is outside the maze")
    if x < 0.5:
        return 1 if y > 0.5 else 2
    return 4 if y > 0.5 else 3


def sample_free_positions(count: int, rng: np.random.Generator) -> np.ndarray:
    """Rejection-sample positions uniformly over the free space"""
    accepted = []
    while len(accepted) < count:
        for candidate in rng.uniform(0.0, 1.0, size=(count, 2)):
            if is_free(candidate):
                accepted.append(candidate)
                if len(accepted) == count:
                    break
    return np.array(accepted)


class MazeEnv(Environment):
    """Point agent with turn-rate and acceleration controls in the four-room maze"""
    name = "maze"
    observation_dim = 5
    action_dim = 2
    horizon = 100

    def __init__(self):
        self._position = np.array(START_POSITION, dtype=np.float64)
        self._theta = 0.0
        self._velocity = 0.0

    def reset(self) -> np.ndarray:
        self._position = np.array(START_POSITION, dtype=np.float64)
        self._theta = 0.0
        self._velocity = 0.0
        return self.observation()

    def observation(self) -> np.ndarray:
        return np.array([
            self._position[0], self._position[1],
            math.cos(self._theta),
            math.sin(self._theta), self._velocity
        ])

    def set_observation(self, observation) -> None:
        observation = self.check_observation(observation)
        self._position = np.array(observation[:2], dtype=np.float64)
        self._theta = math.atan2(observation[3], observation[2])
        self._velocity = float(np.clip(observation[4], -MAX_SPEED, MAX_SPEED))

    def step(self, action) -> np.ndarray:
        turn, accelerate = clamp_action(action, self.action_dim)
        self._theta = math.remainder(self._theta + TURN_RATE * turn, 2.0 * math.pi)
        self._velocity = float(np.clip(VELOCITY_DECAY * self._velocity + ACCELERATION * accelerate, -MAX_SPEED,
                                       MAX_SPEED))
        heading = np.array([math.cos(self._theta), math.sin(self._theta)])
        candidate = self._position + self._velocity * heading

        hit = first_wall_hit(self._position, candidate)
        if hit is not None:
            motion = candidate - self._position
            length = float(np.linalg.norm(motion))
            travel = max(hit * length - WALL_MARGIN, 0.0)
            candidate = self._position + travel * motion / length
            self._velocity = 0.0
        self._position = candidate
        return self.observation()

    def oracle_distance(self, state, goal):
        state = self.check_observation(state)
        goal = self.check_observation(goal)
        return euclidean(state[..., :2], goal[..., :2])

    def sample_eval_goals(self, count: int, rng: np.random.Generator) -> List[np.ndarray]:
        if count < 1:
            raise ValueError(f"Need at least one goal, got {count}")
        return [np.array([x, y, 1.0, 0.0, 0.0]) for x, y in sample_free_positions(count, rng)]

    def room_of_observation(self, observation) -> Optional[int]:
        return room_of(observation[:2])
