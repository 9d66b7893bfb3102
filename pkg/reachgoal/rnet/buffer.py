# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Random-walk trajectory storage and self-supervised pair sampling.

Two observations are labelled reachable when they come from the same trajectory and
are at most tau_reach steps apart. Negatives are drawn half from the same trajectory
with a gap above 2 * tau_reach and half from two different trajectories, leaving the
gaps in (tau_reach, 2 * tau_reach] unsampled.
"""
import logging
from collections import deque
from dataclasses import dataclass
from typing import Deque, Iterator, List

import numpy as np

logger = logging.getLogger(__file__)

DEFAULT_BUFFER_CAPACITY = 200_000


@dataclass(frozen=True)
class Trajectory:
    trajectory_id: int
    observations: np.ndarray

    def __len__(self) -> int:
        return self.observations.shape[0]


class TrajectoryBuffer:
    """
    FIFO store of random-walk trajectories bounded by a total step count.

    Whole trajectories are evicted, oldest first. Ids increase monotonically and are
    never reused.
    """

    def __init__(self, capacity: int = DEFAULT_BUFFER_CAPACITY):
        if capacity < 1:
            raise ValueError(f"Buffer capacity must be positive, got {capacity}")
        self.capacity = capacity
        self._trajectories: Deque[Trajectory] = deque()
        self._next_id = 0
        self._num_steps = 0

    def add(self, observations) -> int:
        """
        Store one trajectory, evicting the oldest ones if the step budget is exceeded.

        Args:
            observations: Array of shape (length, obs_dim), length >= 1

        Returns:
            The id given to the trajectory
        """
        observations = np.array(observations, dtype=np.float64)
        if observations.ndim != 2 or observations.shape[0] == 0:
            raise ValueError(f"A trajectory must be a non-empty (length, obs_dim) array, got {observations.shape}")
        if observations.shape[0] > self.capacity:
            raise ValueError(f"Trajectory of length {observations.shape[0]} exceeds capacity {self.capacity}")
        trajectory = Trajectory(self._next_id, observations)
        self._next_id += 1
        self._trajectories.append(trajectory)
        self._num_steps += len(trajectory)
        while self._num_steps > self.capacity:
            evicted = self._trajectories.popleft()
            self._num_steps -= len(evicted)
            logger.debug("Evicted trajectory %d (%d steps)", evicted.trajectory_id, len(evicted))
        return trajectory.trajectory_id

    @property
    def num_steps(self) -> int:
        return self._num_steps

    @property
    def trajectories(self) -> List[Trajectory]:
        return list(self._trajectories)

    def __len__(self) -> int:
        return len(self._trajectories)

    def __iter__(self) -> Iterator[Trajectory]:
        return iter(list(self._trajectories))


def reachability_label(traj_a: int, traj_b: int, i: int, j: int, tau_reach: int) -> int:
    """1 iff both observations come from the same trajectory and are at most tau_reach steps apart"""
    return int(traj_a == traj_b and abs(i - j) <= tau_reach)


def reachability_labels(sources: np.ndarray, tau_reach: int) -> np.ndarray:
    """Vectorised reachability_label over rows (traj_a, i, traj_b, j)"""
    sources = np.asarray(sources)
    same = sources[:, 0] == sources[:, 2]
    close = np.abs(sources[:, 1] - sources[:, 3]) <= tau_reach
    return (same & close).astype(np.float64)


@dataclass(frozen=True)
class PairBatch:
    """
    Observation pairs with their labels.

    sources holds one row (traj_a, i, traj_b, j) per pair so labels can be recomputed.
    """
    first: np.ndarray
    second: np.ndarray
    labels: np.ndarray
    sources: np.ndarray

    def __len__(self) -> int:
        return self.labels.shape[0]


def _far_pair(length: int, min_gap: int, rng: np.random.Generator):
    """Uniform draw over ordered index pairs of one trajectory with |i - j| >= min_gap"""
    indices = np.arange(length)
    counts = np.maximum(0, indices - min_gap + 1) + np.maximum(0, length - indices - min_gap)
    i = int(rng.choice(length, p=counts / counts.sum()))
    below = max(0, i - min_gap + 1)
    pick = int(rng.integers(counts[i]))
    j = pick if pick < below else i + min_gap + (pick - below)
    return i, j


def sample_pairs(buffer: TrajectoryBuffer, batch_size: int, rng: np.random.Generator, tau_reach: int) -> PairBatch:
    """
    Draw a class-balanced batch of labelled observation pairs.

    Args:
        buffer: The random-walk trajectories
        batch_size: Number of pairs, at least 2
        rng: Source of randomness; identical generators give identical batches
        tau_reach: Reachability threshold in steps

    Returns:
        ceil(batch_size / 2) positives followed by floor(batch_size / 2) negatives, of which
        floor(negatives / 2) come from within one trajectory and the rest from two trajectories
    """
    if batch_size < 2:
        raise ValueError(f"Pair batches need at least 2 pairs, got {batch_size}")
    min_length = 2 * tau_reach + 2
    eligible = [trajectory for trajectory in buffer if len(trajectory) >= min_length]
    if len(eligible) < 2:
        raise ValueError(f"Pair sampling needs at least 2 trajectories of length >= {min_length}, "
                         f"buffer has {len(eligible)}")

    num_positive = (batch_size + 1) // 2
    num_negative = batch_size // 2
    num_same = num_negative // 2
    lengths = np.array([len(trajectory) for trajectory in eligible])

    rows = []
    picks = rng.integers(0, len(eligible), size=num_positive)
    starts = np.floor(rng.random(num_positive) * lengths[picks]).astype(int)
    lows = np.maximum(0, starts - tau_reach)
    highs = np.minimum(lengths[picks] - 1, starts + tau_reach)
    ends = lows + np.floor(rng.random(num_positive) * (highs - lows + 1)).astype(int)
    rows.extend((pick, i, pick, j) for pick, i, j in zip(picks, starts, ends))

    for pick in rng.integers(0, len(eligible), size=num_same):
        i, j = _far_pair(lengths[pick], 2 * tau_reach + 1, rng)
        rows.append((pick, i, pick, j))

    for _ in range(num_negative - num_same):
        first, second = rng.choice(len(eligible), size=2, replace=False)
        rows.append((first, int(rng.integers(lengths[first])), second, int(rng.integers(lengths[second]))))

    first_obs = np.stack([eligible[a].observations[i] for a, i, _, _ in rows])
    second_obs = np.stack([eligible[b].observations[j] for _, _, b, j in rows])
    sources = np.array([(eligible[a].trajectory_id, i, eligible[b].trajectory_id, j) for a, i, b, j in rows],
                       dtype=np.int64)
    return PairBatch(first_obs, second_obs, reachability_labels(sources, tau_reach), sources)
