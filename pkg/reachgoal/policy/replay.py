# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Goal-conditioned transitions and the ring buffer they are replayed from
"""
from dataclasses import dataclass

import numpy as np

DEFAULT_REPLAY_CAPACITY = 1_000_000
INITIAL_ALLOCATION = 1024


@dataclass(frozen=True)
class Transition:
    """One policy step toward a goal"""
    state: np.ndarray
    goal: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray
    done: bool

    def __post_init__(self):
        if not np.isfinite(self.reward):
            raise ValueError(f"Transition reward must be finite, got {self.reward}")
        if np.shape(self.state) != np.shape(self.goal) or np.shape(self.state) != np.shape(self.next_state):
            raise ValueError("State, goal and next state must have the same dimension")


@dataclass(frozen=True)
class TransitionBatch:
    """Column arrays of a batch of transitions"""
    states: np.ndarray
    goals: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray
    dones: np.ndarray

    def __len__(self) -> int:
        return self.rewards.shape[0]

    @classmethod
    def from_transitions(cls, transitions) -> "TransitionBatch":
        return cls(
            states=np.array([t.state for t in transitions], dtype=np.float64),
            goals=np.array([t.goal for t in transitions], dtype=np.float64),
            actions=np.array([t.action for t in transitions], dtype=np.float64),
            rewards=np.array([t.reward for t in transitions], dtype=np.float64),
            next_states=np.array([t.next_state for t in transitions], dtype=np.float64),
            dones=np.array([t.done for t in transitions], dtype=np.float64),
        )


class ReplayBuffer:
    """
    Ring buffer of transitions. Storage grows by doubling until it reaches the capacity,
    after which the oldest transition is overwritten.
    """

    def __init__(self, capacity: int = DEFAULT_REPLAY_CAPACITY):
        if capacity < 1:
            raise ValueError(f"Replay capacity must be positive, got {capacity}")
        self.capacity = capacity
        self._columns = None
        self._next = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def _allocate(self, transition: Transition, rows: int):
        shapes = {
            "states": np.shape(transition.state),
            "goals": np.shape(transition.goal),
            "actions": np.shape(transition.action),
            "rewards": (),
            "next_states": np.shape(transition.next_state),
            "dones": (),
        }
        columns = {name: np.zeros((rows, ) + shape) for name, shape in shapes.items()}
        if self._columns is not None:
            for name, column in self._columns.items():
                columns[name][:column.shape[0]] = column
        self._columns = columns

    def push(self, transition: Transition):
        """Store a transition, overwriting the oldest one when full"""
        allocated = 0 if self._columns is None else self._columns["rewards"].shape[0]
        if self._next >= allocated and allocated < self.capacity:
            self._allocate(transition, min(self.capacity, max(INITIAL_ALLOCATION, 2 * allocated)))
        row = self._next
        self._columns["states"][row] = transition.state
        self._columns["goals"][row] = transition.goal
        self._columns["actions"][row] = transition.action
        self._columns["rewards"][row] = transition.reward
        self._columns["next_states"][row] = transition.next_state
        self._columns["dones"][row] = float(transition.done)
        self._next = (self._next + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample_indices(self, count: int, rng: np.random.Generator) -> np.ndarray:
        if count < 1:
            raise ValueError(f"Sample size must be positive, got {count}")
        if self._size < count:
            raise ValueError(f"Replay buffer holds {self._size} transitions, {count} requested")
        return rng.integers(0, self._size, size=count)

    def sample(self, count: int, rng: np.random.Generator) -> TransitionBatch:
        """Uniform sample with replacement"""
        indices = self.sample_indices(count, rng)
        return TransitionBatch(**{name: column[indices] for name, column in self._columns.items()})

    def transition(self, index: int) -> Transition:
        """The transition stored in a slot, for inspection"""
        if not 0 <= index < self._size:
            raise IndexError(f"Slot {index} is empty")
        columns = self._columns
        return Transition(columns["states"][index], columns["goals"][index], columns["actions"][index],
                          float(columns["rewards"][index]), columns["next_states"][index],
                          bool(columns["dones"][index]))
