# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Curated set of goal observations.

Modes:
    filtered:   a state is admitted iff its score against every stored entry is below tau_memory
    weighted:   states within tau_memory of an anchor join that anchor's area (up to k_max members);
                members of an area of size k are sampled with weight 1/k each
    oracle:     admission by the environment's oracle distance, see oracle_try_insert
    unfiltered: every offered state is admitted
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from reachgoal.envs.base import Environment
from reachgoal.numcore.losses import sigmoid
from reachgoal.rnet.model import RNetModel, embed, logits_from_embeddings

logger = logging.getLogger(__file__)

MEMORY_MODES = ("filtered", "weighted", "oracle", "unfiltered")
DEFAULT_TAU_MEMORY = 0.5
DEFAULT_K_MAX = 5
DEFAULT_ORACLE_THRESHOLD = 0.0075


@dataclass(frozen=True)
class InsertionRecord:
    """One offered state, whether it was admitted, and the memory size when it was offered"""
    observation: np.ndarray
    accepted: bool
    memory_size: int


class GoalMemory:
    """
    Goal memory with its insertion filter and sampling weights.

    Entries are never removed, so the memory only grows during a run. Entry embeddings
    are cached per RNet snapshot.
    """

    def __init__(self,
                 mode: str = "filtered",
                 tau_memory: float = DEFAULT_TAU_MEMORY,
                 k_max: int = DEFAULT_K_MAX,
                 oracle_threshold: float = DEFAULT_ORACLE_THRESHOLD):
        if mode not in MEMORY_MODES:
            raise ValueError(f"Unknown memory mode '{mode}', expected one of {MEMORY_MODES}")
        if not 0.0 < tau_memory < 1.0:
            raise ValueError(f"tau_memory must lie in (0, 1), got {tau_memory}")
        if k_max < 1:
            raise ValueError(f"k_max must be at least 1, got {k_max}")
        self.mode = mode
        self.tau_memory = tau_memory
        self.k_max = k_max
        self.oracle_threshold = oracle_threshold
        self._entries: List[np.ndarray] = []
        self._weights: List[float] = []
        # weighted mode: entry index of each anchor -> entry indices of its area
        self._areas: Dict[int, List[int]] = {}
        self.insertion_log: List[InsertionRecord] = []
        self._cache_model: Optional[RNetModel] = None
        self._cache: np.ndarray = np.zeros((0, 0))

    @classmethod
    def restore(cls, entries, weights, mode: str = "filtered", **kwargs) -> "GoalMemory":
        """Rebuild a memory from stored entries and weights; every restored entry is its own area"""
        entries = np.asarray(entries, dtype=np.float64)
        weights = np.asarray(weights, dtype=np.float64)
        if entries.shape[0] != weights.shape[0]:
            raise ValueError(f"{entries.shape[0]} entries but {weights.shape[0]} weights")
        memory = cls(mode=mode, **kwargs)
        for index, (entry, weight) in enumerate(zip(entries, weights)):
            memory._append(entry, float(weight))
            memory._areas[index] = [index]
        return memory

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def entries(self) -> np.ndarray:
        return np.array(self._entries)

    @property
    def weights(self) -> np.ndarray:
        return np.array(self._weights)

    @property
    def area_sizes(self) -> Dict[int, int]:
        return {anchor: len(members) for anchor, members in self._areas.items()}

    def _append(self, observation: np.ndarray, weight: float) -> int:
        self._entries.append(np.array(observation, dtype=np.float64))
        self._weights.append(weight)
        return len(self._entries) - 1

    def _record(self, observation, accepted: bool, size: int) -> bool:
        self.insertion_log.append(InsertionRecord(np.array(observation, dtype=np.float64), accepted, size))
        return accepted

    def entry_embeddings(self, model: RNetModel) -> np.ndarray:
        """Embeddings of all entries under a model snapshot, computed once per snapshot and extended on growth"""
        if self._cache_model is not model:
            self._cache_model = model
            self._cache = np.zeros((0, model.embedding.spec.output_size))
        if self._cache.shape[0] < len(self._entries):
            fresh = embed(model, np.array(self._entries[self._cache.shape[0]:]))
            self._cache = np.concatenate([self._cache, np.atleast_2d(fresh)])
        return self._cache

    def scores_against(self, model: RNetModel, observation, indices=None) -> np.ndarray:
        """rnet_score(observation, m) for every entry m, or for the given entry indices"""
        embeddings = self.entry_embeddings(model)
        if indices is not None:
            embeddings = embeddings[indices]
        query = embed(model, observation)
        return sigmoid(logits_from_embeddings(model, query, embeddings))

    def add(self, observation) -> int:
        """Admit a state unconditionally, as a new area in weighted mode. Used to seed the memory."""
        index = self._append(observation, 1.0)
        self._areas[index] = [index]
        self._record(observation, True, index)
        return index

    def try_insert(self, observation, model: RNetModel) -> bool:
        """
        Offer a state to the memory.

        Args:
            observation: The candidate goal
            model: RNet snapshot used for the filter

        Returns:
            Whether the state was stored
        """
        size = len(self._entries)
        if self.mode == "oracle":
            raise ValueError("An oracle memory admits states through oracle_try_insert")
        if self.mode == "unfiltered" or size == 0:
            self.add(observation)
            return True

        if self.mode == "filtered":
            accepted = bool(np.all(self.scores_against(model, observation) < self.tau_memory))
            if accepted:
                self._append(observation, 1.0)
            return self._record(observation, accepted, size)

        anchors = sorted(self._areas)
        scores = self.scores_against(model, observation, anchors)
        best = int(np.argmax(scores))
        if scores[best] < self.tau_memory:
            index = self._append(observation, 1.0)
            self._areas[index] = [index]
            return self._record(observation, True, size)
        members = self._areas[anchors[best]]
        if len(members) >= self.k_max:
            return self._record(observation, False, size)
        members.append(self._append(observation, 1.0))
        for member in members:
            self._weights[member] = 1.0 / len(members)
        return self._record(observation, True, size)

    def oracle_try_insert(self, observation, env: Environment) -> bool:
        """Admit a state iff its oracle distance to every entry exceeds the oracle threshold"""
        size = len(self._entries)
        if size:
            distances = env.oracle_distance(np.array(self._entries), np.asarray(observation, dtype=np.float64))
            accepted = bool(np.all(distances > self.oracle_threshold))
        else:
            accepted = True
        if accepted:
            index = self._append(observation, 1.0)
            self._areas[index] = [index]
        return self._record(observation, accepted, size)

    def sample_goal(self, rng: np.random.Generator) -> Tuple[np.ndarray, int]:
        """
        Draw an entry with probability proportional to its weight.

        Returns:
            A copy of the goal and its entry index
        """
        if not self._entries:
            raise ValueError("Cannot sample a goal from an empty memory")
        weights = np.array(self._weights)
        index = int(rng.choice(len(weights), p=weights / weights.sum()))
        return self._entries[index].copy(), index
