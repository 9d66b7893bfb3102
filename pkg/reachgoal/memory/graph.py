# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Unweighted graph over memory entries and hop-count distances between states.

Two entries are joined when the larger of their two directed scores exceeds tau_graph.
Hop counts come from a level-synchronous breadth-first search from every node;
unreachable pairs get the node count, which exceeds every real path length.
"""
import logging
from dataclasses import dataclass

import numpy as np

from reachgoal.memory.goal_memory import GoalMemory
from reachgoal.numcore.losses import sigmoid
from reachgoal.rnet.model import RNetModel, pairwise_logits

logger = logging.getLogger(__file__)

DEFAULT_TAU_GRAPH = 0.5
SCORE_CHUNK_ROWS = 128


def score_table(model: RNetModel, embeddings: np.ndarray) -> np.ndarray:
    """Directed scores S[a, b] = sigmoid(f(e_a || e_b)), computed a block of rows at a time"""
    rows = [
        sigmoid(pairwise_logits(model, embeddings[start:start + SCORE_CHUNK_ROWS], embeddings))
        for start in range(0, embeddings.shape[0], SCORE_CHUNK_ROWS)
    ]
    return np.concatenate(rows)


def _neighbours(indptr: np.ndarray, indices: np.ndarray, frontier: np.ndarray) -> np.ndarray:
    starts = indptr[frontier]
    counts = indptr[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    # position of every neighbour slot in the concatenated adjacency lists of the frontier
    offsets = np.repeat(starts - np.cumsum(counts) + counts, counts) + np.arange(total)
    return indices[offsets]


def _csr(adjacency: np.ndarray):
    adjacency = np.asarray(adjacency, dtype=bool)
    indptr = np.concatenate([[0], np.cumsum(adjacency.sum(axis=1))]).astype(np.int64)
    return indptr, np.nonzero(adjacency)[1]


def _bfs(indptr: np.ndarray, indices: np.ndarray, source: int) -> np.ndarray:
    count = indptr.shape[0] - 1
    hops = np.full(count, count, dtype=np.int64)
    hops[source] = 0
    frontier = np.array([source])
    level = 0
    while frontier.size:
        level += 1
        candidates = np.unique(_neighbours(indptr, indices, frontier))
        frontier = candidates[hops[candidates] == count]
        hops[frontier] = level
    return hops


def bfs_hops(adjacency: np.ndarray, source: int) -> np.ndarray:
    """
    Hop counts from one node of an unweighted graph.

    Args:
        adjacency: Symmetric boolean matrix without self loops
        source: Start node

    Returns:
        Distances to every node; unreachable nodes get the node count
    """
    indptr, indices = _csr(adjacency)
    return _bfs(indptr, indices, source)


def all_pairs_hops(adjacency: np.ndarray) -> np.ndarray:
    """Hop-count table from a breadth-first search out of every node"""
    indptr, indices = _csr(adjacency)
    count = indptr.shape[0] - 1
    table = np.zeros((count, count), dtype=np.int64)
    for source in range(count):
        table[source] = _bfs(indptr, indices, source)
    return table


@dataclass(frozen=True)
class MemoryGraph:
    """Adjacency and hop distances of a memory under one RNet snapshot"""
    adjacency: np.ndarray
    dist: np.ndarray
    model: RNetModel
    tau_graph: float

    @property
    def node_count(self) -> int:
        return self.adjacency.shape[0]

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency, 1)))

    @property
    def is_connected(self) -> bool:
        return bool(np.all(self.dist < self.node_count)) if self.node_count else True


def build_graph(memory: GoalMemory, model: RNetModel, tau_graph: float = DEFAULT_TAU_GRAPH) -> MemoryGraph:
    """
    Connect memory entries with high reachability and compute all hop distances.

    Args:
        memory: A non-empty goal memory
        model: RNet snapshot scoring the entry pairs
        tau_graph: Score above which two entries are joined

    Returns:
        The graph over the current entries
    """
    if len(memory) == 0:
        raise ValueError("Cannot build a graph over an empty memory")
    scores = score_table(model, memory.entry_embeddings(model))
    adjacency = np.maximum(scores, scores.T) > tau_graph
    np.fill_diagonal(adjacency, False)
    graph = MemoryGraph(adjacency, all_pairs_hops(adjacency), model, tau_graph)
    logger.info("Memory graph: %d nodes, %d edges", graph.node_count, graph.edge_count)
    if not graph.is_connected:
        logger.warning("Memory graph with %d nodes is disconnected", graph.node_count)
    return graph


def nearest_node(memory: GoalMemory, model: RNetModel, observation) -> int:
    """Entry index maximising rnet_score(observation, m); the lowest index wins ties"""
    if len(memory) == 0:
        raise ValueError("Cannot find the nearest node of an empty memory")
    return int(np.argmax(memory.scores_against(model, observation)))


def graph_distance(graph: MemoryGraph, memory: GoalMemory, model: RNetModel, state, goal) -> float:
    """
    Hop count between the nearest nodes of a state and a goal.

    Returns:
        The shortest path length, or the node count if the two nodes are disconnected
    """
    if graph.node_count != len(memory):
        raise ValueError(f"Graph has {graph.node_count} nodes but the memory has {len(memory)} entries")
    return float(graph.dist[nearest_node(memory, model, state), nearest_node(memory, model, goal)])
