# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
from reachgoal.memory.goal_memory import MEMORY_MODES, GoalMemory, InsertionRecord
from reachgoal.memory.graph import MemoryGraph, all_pairs_hops, build_graph, graph_distance, nearest_node

__all__ = [
    "GoalMemory", "InsertionRecord", "MEMORY_MODES", "MemoryGraph", "all_pairs_hops", "build_graph", "graph_distance",
    "nearest_node"
]
