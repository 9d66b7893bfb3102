# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Plain-text artifacts of a run and conversion between live agents and checkpoints.

Text files are whitespace-separated with LF line endings and `%.10g` numbers, so identical
runs produce byte-identical files. Every table starts with a header row; the trajectory dump
has none.
"""
import logging
from typing import Iterable, Sequence, Tuple

import numpy as np

from reachgoal.exceptions import CheckpointError
from reachgoal.memory.goal_memory import GoalMemory
from reachgoal.numcore.checkpoint import Checkpoint
from reachgoal.policy.sac import SACConfig, SACState
from reachgoal.rnet.model import RNetModel

logger = logging.getLogger(__file__)

NUMBER_FORMAT = "%.10g"
SAC_NETWORKS = ("actor", "critic1", "critic2", "target1", "target2")


def write_table(path: str, header: str, rows) -> None:
    """Write a numeric table with a header row"""
    rows = np.asarray(rows, dtype=np.float64)
    rows = rows.reshape(-1, len(header.split()))
    with open(path, "w", encoding="utf-8", newline="\n") as table_file:
        np.savetxt(table_file, rows, fmt=NUMBER_FORMAT, header=header, comments="")
    logger.info("Wrote %s", path)


def read_table(path: str) -> Tuple[str, np.ndarray]:
    """Read a table written by write_table; returns the header and the rows"""
    with open(path, encoding="utf-8") as table_file:
        header = table_file.readline().strip()
        rows = np.loadtxt(table_file, ndmin=2)
    return header, rows.reshape(-1, len(header.split()))


def observation_header(observation_dim: int) -> str:
    return " ".join(f"o{index}" for index in range(observation_dim))


def write_curve_fragment(path: str, rows: Iterable[Tuple[int, float, float]]) -> None:
    """`step mean std` rows of one run"""
    write_table(path, "step mean std", list(rows))


def write_memory_dump(path: str, entries: np.ndarray, weights: np.ndarray, observation_dim: int) -> None:
    """`index weight o0 o1 ...` rows, one per memory entry"""
    entries = np.asarray(entries, dtype=np.float64).reshape(-1, observation_dim)
    weights = np.asarray(weights, dtype=np.float64).reshape(-1, 1)
    rows = np.hstack([np.arange(entries.shape[0]).reshape(-1, 1), weights, entries])
    write_table(path, f"index weight {observation_header(observation_dim)}", rows)


def write_trajectories(path: str, trajectories: Sequence[np.ndarray], observation_dim: int) -> None:
    """One observation per line, a blank line between trajectories, no header row"""
    with open(path, "w", encoding="utf-8", newline="\n") as dump:
        for index, observations in enumerate(trajectories):
            if index:
                dump.write("\n")
            np.savetxt(dump, np.asarray(observations, dtype=np.float64).reshape(-1, observation_dim), fmt=NUMBER_FORMAT)
    logger.info("Wrote %s", path)


def write_eval_goals(path: str, goals: np.ndarray, final_distances: np.ndarray, goal_columns=(0, 1)) -> None:
    """
    `goal_x goal_y final_distance` rows in goal-index order.

    goal_columns picks the observation components giving the goal position, the puck for the pusher.
    """
    goals = np.asarray(goals, dtype=np.float64)
    x_column, y_column = goal_columns
    write_table(path, "goal_x goal_y final_distance",
                np.column_stack([goals[:, x_column], goals[:, y_column], final_distances]))


def make_checkpoint(env_name: str, step: int, sac: SACState, rnet: RNetModel, memory: GoalMemory) -> Checkpoint:
    """Collect everything needed to evaluate or inspect a run"""
    networks = {name: getattr(sac, name) for name in SAC_NETWORKS}
    networks["embedding"] = rnet.embedding
    networks["comparator"] = rnet.comparator
    attributes = {
        "env": env_name,
        "obs_dim": sac.obs_dim,
        "action_dim": sac.action_dim,
        "tau_reach": rnet.tau_reach,
        "log_temperature": sac.log_temperature,
        "step": step,
    }
    entries = memory.entries if len(memory) else np.zeros((0, sac.obs_dim))
    return Checkpoint(attributes, networks, entries, memory.weights)


def restore_agent(checkpoint: Checkpoint, env_name: str, sac_config: SACConfig) -> Tuple[SACState, RNetModel]:
    """
    Rebuild the agent and the reachability network stored in a checkpoint.

    Raises:
        CheckpointError: if the checkpoint belongs to another environment or lacks a network
    """
    attributes = checkpoint.attributes
    if attributes["env"] != env_name:
        raise CheckpointError(f"Checkpoint was trained on '{attributes['env']}', not '{env_name}'")
    missing = [name for name in SAC_NETWORKS + ("embedding", "comparator") if name not in checkpoint.networks]
    if missing:
        raise CheckpointError(f"Checkpoint is missing networks {missing}")
    obs_dim = int(attributes["obs_dim"])
    action_dim = int(attributes["action_dim"])
    sac = SACState.create(obs_dim, action_dim, sac_config, seed=0)
    if checkpoint.networks["actor"].spec != sac.actor.spec or checkpoint.networks["critic1"].spec != sac.critic1.spec:
        raise CheckpointError(f"Checkpoint networks {checkpoint.networks['actor'].spec.layer_sizes} do not match "
                              f"the configured agent {sac.actor.spec.layer_sizes}")
    for name in SAC_NETWORKS:
        setattr(sac, name, checkpoint.networks[name])
    sac.log_temperature = float(attributes["log_temperature"])
    return sac, restore_rnet(checkpoint)


def restore_rnet(checkpoint: Checkpoint) -> RNetModel:
    """The reachability network stored in a checkpoint"""
    try:
        rnet = RNetModel(checkpoint.networks["embedding"], checkpoint.networks["comparator"],
                         int(checkpoint.attributes["tau_reach"]))
    except (KeyError, ValueError) as err:
        raise CheckpointError(f"Checkpoint reachability network is unusable: {err}") from err
    if rnet.obs_dim != int(checkpoint.attributes["obs_dim"]):
        raise CheckpointError(f"Checkpoint reachability network expects {rnet.obs_dim} inputs, "
                              f"observations have {checkpoint.attributes['obs_dim']}")
    return rnet


def restore_memory(checkpoint: Checkpoint) -> GoalMemory:
    return GoalMemory.restore(checkpoint.memory_entries, checkpoint.memory_weights)
