# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Command-line entry points.

Every command returns its exit code: 0 on success, 2 for configuration or checkpoint
problems and 1 for any other failure.
"""
import functools
import logging
import os
import sys
from typing import Optional

import fire
import numpy as np

from reachgoal.cli.aggregate import write_aggregate
from reachgoal.cli.config_file import load_config, render_config
from reachgoal.cli.gradient_suite import run_gradient_suite
from reachgoal.envs import make_env
from reachgoal.envs.maze import is_free, room_of, sample_free_positions
from reachgoal.exceptions import CheckpointError, ConfigError
from reachgoal.memory.graph import build_graph, nearest_node
from reachgoal.numcore.checkpoint import load_checkpoint
from reachgoal.numcore.gradcheck import GRADCHECK_TOLERANCE
from reachgoal.numcore.pca import pca_2d
from reachgoal.orchestrator.artifacts import (restore_agent, restore_memory, restore_rnet, write_eval_goals,
                                              write_memory_dump, write_table)
from reachgoal.orchestrator.config import run_tag
from reachgoal.orchestrator.evaluation import eval_goal_set, evaluate
from reachgoal.orchestrator.training import compute_reward, run_ablation, train, write_run_artifacts
from reachgoal.rnet.model import embed
from reachgoal.settings import CONFIG_FILE, EVAL_GOALS_FILE, configure_logging

logger = logging.getLogger(__file__)


def exit_code(command):
    """Turn the outcome of a command into its exit code"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            command(*args, **kwargs)
        except (ConfigError, CheckpointError) as err:
            logger.error("%s: %s", command.__name__, err)
            return 2
        except Exception as err:  # pylint:disable=broad-except
            logger.error("%s failed: %s", command.__name__, err)
            return 1
        return 0

    return wrapper


def run_directory(config, out_dir: Optional[str]) -> str:
    """out_dir/<variant>-seed<seed>"""
    return os.path.join(out_dir or ".", f"{run_tag(config)}-seed{config.seed}")


def _write_config(config, run_dir: str):
    with open(os.path.join(run_dir, CONFIG_FILE), "w", encoding="utf-8", newline="\n") as config_file:
        config_file.write(render_config(config))


def _maze_observation(x: float, y: float) -> np.ndarray:
    return np.array([x, y, 1.0, 0.0, 0.0])


def _load_maze_checkpoint(checkpoint: str):
    loaded = load_checkpoint(checkpoint)
    if loaded.attributes["env"] != "maze":
        raise CheckpointError(f"{checkpoint} was trained on '{loaded.attributes['env']}', this command needs maze")
    return loaded


@exit_code
def cmd_train(config_path: str, *overrides):
    """
    Train one run and write its artifacts under out_dir/<variant>-seed<seed>.

    Args:
        config_path: The config file
        overrides: key=value pairs applied on top of the file
    """
    config, out_dir = load_config(config_path, overrides)
    run_dir = run_directory(config, out_dir)
    train(config, run_dir)
    _write_config(config, run_dir)
    logger.info("Run written to %s", run_dir)


@exit_code
def cmd_ablate(variant: str, config_path: str, *overrides):
    """
    Train a pusher run with oracle-reward, oracle-memory or both (oracle).

    Args:
        variant: oracle-reward, oracle-memory or oracle
        config_path: The config file
        overrides: key=value pairs applied on top of the file
    """
    config, out_dir = load_config(config_path, overrides)
    result = run_ablation(variant, config)
    run_dir = run_directory(result.config, out_dir)
    write_run_artifacts(result, make_env(config.env), run_dir)
    _write_config(result.config, run_dir)


@exit_code
def cmd_eval(checkpoint: str, config_path: str, *overrides, output: Optional[str] = None):
    """
    Evaluate a checkpoint on the evaluation goal set and print the report.

    Args:
        checkpoint: The checkpoint file
        config_path: The config the checkpoint was trained with
        overrides: key=value pairs applied on top of the file
        output: Per-goal distances file, next to the checkpoint by default
    """
    config, _ = load_config(config_path, overrides)
    env = make_env(config.env)
    loaded = load_checkpoint(checkpoint)
    if int(loaded.attributes["obs_dim"]) != env.observation_dim:
        raise CheckpointError(f"{checkpoint} has {loaded.attributes['obs_dim']} observation components, "
                              f"{config.env} has {env.observation_dim}")
    sac, _ = restore_agent(loaded, config.env, config.sac_config())
    report = evaluate(sac, env, eval_goal_set(config, env), config.horizon, int(loaded.attributes["step"]))
    for line in report.summary_lines():
        print(line)
    output = output or os.path.join(os.path.dirname(checkpoint), EVAL_GOALS_FILE)
    write_eval_goals(output, report.goals, report.final_distances, env.goal_columns)


@exit_code
def cmd_aggregate(out_path: str, *run_dirs):
    """
    Aggregate run directories named <variant>-seed<n> into one curve file.

    The output path comes first so any number of run directories can follow:
    `reachgoal aggregate OUT_PATH RUN_DIR [RUN_DIR ...]`.

    Args:
        out_path: The curve file to write
        run_dirs: Run directories written by train
    """
    write_aggregate(run_dirs, out_path)


@exit_code
def cmd_dump_memory(checkpoint: str, output: str):
    """Write the memory stored in a checkpoint as `index weight o0 o1 ...` rows"""
    loaded = load_checkpoint(checkpoint)
    write_memory_dump(output, loaded.memory_entries, loaded.memory_weights, int(loaded.attributes["obs_dim"]))


@exit_code
def cmd_dump_embeddings(checkpoint: str, n_points: int, output: str, seed: int = 0):
    """
    Project the embeddings of random free maze positions on their two principal components.

    Args:
        checkpoint: A maze checkpoint
        n_points: Number of positions
        output: File of `x y pc1 pc2 room` rows
        seed: Seed of the positions
    """
    rnet = restore_rnet(_load_maze_checkpoint(checkpoint))
    positions = sample_free_positions(int(n_points), np.random.default_rng(seed))
    observations = np.array([_maze_observation(x, y) for x, y in positions])
    _, projections = pca_2d(embed(rnet, observations))
    rooms = [room_of(position) for position in positions]
    write_table(output, "x y pc1 pc2 room", np.column_stack([positions, projections, rooms]))


@exit_code
def cmd_dump_rewards(checkpoint: str,
                     config_path: str,
                     goal_x: float,
                     goal_y: float,
                     output: str,
                     resolution: int = 20):
    """
    Write the reachability reward and the graph reward toward a fixed maze goal on a grid.

    Args:
        checkpoint: A maze checkpoint with a non-empty memory
        config_path: The config of the run, for the reward clip and tau_graph
        goal_x: Goal position
        goal_y: Goal position
        output: File of `x y rnet_reward graph_reward` rows
        resolution: Grid cells per side; only free cell centres are written
    """
    config, _ = load_config(config_path)
    loaded = _load_maze_checkpoint(checkpoint)
    rnet = restore_rnet(loaded)
    memory = restore_memory(loaded)
    graph = build_graph(memory, rnet, config.tau_graph)
    env = make_env("maze")
    goal = _maze_observation(goal_x, goal_y)
    goal_node = nearest_node(memory, rnet, goal)
    centres = (np.arange(int(resolution)) + 0.5) / int(resolution)
    rows = []
    for x in centres:
        for y in centres:
            if not is_free((x, y)):
                continue
            state = _maze_observation(x, y)
            rows.append((x, y,
                         compute_reward("rnet", rnet, None, None, env, state, goal, clip=config.rnet_reward_clip),
                         compute_reward("graph", rnet, graph, memory, env, state, goal, goal_node=goal_node)))
    write_table(output, "x y rnet_reward graph_reward", rows)


@exit_code
def cmd_gradcheck(draws: int = 20, seed: int = 0, corrupt: Optional[str] = None):
    """
    Check every analytic gradient against central finite differences.

    Args:
        draws: Random draws per loss family
        seed: Seed of the draws
        corrupt: Loss family whose gradient is deliberately scaled, to see the check fail
    """
    errors = run_gradient_suite(int(draws), int(seed), corrupt)
    for name, error in errors.items():
        print(f"{name} {error:.3e}")
    failing = [name for name, error in errors.items() if not error < GRADCHECK_TOLERANCE]
    if failing:
        raise RuntimeError(f"Gradient check failed for {', '.join(failing)}")


COMMANDS = {
    "train": cmd_train,
    "ablate": cmd_ablate,
    "eval": cmd_eval,
    "aggregate": cmd_aggregate,
    "dump-memory": cmd_dump_memory,
    "dump-embeddings": cmd_dump_embeddings,
    "dump-rewards": cmd_dump_rewards,
    "gradcheck": cmd_gradcheck,
}


def _exiting(command):

    @functools.wraps(command)
    def run(*args, **kwargs):
        sys.exit(command(*args, **kwargs))

    return run


def fire_entrypoint():
    """
    Entrypoint into the Fire CLI interface. Used via the console script
    """
    configure_logging()
    fire.Fire({name: _exiting(command) for name, command in COMMANDS.items()})  # pragma: no cover


if __name__ == "__main__":
    fire_entrypoint()  # pragma: no cover
