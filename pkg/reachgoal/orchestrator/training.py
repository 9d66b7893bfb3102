# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
The training loop.

Every episode has a policy phase toward a goal drawn from the memory, then a random walk
continuing from where the policy stopped. The random walk feeds the reachability buffer
and is offered to the memory; the reachability network is retrained every few episodes
and the memory graph is rebuilt whenever the memory or the network changed.
"""
import logging
import os
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from reachgoal.envs import Environment, make_env
from reachgoal.memory.goal_memory import GoalMemory
from reachgoal.memory.graph import MemoryGraph, build_graph, graph_distance, nearest_node
from reachgoal.numcore.checkpoint import save_checkpoint
from reachgoal.numcore.optim import AdamState
from reachgoal.orchestrator.artifacts import (make_checkpoint, write_curve_fragment, write_eval_goals,
                                              write_memory_dump, write_trajectories)
from reachgoal.orchestrator.config import ABLATIONS, DEFAULT_REWARD_CLIP, RunConfig, run_tag
from reachgoal.orchestrator.evaluation import EvalReport, eval_goal_set, evaluate
from reachgoal.policy.replay import Transition
from reachgoal.policy.sac import SACState, actor_sample, replay_push, replay_sample, sac_update
from reachgoal.rnet.buffer import TrajectoryBuffer
from reachgoal.rnet.model import RNetModel, rnet_distance
from reachgoal.rnet.training import rnet_train
from reachgoal.settings import (CHECKPOINT_FILE, CURVE_FILE, EVAL_GOALS_FILE, MEMORY_DUMP_FILE, MEMORY_DUMP_PERCENTS,
                                TRAJECTORY_FILE)

logger = logging.getLogger(__file__)


def compute_reward(mode: str,
                   rnet: Optional[RNetModel],
                   graph: Optional[MemoryGraph],
                   memory: Optional[GoalMemory],
                   env: Environment,
                   state,
                   goal,
                   clip: float = DEFAULT_REWARD_CLIP,
                   goal_node: Optional[int] = None) -> float:
    """
    Reward of reaching `state` while heading for `goal`; higher is closer.

    Args:
        mode: rnet, graph or oracle
        rnet: Reachability snapshot, used by rnet and graph rewards
        graph: Memory graph built from `memory` with `rnet`, used by graph rewards
        memory: Goal memory, used by graph rewards
        env: Environment providing the oracle distance
        state: The observation reached
        goal: The goal observation
        clip: Bound on the magnitude of rnet rewards
        goal_node: Nearest node of the goal, if already known

    Returns:
        clip(rnet_logit(state, goal)), minus the graph distance, or minus the oracle distance
    """
    if mode == "oracle":
        return -float(env.oracle_distance(state, goal))
    if mode == "rnet":
        return -float(np.clip(rnet_distance(rnet, state, goal), -clip, clip))
    if mode == "graph":
        if memory is None or len(memory) == 0:
            raise ValueError("Graph rewards need a non-empty memory")
        if graph is None:
            raise ValueError("Graph rewards need a memory graph")
        if goal_node is None:
            return -graph_distance(graph, memory, rnet, state, goal)
        if graph.node_count != len(memory):
            raise ValueError(f"Graph has {graph.node_count} nodes but the memory has {len(memory)} entries")
        return -float(graph.dist[nearest_node(memory, rnet, state), goal_node])
    raise ValueError(f"Unknown reward mode '{mode}'")


@dataclass
class EpisodeStats:
    """Diagnostics of one episode"""
    goal: Optional[np.ndarray]
    goal_index: Optional[int]
    policy_steps: int
    mean_reward: float
    final_goal_distance: Optional[float]
    sac_updates: int
    # ids of the reachability snapshot and memory graph the rewards were computed with
    rnet_version: int = 0
    graph_version: Optional[int] = None


@dataclass
class EpisodeResult:
    sac: SACState
    transitions: List[Transition]
    random_trajectory: np.ndarray
    stats: EpisodeStats


def run_episode(env: Environment,
                sac: SACState,
                memory: GoalMemory,
                graph: Optional[MemoryGraph],
                rnet: Optional[RNetModel],
                config: RunConfig,
                rng: np.random.Generator,
                eval_goals: Optional[Sequence] = None,
                policy_steps: Optional[int] = None,
                rnet_version: int = 0,
                graph_version: Optional[int] = None) -> EpisodeResult:
    """
    One episode: a policy phase toward a goal, then a random walk.

    The policy phase is skipped while the memory is empty. Every policy step is pushed to
    the replay buffer and followed by one SAC update once the buffer holds a batch.

    Args:
        env: The environment, reset at the start of the episode
        sac: The agent before the episode
        memory: Goal memory to draw the goal from; not modified
        graph: Memory graph, needed for graph rewards
        rnet: Reachability snapshot, needed for rnet and graph rewards
        config: The run configuration
        rng: Source of goals, actions and SAC batches
        eval_goals: Goal set used when config.goal_source is eval
        policy_steps: Length of the policy phase, config.horizon by default
        rnet_version: Id of `rnet`, stamped on the episode statistics
        graph_version: Id of `graph`, stamped on the episode statistics

    Returns:
        The updated agent, the policy transitions, the random trajectory and the statistics
    """
    length = config.horizon if policy_steps is None else policy_steps
    state = env.reset()
    goal, goal_index = None, None
    if config.goal_source == "eval":
        if eval_goals is None or len(eval_goals) == 0:
            raise ValueError("goal_source=eval needs an evaluation goal set")
        goal_index = int(rng.integers(len(eval_goals)))
        goal = np.array(eval_goals[goal_index], dtype=np.float64)
    elif len(memory):
        goal, goal_index = memory.sample_goal(rng)

    transitions = []
    # graph rewards are undefined until the first graph exists
    if goal is not None and not (config.reward_mode == "graph" and graph is None):
        goal_node = nearest_node(memory, rnet, goal) if config.reward_mode == "graph" else None
        for _ in range(length):
            action, _ = actor_sample(sac, state, goal, rng)
            next_state = env.step(action)
            reward = compute_reward(config.reward_mode,
                                    rnet,
                                    graph,
                                    memory,
                                    env,
                                    next_state,
                                    goal,
                                    clip=config.rnet_reward_clip,
                                    goal_node=goal_node)
            transition = Transition(state, goal, action, reward, next_state, False)
            replay_push(sac, transition)
            transitions.append(transition)
            if len(sac.replay) >= sac.config.batch_size:
                sac, _ = sac_update(sac, replay_sample(sac, sac.config.batch_size, rng), rng)
            state = next_state

    trajectory = [state]
    for _ in range(config.random_phase_len - 1):
        state = env.step(env.random_action(rng))
        trajectory.append(state)

    rewards = [transition.reward for transition in transitions]
    stats = EpisodeStats(goal=goal,
                         goal_index=goal_index,
                         policy_steps=len(transitions),
                         mean_reward=float(np.mean(rewards)) if rewards else float("nan"),
                         final_goal_distance=None,
                         sac_updates=sac.updates,
                         rnet_version=rnet_version,
                         graph_version=None if graph is None else graph_version)
    if transitions:
        stats.final_goal_distance = float(env.oracle_distance(transitions[-1].next_state, goal))
    return EpisodeResult(sac, transitions, np.array(trajectory), stats)


def insert_states(memory: GoalMemory, observations, rnet: Optional[RNetModel], env: Environment) -> int:
    """Offer states to the memory through the filter of its mode; returns how many were stored"""
    before = len(memory)
    for observation in observations:
        if memory.mode == "oracle":
            memory.oracle_try_insert(observation, env)
        else:
            memory.try_insert(observation, rnet)
    return len(memory) - before


@dataclass
class TrainResult:  # pylint:disable=too-many-instance-attributes
    """Everything a finished run produced"""
    config: RunConfig
    sac: SACState
    rnet: RNetModel
    memory: GoalMemory
    buffer: TrajectoryBuffer
    eval_goals: np.ndarray
    graph: Optional[MemoryGraph] = None
    curve: List[Tuple[int, float, float]] = field(default_factory=list)
    reports: List[EvalReport] = field(default_factory=list)
    # percentage of the policy-step budget -> (entries, weights)
    memory_dumps: Dict[int, Tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)
    episodes: int = 0
    policy_steps: int = 0
    # bumped on every retrain and every graph build
    rnet_version: int = 0
    graph_version: int = -1


def _snapshot(memory: GoalMemory, observation_dim: int) -> Tuple[np.ndarray, np.ndarray]:
    entries = memory.entries if len(memory) else np.zeros((0, observation_dim))
    return entries, memory.weights


def train(config: RunConfig, out_dir: Optional[str] = None) -> TrainResult:
    """
    Run the full training loop.

    Args:
        config: The run configuration, validated here
        out_dir: If given, the curve fragment, memory dumps, random trajectories, final
                 per-goal distances and checkpoint are written there

    Returns:
        The final state of the run and its evaluation curve
    """
    config.validate()
    env = make_env(config.env)
    rnet_seed, sac_seed, episode_seed, pair_seed = np.random.SeedSequence(config.seed).spawn(4)
    episode_rng = np.random.default_rng(episode_seed)
    pair_rng = np.random.default_rng(pair_seed)

    rnet = RNetModel.create(env.observation_dim, rnet_seed, config.tau_reach)
    rnet_adam = AdamState.create(rnet.num_params, config.rnet_lr)
    result = TrainResult(config=config,
                         sac=SACState.create(env.observation_dim, env.action_dim, config.sac_config(), sac_seed),
                         rnet=rnet,
                         memory=GoalMemory(config.memory_mode, config.tau_memory, config.k_max,
                                           config.oracle_memory_threshold),
                         buffer=TrajectoryBuffer(config.buffer_capacity),
                         eval_goals=eval_goal_set(config, env))
    dump_steps = {percent: config.total_policy_steps * percent // 100 for percent in MEMORY_DUMP_PERCENTS}
    logger.info("Starting %s run with seed %d on %s for %d policy steps", run_tag(config), config.seed, config.env,
                config.total_policy_steps)

    def record_evaluation(step: int):
        report = evaluate(result.sac, env, result.eval_goals, config.horizon, step)
        result.reports.append(report)
        result.curve.append((step, report.mean, report.std))

    def record_memory(policy_steps: int):
        for percent, dump_step in dump_steps.items():
            if percent not in result.memory_dumps and policy_steps >= dump_step:
                result.memory_dumps[percent] = _snapshot(result.memory, env.observation_dim)

    record_memory(0)
    record_evaluation(0)
    next_eval = config.eval_every
    rnet_updates = 0
    while result.policy_steps < config.total_policy_steps:
        budget = min(config.horizon, config.total_policy_steps - result.policy_steps)
        outcome = run_episode(env,
                              result.sac,
                              result.memory,
                              result.graph,
                              result.rnet,
                              config,
                              episode_rng,
                              eval_goals=result.eval_goals,
                              policy_steps=budget,
                              rnet_version=result.rnet_version,
                              graph_version=result.graph_version)
        result.sac = outcome.sac
        result.policy_steps += len(outcome.transitions)
        result.episodes += 1
        result.buffer.add(outcome.random_trajectory)

        grown = 0
        if len(result.memory) == 0:
            result.memory.add(env.reset())
            grown += 1
        grown += insert_states(result.memory, outcome.random_trajectory, result.rnet, env)

        retrained = False
        if config.needs_rnet and result.episodes % config.rnet_retrain_every == 0 and len(result.buffer) >= 2:
            result.rnet, rnet_adam, _ = rnet_train(result.rnet,
                                                   result.buffer,
                                                   config.rnet_steps_per_retrain,
                                                   config.rnet_batch_size,
                                                   rnet_adam,
                                                   pair_rng,
                                                   start_step=rnet_updates)
            rnet_updates += config.rnet_steps_per_retrain
            result.rnet_version += 1
            retrained = True
        if config.reward_mode == "graph" and (grown or retrained or result.graph is None):
            result.graph = build_graph(result.memory, result.rnet, config.tau_graph)
            result.graph_version += 1
            logger.debug("Episode %d: graph %d built with rnet %d", result.episodes, result.graph_version,
                         result.rnet_version)
        if grown or retrained:
            logger.info("Episode %d: memory holds %d entries", result.episodes, len(result.memory))
        logger.debug("Episode %d: %d policy steps, mean reward %s (rnet %d, graph %s), final distance %s, %d stored",
                     result.episodes, outcome.stats.policy_steps, outcome.stats.mean_reward, outcome.stats.rnet_version,
                     outcome.stats.graph_version, outcome.stats.final_goal_distance, grown)

        record_memory(result.policy_steps)
        while next_eval <= result.policy_steps:
            record_evaluation(next_eval)
            next_eval += config.eval_every

    logger.info("Finished %s run with seed %d after %d episodes: final mean distance %.4f", run_tag(config),
                config.seed, result.episodes, result.curve[-1][1])
    if out_dir is not None:
        write_run_artifacts(result, env, out_dir)
    return result


def write_run_artifacts(result: TrainResult, env: Environment, out_dir: str):
    """Write the files of a finished run into out_dir"""
    os.makedirs(out_dir, exist_ok=True)
    write_curve_fragment(os.path.join(out_dir, CURVE_FILE), result.curve)
    for percent, (entries, weights) in sorted(result.memory_dumps.items()):
        write_memory_dump(os.path.join(out_dir, MEMORY_DUMP_FILE.format(percent)), entries, weights,
                          env.observation_dim)
    write_trajectories(os.path.join(out_dir, TRAJECTORY_FILE),
                       [trajectory.observations for trajectory in result.buffer], env.observation_dim)
    final = result.reports[-1]
    write_eval_goals(os.path.join(out_dir, EVAL_GOALS_FILE), final.goals, final.final_distances, env.goal_columns)
    save_checkpoint(os.path.join(out_dir, CHECKPOINT_FILE),
                    make_checkpoint(result.config.env, result.policy_steps, result.sac, result.rnet, result.memory))


def run_ablation(variant: str, config: RunConfig, out_dir: Optional[str] = None) -> TrainResult:
    """
    Train a pusher run with oracle distances replacing the learned reward, the learned
    memory filter, or both.

    Args:
        variant: oracle-reward, oracle-memory or oracle
        config: The base configuration; its reward and memory modes are overridden
        out_dir: Passed to train

    Returns:
        The result of the overridden run
    """
    if variant not in ABLATIONS:
        raise ValueError(f"Unknown ablation '{variant}', expected one of {sorted(ABLATIONS)}")
    if config.env != "pusher":
        raise ValueError(f"Ablations are defined on the pusher, got env '{config.env}'")
    reward_mode, memory_mode = ABLATIONS[variant]
    logger.info("Ablation %s: reward_mode=%s memory_mode=%s", variant, reward_mode, memory_mode)
    return train(replace(config, reward_mode=reward_mode, memory_mode=memory_mode), out_dir)
