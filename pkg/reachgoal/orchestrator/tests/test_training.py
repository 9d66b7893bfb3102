# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Tests for rewards, episodes, the training loop and the oracle ablations
"""
import filecmp
import os
from copy import deepcopy
from dataclasses import replace
from tempfile import TemporaryDirectory
from unittest import TestCase
from unittest.mock import patch

import numpy as np
import numpy.testing as npt
import pytest
from parameterized import parameterized

from reachgoal.envs import MazeEnv, PointEnv
from reachgoal.memory.goal_memory import GoalMemory
from reachgoal.memory.graph import build_graph, nearest_node
from reachgoal.memory.tests.test_goal_memory import bump_model
from reachgoal.numcore.checkpoint import load_checkpoint
from reachgoal.numcore.network import NetParams, NetSpec
from reachgoal.orchestrator.config import RunConfig
from reachgoal.orchestrator.evaluation import evaluate
from reachgoal.orchestrator.training import compute_reward, run_ablation, run_episode, train
from reachgoal.policy.sac import SACState
from reachgoal.rnet.model import RNetModel
from reachgoal.rnet.training import rnet_train
from reachgoal.settings import CHECKPOINT_FILE, CURVE_FILE, EVAL_GOALS_FILE, MEMORY_DUMP_FILE, TRAJECTORY_FILE

TINY_RUN = RunConfig(env="point",
                     total_policy_steps=40,
                     policy_phase_len=10,
                     random_phase_len=12,
                     tau_reach=2,
                     eval_every=20,
                     eval_goal_count=4,
                     rnet_retrain_every=2,
                     rnet_steps_per_retrain=3,
                     rnet_batch_size=8,
                     sac_batch_size=8,
                     sac_hidden_size=8,
                     replay_capacity=1000,
                     buffer_capacity=1000)


def constant_logit_model(logit: float, obs_dim: int = 2) -> RNetModel:
    """RNet whose logit is the same for every pair"""
    comparator = NetParams(NetSpec((2, 1)), np.zeros(3))
    comparator.flat[-1] = logit
    return RNetModel(NetParams(NetSpec((obs_dim, 1)), np.zeros(obs_dim + 1)), comparator, tau_reach=1)


class TestComputeReward(TestCase):
    """
    Test compute_reward
    """

    def test_oracle(self):
        """
        Test: The reward is minus the euclidean distance
        When: the maze oracle is used between (0.1, 0.9) and (0.1, 0.5)
        """
        state = np.array([0.1, 0.9, 1.0, 0.0, 0.0])
        goal = np.array([0.1, 0.5, 1.0, 0.0, 0.0])
        self.assertAlmostEqual(compute_reward("oracle", None, None, None, MazeEnv(), state, goal), -0.4)

    @parameterized.expand([(15.0, 10.0), (-15.0, -10.0), (3.0, 3.0), (0.0, 0.0)])
    def test_rnet_reward_is_clipped_logit(self, logit, expected):
        """
        Test: reward = -clip(rnet_distance) = clip(logit) within [-10, 10]
        When: the network returns a constant logit
        """
        reward = compute_reward("rnet", constant_logit_model(logit), None, None, PointEnv(), [0.2, 0.2], [0.2, 0.2])
        self.assertAlmostEqual(reward, expected)

    def test_graph_reward(self):
        """
        Test: States on the same node get 0 and the path ends get -3, with or without a cached goal node
        When: the memory is a four-node path
        """
        model = bump_model(1.5, 0.9, 0.1)
        memory = GoalMemory(mode="unfiltered")
        for entry in ([0.0], [1.0], [2.0], [3.0]):
            memory.add(entry)
        graph = build_graph(memory, model, 0.5)
        self.assertEqual(compute_reward("graph", model, graph, memory, PointEnv(), [2.0], [2.0]), 0.0)
        self.assertEqual(compute_reward("graph", model, graph, memory, PointEnv(), [0.0], [3.0]), -3.0)
        self.assertEqual(compute_reward("graph", model, graph, memory, PointEnv(), [0.0], [3.0], goal_node=3), -3.0)

    def test_graph_reward_needs_memory(self):
        """
        Test: ValueError is raised
        When: the memory is empty or no graph exists
        """
        model = bump_model(1.5, 0.9, 0.1)
        with self.assertRaises(ValueError):
            compute_reward("graph", model, None, GoalMemory(), PointEnv(), [0.0], [0.0])
        memory = GoalMemory(mode="unfiltered")
        memory.add([0.0])
        with self.assertRaises(ValueError):
            compute_reward("graph", model, None, memory, PointEnv(), [0.0], [0.0])

    def test_unknown_mode(self):
        """
        Test: ValueError is raised
        When: the reward mode is unknown
        """
        with self.assertRaises(ValueError):
            compute_reward("count", None, None, None, PointEnv(), [0.0, 0.0], [0.0, 0.0])


class TestRunEpisode(TestCase):
    """
    Test run_episode
    """

    def setUp(self):
        self.env = PointEnv()
        self.sac = SACState.create(2, 2, TINY_RUN.sac_config(), seed=0)
        self.rnet = RNetModel.create(2, 0, tau_reach=2)

    def test_empty_memory_skips_policy(self):
        """
        Test: No transitions, and a random trajectory of random_phase_len states from the start state
        When: the memory is empty
        """
        outcome = run_episode(self.env, self.sac, GoalMemory(), None, self.rnet, TINY_RUN, np.random.default_rng(0))
        self.assertEqual(outcome.transitions, [])
        self.assertEqual(outcome.random_trajectory.shape, (TINY_RUN.random_phase_len, 2))
        npt.assert_array_equal(outcome.random_trajectory[0], self.env.reset())
        self.assertIsNone(outcome.stats.goal)

    def test_policy_then_random_walk(self):
        """
        Test: The policy phase has policy_phase_len steps toward the drawn goal, the walk continues from where it
              ended and the stored rewards recompute exactly
        When: the memory holds one goal
        """
        memory = GoalMemory(mode="unfiltered")
        memory.add([0.9, 0.9])
        outcome = run_episode(self.env, self.sac, memory, None, self.rnet, TINY_RUN, np.random.default_rng(1))
        self.assertEqual(len(outcome.transitions), TINY_RUN.policy_phase_len)
        npt.assert_array_equal(outcome.random_trajectory[0], outcome.transitions[-1].next_state)
        for previous, current in zip(outcome.transitions, outcome.transitions[1:]):
            npt.assert_array_equal(previous.next_state, current.state)
        for transition in outcome.transitions:
            npt.assert_array_equal(transition.goal, [0.9, 0.9])
            self.assertFalse(transition.done)
            self.assertEqual(transition.reward,
                             compute_reward("rnet", self.rnet, None, memory, self.env, transition.next_state,
                                            transition.goal))
        self.assertEqual(len(self.sac.replay), TINY_RUN.policy_phase_len)
        # updates start once the replay buffer holds a batch
        self.assertEqual(outcome.sac.updates, TINY_RUN.policy_phase_len - TINY_RUN.sac_batch_size + 1)

    def test_truncated_policy_phase(self):
        """
        Test: The policy phase stops after the given number of steps
        When: run_episode is given a smaller budget
        """
        memory = GoalMemory(mode="unfiltered")
        memory.add([0.1, 0.1])
        outcome = run_episode(self.env,
                              self.sac,
                              memory,
                              None,
                              self.rnet,
                              TINY_RUN,
                              np.random.default_rng(2),
                              policy_steps=3)
        self.assertEqual(outcome.stats.policy_steps, 3)

    def test_eval_goal_source(self):
        """
        Test: Goals come from the evaluation set even with an empty memory
        When: goal_source is eval
        """
        config = replace(TINY_RUN, goal_source="eval", reward_mode="oracle")
        goals = np.array([[0.2, 0.8], [0.7, 0.3]])
        outcome = run_episode(self.env, self.sac, GoalMemory(), None, None, config, np.random.default_rng(3),
                              eval_goals=goals)
        self.assertEqual(len(outcome.transitions), config.policy_phase_len)
        npt.assert_array_equal(outcome.stats.goal, goals[outcome.stats.goal_index])
        with self.assertRaises(ValueError):
            run_episode(self.env, self.sac, GoalMemory(), None, None, config, np.random.default_rng(3))


class TestTrain(TestCase):
    """
    Test train on a tiny point-arena run
    """

    def test_curve_and_dumps(self):
        """
        Test: One curve row per evaluation including step 0, and memory dumps that never shrink
        When: a tiny run finishes
        """
        result = train(TINY_RUN)
        steps = [row[0] for row in result.curve]
        self.assertEqual(steps, [0, 20, 40])
        self.assertEqual(len(result.curve), TINY_RUN.total_policy_steps // TINY_RUN.eval_every + 1)
        self.assertEqual(result.policy_steps, TINY_RUN.total_policy_steps)
        self.assertEqual(sorted(result.memory_dumps), [0, 20, 100])
        sizes = [result.memory_dumps[percent][0].shape[0] for percent in (0, 20, 100)]
        self.assertEqual(sizes[0], 0)
        self.assertEqual(sizes, sorted(sizes))
        self.assertEqual(sizes[-1], len(result.memory))
        npt.assert_array_equal(result.memory.entries[0], PointEnv().reset())
        self.assertTrue(all(row[1] >= 0.0 and row[2] >= 0.0 for row in result.curve))

    def test_graph_run(self):
        """
        Test: The final graph covers the whole memory
        When: a tiny run uses graph rewards
        """
        result = train(replace(TINY_RUN, reward_mode="graph"))
        self.assertEqual(result.graph.node_count, len(result.memory))

    def test_rewards_recompute_from_stamped_snapshots(self):
        """
        Test: Each episode names the network and graph its rewards came from, and recomputing every reward from
              those snapshots gives it back bit-exactly
        When: a tiny graph-reward run retrains the network and rebuilds the graph several times
        """
        episodes = []

        def recording(env, sac, memory, graph, rnet, *args, **kwargs):
            outcome = run_episode(env, sac, memory, graph, rnet, *args, **kwargs)
            episodes.append((deepcopy(memory, {id(rnet): rnet}), graph, rnet, outcome))
            return outcome

        with patch("reachgoal.orchestrator.training.run_episode", side_effect=recording):
            config = replace(TINY_RUN, reward_mode="graph", total_policy_steps=80)
            result = train(config)
        rnets, graphs = {}, {}
        for _, graph, rnet, outcome in episodes:
            self.assertIs(rnets.setdefault(outcome.stats.rnet_version, rnet), rnet)
            if outcome.stats.graph_version is not None:
                self.assertIs(graphs.setdefault(outcome.stats.graph_version, graph), graph)
        self.assertEqual(len(set(map(id, rnets.values()))), len(rnets))
        self.assertEqual(len(set(map(id, graphs.values()))), len(graphs))
        self.assertGreaterEqual(len(rnets), 2)
        self.assertGreaterEqual(len(graphs), 2)
        self.assertLessEqual(max(graphs), result.graph_version)

        env = PointEnv()
        checked = 0
        for memory, _, _, outcome in episodes:
            if not outcome.transitions:
                continue
            rnet = rnets[outcome.stats.rnet_version]
            graph = graphs[outcome.stats.graph_version]
            goal_node = nearest_node(memory, rnet, outcome.stats.goal)
            for transition in outcome.transitions:
                self.assertEqual(
                    compute_reward("graph", rnet, graph, memory, env, transition.next_state, transition.goal,
                                   clip=config.rnet_reward_clip, goal_node=goal_node), transition.reward)
                checked += 1
        self.assertEqual(checked, result.policy_steps)

    def test_identical_runs_write_identical_files(self):
        """
        Test: Curve fragments, memory dumps, trajectories and per-goal files are byte-identical
        When: the same configuration is trained twice
        """
        with TemporaryDirectory() as first, TemporaryDirectory() as second:
            train(TINY_RUN, first)
            train(TINY_RUN, second)
            names = [CURVE_FILE, TRAJECTORY_FILE, EVAL_GOALS_FILE] + [MEMORY_DUMP_FILE.format(p) for p in (0, 20, 100)]
            for name in names:
                self.assertTrue(filecmp.cmp(os.path.join(first, name), os.path.join(second, name), shallow=False),
                                name)
            checkpoint = load_checkpoint(os.path.join(first, CHECKPOINT_FILE))
            self.assertEqual(checkpoint.attributes["env"], "point")
            self.assertEqual(checkpoint.attributes["step"], TINY_RUN.total_policy_steps)
            with open(os.path.join(first, CURVE_FILE), encoding="utf-8") as curve:
                self.assertEqual(curve.readline(), "step mean std\n")

    def test_different_seeds_differ(self):
        """
        Test: The curves differ
        When: two seeds are trained
        """
        first = train(TINY_RUN)
        second = train(replace(TINY_RUN, seed=1))
        self.assertNotEqual(first.curve[1:], second.curve[1:])

    def test_invalid_config(self):
        """
        Test: ValueError is raised before anything runs
        When: the configuration is invalid
        """
        with self.assertRaises(ValueError):
            train(replace(TINY_RUN, random_phase_len=3))


class TestRunAblation(TestCase):
    """
    Test run_ablation on a tiny pusher run
    """

    def setUp(self):
        self.config = replace(TINY_RUN, env="pusher")

    def test_oracle_never_queries_rnet(self):
        """
        Test: Neither rewards, insertions nor training touch the reachability network
        When: the oracle variant runs
        """
        with patch("reachgoal.orchestrator.training.rnet_distance") as distance, \
                patch("reachgoal.orchestrator.training.rnet_train") as training, \
                patch.object(GoalMemory, "scores_against") as scores:
            result = run_ablation("oracle", self.config)
        self.assertEqual(distance.call_count, 0)
        self.assertEqual(training.call_count, 0)
        self.assertEqual(scores.call_count, 0)
        self.assertEqual(result.config.reward_mode, "oracle")
        self.assertEqual(result.config.memory_mode, "oracle")

    def test_oracle_memory_trains_rnet(self):
        """
        Test: The reachability network is still trained and queried for rewards
        When: the oracle-memory variant runs
        """
        with patch("reachgoal.orchestrator.training.rnet_train", wraps=rnet_train) as training, \
                patch.object(GoalMemory, "try_insert") as insert:
            result = run_ablation("oracle-memory", self.config)
        self.assertGreater(training.call_count, 0)
        self.assertEqual(insert.call_count, 0)
        self.assertEqual(result.config.reward_mode, "rnet")

    def test_oracle_reward_keeps_learned_filter(self):
        """
        Test: The reward is the oracle and the memory keeps its learned filter
        When: the oracle-reward variant runs
        """
        with patch("reachgoal.orchestrator.training.rnet_distance") as distance:
            result = run_ablation("oracle-reward", self.config)
        self.assertEqual(distance.call_count, 0)
        self.assertEqual(result.config.memory_mode, "filtered")

    def test_invalid(self):
        """
        Test: ValueError is raised
        When: the variant is unknown or the environment is not the pusher
        """
        with self.assertRaises(ValueError):
            run_ablation("oracle-graph", self.config)
        with self.assertRaises(ValueError):
            run_ablation("oracle", TINY_RUN)


@pytest.mark.acceptance
class TestPointArena(TestCase):
    """
    Desk-scale check that the policy learner reaches a fixed goal in the open arena
    """

    @parameterized.expand([(0, ), (1, ), (2, )])
    def test_reaches_fixed_goal(self, seed):
        """
        Test: The deterministic policy ends within 0.1 of the goal
        When: 50k policy steps are trained with the oracle reward toward (0.8, 0.2)
        """
        env = PointEnv()
        config = RunConfig(env="point", reward_mode="oracle", memory_mode="unfiltered", seed=seed)
        memory = GoalMemory(mode="unfiltered")
        memory.add([0.8, 0.2])
        sac = SACState.create(2, 2, config.sac_config(), seed=seed)
        rng = np.random.default_rng(seed)
        for _ in range(50_000 // config.horizon):
            sac = run_episode(env, sac, memory, None, None, config, rng).sac
        report = evaluate(sac, env, [[0.8, 0.2]], config.horizon)
        self.assertLess(report.mean, 0.1)
