# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Tests for the trajectory buffer and pair sampling
"""
from unittest import TestCase

import numpy as np
import numpy.testing as npt
from hypothesis import given, settings
import hypothesis.strategies as st
from parameterized import parameterized

from reachgoal.rnet.buffer import TrajectoryBuffer, reachability_label, reachability_labels, sample_pairs

TAU = 3


def make_buffer(count: int = 6, length: int = 20, obs_dim: int = 2, seed: int = 0) -> TrajectoryBuffer:
    rng = np.random.default_rng(seed)
    buffer = TrajectoryBuffer()
    for _ in range(count):
        buffer.add(rng.uniform(size=(length, obs_dim)))
    return buffer


class TestTrajectoryBuffer(TestCase):
    """
    Test TrajectoryBuffer
    """

    def test_fifo_eviction_of_whole_trajectories(self):
        """
        Test: The oldest trajectories are dropped whole and ids are never reused
        When: more steps are added than the capacity holds
        """
        buffer = TrajectoryBuffer(capacity=25)
        ids = [buffer.add(np.zeros((10, 2))) for _ in range(4)]
        self.assertEqual(ids, [0, 1, 2, 3])
        self.assertEqual([trajectory.trajectory_id for trajectory in buffer], [2, 3])
        self.assertEqual(buffer.num_steps, 20)

    @parameterized.expand([(np.zeros((0, 2)), ), (np.zeros(3), ), (np.zeros((30, 2)), )])
    def test_rejects_bad_trajectories(self, observations):
        """
        Test: ValueError is raised
        When: a trajectory is empty, not two-dimensional or longer than the capacity
        """
        with self.assertRaises(ValueError):
            TrajectoryBuffer(capacity=25).add(observations)


class TestReachabilityLabel(TestCase):
    """
    Test reachability_label
    """

    @parameterized.expand([
        (0, 0, 3, 5, 3, 1),
        (0, 1, 3, 3, 3, 0),
        (0, 0, 1, 10, 3, 0),
        (2, 2, 7, 4, 3, 1),
        (2, 2, 7, 3, 3, 0),
    ])
    def test_examples(self, traj_a, traj_b, i, j, tau, expected):
        """
        Test: 1 iff same trajectory and |i - j| <= tau
        When: typical index pairs are labelled
        """
        self.assertEqual(reachability_label(traj_a, traj_b, i, j, tau), expected)

    def test_vectorised_labels_agree_exhaustively(self):
        """
        Test: The vectorised labels equal the scalar rule on every index pair
        When: all pairs of a small three-trajectory buffer are enumerated
        """
        lengths = [4, 9, 12]
        rows = [(a, i, b, j) for a, la in enumerate(lengths) for i in range(la) for b, lb in enumerate(lengths)
                for j in range(lb)]
        labels = reachability_labels(np.array(rows), TAU)
        expected = [1.0 if a == b and -TAU <= i - j <= TAU else 0.0 for a, i, b, j in rows]
        npt.assert_array_equal(labels, expected)


class TestSamplePairs(TestCase):
    """
    Test sample_pairs
    """

    def test_batch_of_256_is_balanced(self):
        """
        Test: 128 positives and 128 negatives, negatives split 64 / 64
        When: a batch of 256 pairs is drawn
        """
        batch = sample_pairs(make_buffer(), 256, np.random.default_rng(0), TAU)
        self.assertEqual(len(batch), 256)
        self.assertEqual(int(batch.labels.sum()), 128)
        negatives = batch.sources[batch.labels == 0]
        same = negatives[negatives[:, 0] == negatives[:, 2]]
        self.assertEqual(len(same), 64)
        self.assertTrue(np.all(np.abs(same[:, 1] - same[:, 3]) > 2 * TAU))

    def test_labels_match_sources(self):
        """
        Test: Every emitted label equals reachability_label of its source indices
        When: a batch is drawn
        """
        buffer = make_buffer()
        batch = sample_pairs(buffer, 101, np.random.default_rng(1), TAU)
        trajectories = {trajectory.trajectory_id: trajectory for trajectory in buffer}
        for (a, i, b, j), label, first, second in zip(batch.sources, batch.labels, batch.first, batch.second):
            self.assertEqual(label, reachability_label(a, b, i, j, TAU))
            npt.assert_array_equal(first, trajectories[a].observations[i])
            npt.assert_array_equal(second, trajectories[b].observations[j])

    @parameterized.expand([(seed, ) for seed in range(50)])
    def test_labels_match_sources_on_random_buffers(self, seed):
        """
        Test: Every label equals reachability_label of its source indices, positives lie within tau_reach and
              negatives come from another trajectory or lie more than tau_reach apart
        When: up to 5 trajectories of up to 30 steps, with random lengths and tau_reach, are sampled
        """
        rng = np.random.default_rng(seed)
        tau = int(rng.integers(1, 6))
        buffer = TrajectoryBuffer()
        for length in rng.integers(1, 31, size=int(rng.integers(1, 6))):
            buffer.add(rng.uniform(size=(length, 3)))
        eligible = [trajectory for trajectory in buffer if len(trajectory) >= 2 * tau + 2]
        if len(eligible) < 2:
            with self.assertRaises(ValueError):
                sample_pairs(buffer, 16, rng, tau)
            return
        batch = sample_pairs(buffer, int(rng.integers(2, 65)), rng, tau)
        trajectories = {trajectory.trajectory_id: trajectory for trajectory in eligible}
        for (a, i, b, j), label, first, second in zip(batch.sources, batch.labels, batch.first, batch.second):
            self.assertEqual(label, reachability_label(a, b, i, j, tau))
            self.assertEqual(label == 1, a == b and abs(i - j) <= tau)
            npt.assert_array_equal(first, trajectories[a].observations[i])
            npt.assert_array_equal(second, trajectories[b].observations[j])

    def test_same_seed_same_batch(self):
        """
        Test: Batches are identical
        When: drawn twice with the same seed
        """
        buffer = make_buffer()
        first = sample_pairs(buffer, 64, np.random.default_rng(5), TAU)
        second = sample_pairs(buffer, 64, np.random.default_rng(5), TAU)
        npt.assert_array_equal(first.sources, second.sources)
        npt.assert_array_equal(first.first, second.first)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=2, max_value=80), st.integers(min_value=0, max_value=1000))
    def test_balance_for_every_batch_size(self, batch_size, seed):
        """
        Test: ceil(n / 2) positives and floor(n / 2) negatives
        When: any batch size >= 2 is drawn
        """
        batch = sample_pairs(make_buffer(count=3, length=2 * TAU + 2), batch_size, np.random.default_rng(seed), TAU)
        self.assertEqual(int(batch.labels.sum()), (batch_size + 1) // 2)
        self.assertEqual(int((batch.labels == 0).sum()), batch_size // 2)

    def test_buffer_too_small(self):
        """
        Test: ValueError is raised
        When: fewer than two trajectories are long enough
        """
        buffer = make_buffer(count=1)
        buffer.add(np.zeros((2 * TAU + 1, 2)))
        with self.assertRaises(ValueError):
            sample_pairs(buffer, 16, np.random.default_rng(0), TAU)

    def test_batch_of_one(self):
        """
        Test: ValueError is raised
        When: a single pair is requested
        """
        with self.assertRaises(ValueError):
            sample_pairs(make_buffer(), 1, np.random.default_rng(0), TAU)
