# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Tests for the plain-text run artifacts
"""
import os
from tempfile import TemporaryDirectory
from unittest import TestCase

import numpy as np
import numpy.testing as npt

from reachgoal.envs import MazeEnv, PusherEnv
from reachgoal.orchestrator.artifacts import read_table, write_eval_goals, write_trajectories


class TestWriteTrajectories(TestCase):
    """
    Test write_trajectories
    """

    def test_rows_and_blank_separators_only(self):
        """
        Test: The file holds one observation per line and one blank line between trajectories, without a header
        When: a 2-step and a 3-step trajectory are written
        """
        trajectories = [np.array([[0.1, 0.2], [0.3, 0.4]]), np.array([[0.5, 0.6], [0.7, 0.8], [0.9, 1.0]])]
        with TemporaryDirectory() as directory:
            path = os.path.join(directory, "trajectories.txt")
            write_trajectories(path, trajectories, 2)
            with open(path, encoding="utf-8") as dump:
                text = dump.read()
        self.assertEqual(text, "0.1 0.2\n0.3 0.4\n\n0.5 0.6\n0.7 0.8\n0.9 1\n")
        blocks = [np.loadtxt(block.splitlines(), ndmin=2) for block in text.split("\n\n")]
        for block, trajectory in zip(blocks, trajectories):
            npt.assert_array_equal(block, trajectory)

    def test_wrong_width(self):
        """
        Test: ValueError is raised
        When: observations do not have the declared number of components
        """
        with TemporaryDirectory() as directory:
            with self.assertRaises(ValueError):
                write_trajectories(os.path.join(directory, "t.txt"), [np.zeros((3, 5))], 2)


class TestWriteEvalGoals(TestCase):
    """
    Test write_eval_goals
    """

    def test_maze_goal_position(self):
        """
        Test: The goal columns are the first two observation components
        When: maze goals are written with the maze goal columns
        """
        goals = np.array([[0.1, 0.9, 1.0, 0.0, 0.0], [0.8, 0.2, 1.0, 0.0, 0.0]])
        with TemporaryDirectory() as directory:
            path = os.path.join(directory, "eval_goals.txt")
            write_eval_goals(path, goals, [0.5, 0.25], MazeEnv.goal_columns)
            header, rows = read_table(path)
        self.assertEqual(header, "goal_x goal_y final_distance")
        npt.assert_array_equal(rows, [[0.1, 0.9, 0.5], [0.8, 0.2, 0.25]])

    def test_pusher_goal_is_puck(self):
        """
        Test: The goal columns hold the puck position, not the hand
        When: pusher goals are written with the pusher goal columns
        """
        goals = np.array([[0.5, 0.1, 0.3, 0.7], [0.2, 0.2, 0.6, 0.4]])
        with TemporaryDirectory() as directory:
            path = os.path.join(directory, "eval_goals.txt")
            write_eval_goals(path, goals, [0.05, 0.15], PusherEnv.goal_columns)
            _, rows = read_table(path)
        npt.assert_array_equal(rows[:, :2], goals[:, 2:])
        npt.assert_array_equal(rows[:, 2], [0.05, 0.15])
