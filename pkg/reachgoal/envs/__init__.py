# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
from reachgoal.envs.base import Environment
from reachgoal.envs.maze import MazeEnv, room_of
from reachgoal.envs.point import PointEnv
from reachgoal.envs.pusher import PusherEnv, hand_distance

ENVIRONMENTS = {
    MazeEnv.name: MazeEnv,
    PusherEnv.name: PusherEnv,
    PointEnv.name: PointEnv,
}


def make_env(name: str) -> Environment:
    """Build a fresh environment instance from its config name"""
    try:
        return ENVIRONMENTS[name]()
    except KeyError as err:
        raise ValueError(f"Unknown environment '{name}', expected one of {sorted(ENVIRONMENTS)}") from err


__all__ = ["Environment", "MazeEnv", "PusherEnv", "PointEnv", "make_env", "room_of", "hand_distance"]
