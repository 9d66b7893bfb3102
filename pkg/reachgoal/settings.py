# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Process-wide settings: logging configuration, environment variable names and the
names of the files a run writes.
"""
import logging
import logging.config
import os

SEED_ENV_VAR = "REACH_SEED"
LOG_LEVEL_ENV_VAR = "REACH_LOG_LEVEL"

CHECKPOINT_FORMAT = "reachgoal-checkpoint/1"

CHECKPOINT_FILE = "checkpoint.h5"
CURVE_FILE = "curve.txt"
CONFIG_FILE = "config.txt"
TRAJECTORY_FILE = "trajectories.txt"
EVAL_GOALS_FILE = "eval_goals.txt"
# memory dumps are taken at these percentages of the training budget
MEMORY_DUMP_PERCENTS = (0, 20, 100)
MEMORY_DUMP_FILE = "memory-{:03d}.txt"

CURVE_HEADER = "step topline-mean topline-std unsup-mean unsup-std graph-mean graph-std"
CURVE_VARIANTS = ("topline", "unsup", "graph")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "default": {
            "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
        },
    },
    "handlers": {
        "stream": {
            "class": "logging.StreamHandler",
            "formatter": "default",
        },
    },
    "root": {
        "handlers": ["stream"],
        "level": "INFO",
    },
}


def configure_logging():
    """
    Install the logging configuration. The level can be overridden with the
    REACH_LOG_LEVEL environment variable.
    """
    config = dict(LOGGING)
    config["root"] = dict(LOGGING["root"], level=os.environ.get(LOG_LEVEL_ENV_VAR, "INFO").upper())
    logging.config.dictConfig(config)
