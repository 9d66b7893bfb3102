# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Aggregation of per-run curve fragments into one curve file with a mean and a sample
standard deviation per variant.
"""
import logging
import os
import re
from typing import Dict, Iterable, List, Tuple

import numpy as np

from reachgoal.exceptions import CurveGridError
from reachgoal.orchestrator.artifacts import read_table, write_table
from reachgoal.settings import CURVE_FILE, CURVE_HEADER, CURVE_VARIANTS

logger = logging.getLogger(__file__)

RUN_DIR_PATTERN = re.compile(r"^(?P<variant>.+)-seed(?P<seed>\d+)$")


def collect_runs(run_dirs: Iterable[str]) -> Dict[str, List[Tuple[str, np.ndarray]]]:
    """
    Read the curve fragment of every tagged run directory.

    Directories that are not named `<variant>-seed<n>`, belong to a variant outside the
    curve file or hold no curve fragment are skipped with a warning.

    Returns:
        variant -> [(run dir, rows of `step mean std`)]
    """
    runs = {variant: [] for variant in CURVE_VARIANTS}
    for run_dir in run_dirs:
        match = RUN_DIR_PATTERN.match(os.path.basename(os.path.normpath(run_dir)))
        curve_path = os.path.join(run_dir, CURVE_FILE)
        if match is None or match.group("variant") not in runs:
            logger.warning("Skipping %s: not a run directory of %s", run_dir, CURVE_VARIANTS)
            continue
        if not os.path.isfile(curve_path):
            logger.warning("Skipping %s: no %s", run_dir, CURVE_FILE)
            continue
        _, rows = read_table(curve_path)
        runs[match.group("variant")].append((run_dir, rows))
    return runs


def aggregate_curves(runs: Dict[str, List[Tuple[str, np.ndarray]]]) -> np.ndarray:
    """
    Per-step mean and sample standard deviation across seeds of each variant.

    Args:
        runs: variant -> [(run name, rows of `step mean std`)]

    Returns:
        Rows matching CURVE_HEADER; variants without runs get nan columns

    Raises:
        CurveGridError: if the runs were not evaluated at the same steps
        ValueError: if there is no run at all
    """
    named = [(name, rows) for variant in CURVE_VARIANTS for name, rows in runs.get(variant, [])]
    if not named:
        raise ValueError("No run to aggregate")
    steps = named[0][1][:, 0]
    offending = [name for name, rows in named if not np.array_equal(rows[:, 0], steps)]
    if offending:
        raise CurveGridError([named[0][0]] + offending)

    columns = [steps]
    for variant in CURVE_VARIANTS:
        means = np.array([rows[:, 1] for _, rows in runs.get(variant, [])])
        if means.shape[0] == 0:
            columns.extend([np.full(steps.shape, np.nan)] * 2)
            continue
        spread = np.std(means, axis=0, ddof=1) if means.shape[0] > 1 else np.zeros(steps.shape)
        columns.extend([np.mean(means, axis=0), spread])
    return np.column_stack(columns)


def write_aggregate(run_dirs: Iterable[str], out_path: str) -> np.ndarray:
    """Aggregate run directories into a curve file; returns the rows written"""
    runs = collect_runs(run_dirs)
    for variant, found in runs.items():
        logger.info("Aggregating %d %s runs", len(found), variant)
    rows = aggregate_curves(runs)
    write_table(out_path, CURVE_HEADER, rows)
    return rows
