# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Central finite-difference oracle for analytic gradients
"""
from typing import Callable, Tuple

import numpy as np

GRADCHECK_EPSILON = 1e-5
GRADCHECK_TOLERANCE = 1e-4


def relative_error(analytic, numeric) -> float:
    """||a - n|| / max(||a||, ||n||, 1e-8)"""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-8)
    return float(np.linalg.norm(analytic - numeric) / scale)


def numeric_gradient(fn: Callable[[np.ndarray], float], x0, eps: float = GRADCHECK_EPSILON) -> np.ndarray:
    """Central differences of a scalar function of a flat vector"""
    x = np.array(x0, dtype=np.float64).reshape(-1)
    grad = np.zeros_like(x)
    for index in range(x.shape[0]):
        saved = x[index]
        x[index] = saved + eps
        upper = fn(x)
        x[index] = saved - eps
        lower = fn(x)
        x[index] = saved
        grad[index] = (upper - lower) / (2.0 * eps)
    return grad


def check_gradient(fn: Callable[[np.ndarray], Tuple[float, np.ndarray]], x0,
                   eps: float = GRADCHECK_EPSILON) -> float:
    """
    Compare the analytic gradient of fn at x0 against central differences.

    Args:
        fn: Maps a flat vector to (value, analytic gradient)
        x0: The point to check at
        eps: Finite-difference step

    Returns:
        The relative error between the two gradients
    """
    _, analytic = fn(np.array(x0, dtype=np.float64))
    numeric = numeric_gradient(lambda x: fn(x)[0], x0, eps)
    return relative_error(analytic, numeric)
