# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Two-component PCA by power iteration with deflation
"""
from typing import Tuple

import numpy as np

MAX_ITERATIONS = 1000
TOLERANCE = 1e-10
START_SEED = 0


def _power_iteration(matrix: np.ndarray, start: np.ndarray) -> Tuple[np.ndarray, float]:
    vector = start / np.linalg.norm(start)
    for _ in range(MAX_ITERATIONS):
        product = matrix @ vector
        norm = np.linalg.norm(product)
        if norm == 0.0:
            return vector, 0.0
        product /= norm
        converged = np.linalg.norm(product - vector) < TOLERANCE
        vector = product
        if converged:
            break
    return vector, float(vector @ matrix @ vector)


def _orthogonal_unit(vector: np.ndarray) -> np.ndarray:
    """A unit vector orthogonal to a unit vector, from the least aligned coordinate axis"""
    axis = np.zeros_like(vector)
    axis[int(np.argmin(np.abs(vector)))] = 1.0
    axis -= (axis @ vector) * vector
    return axis / np.linalg.norm(axis)


def _sign_convention(vector: np.ndarray) -> np.ndarray:
    nonzero = np.flatnonzero(np.abs(vector) > 1e-12)
    if nonzero.size and vector[nonzero[0]] < 0.0:
        return -vector
    return vector


def pca_2d(points) -> Tuple[np.ndarray, np.ndarray]:
    """
    Project points onto the top two principal directions of their covariance.

    Args:
        points: Array-like of shape (n, d) with n >= 3 and d >= 2

    Returns:
        components of shape (2, d), orthonormal with the first nonzero entry of each positive,
        and projections of shape (n, 2) of the mean-centred points
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] < 3:
        raise ValueError(f"PCA needs at least 3 points, got shape {points.shape}")
    if points.shape[1] < 2:
        raise ValueError(f"PCA needs points of dimension >= 2, got {points.shape[1]}")

    centred = points - points.mean(axis=0)
    covariance = centred.T @ centred / points.shape[0]
    start = np.random.default_rng(START_SEED).normal(size=points.shape[1])

    first, eigenvalue = _power_iteration(covariance, start)
    deflated = covariance - eigenvalue * np.outer(first, first)
    if np.linalg.norm(deflated) <= 1e-12 * max(np.linalg.norm(covariance), 1e-300):
        second = _orthogonal_unit(first)
    else:
        start = start - (start @ first) * first
        second, _ = _power_iteration(deflated, start)
    # re-orthogonalise against round-off
    second = second - (second @ first) * first
    second /= np.linalg.norm(second)

    components = np.stack([_sign_convention(first), _sign_convention(second)])
    return components, centred @ components.T
