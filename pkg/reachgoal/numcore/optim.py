# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Adam optimizer over flat parameter vectors
"""
from dataclasses import dataclass, replace
from typing import Tuple, TypeVar

import numpy as np

from reachgoal.numcore.network import NetParams

ParamsT = TypeVar("ParamsT", np.ndarray, NetParams)


@dataclass(frozen=True)
class AdamState:
    """Moment estimates and hyperparameters of one Adam optimizer"""
    m: np.ndarray
    v: np.ndarray
    step: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def create(cls, size: int, lr: float = 1e-3) -> "AdamState":
        """A fresh state for a parameter vector of the given size"""
        return cls(m=np.zeros(size), v=np.zeros(size), lr=lr)


def adam_step(params: ParamsT, grad: np.ndarray, state: AdamState) -> Tuple[ParamsT, AdamState]:
    """
    One bias-corrected Adam update.

    Args:
        params: A flat vector or NetParams
        grad: Gradient of the objective with respect to the flat parameters
        state: The optimizer state matching the parameters

    Returns:
        Updated parameters of the same kind as given, and the new optimizer state
    """
    flat = np.asarray(params.flat if isinstance(params, NetParams) else params, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64).reshape(flat.shape)
    if state.m.shape != flat.shape:
        raise ValueError(f"Optimizer state has shape {state.m.shape}, parameters have {flat.shape}")

    step = state.step + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grad
    v = state.beta2 * state.v + (1.0 - state.beta2) * grad**2
    m_hat = m / (1.0 - state.beta1**step)
    v_hat = v / (1.0 - state.beta2**step)
    updated = flat - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)

    new_state = replace(state, m=m, v=v, step=step)
    if isinstance(params, NetParams):
        return params.with_flat(updated), new_state
    return updated, new_state
