# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Finite-difference checks of every analytic gradient used in training, on small random
networks.
"""
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from reachgoal.numcore.gradcheck import check_gradient
from reachgoal.numcore.losses import mean_squared_loss
from reachgoal.numcore.network import NetSpec, net_gradient, net_init
from reachgoal.policy.sac import SACConfig, SACState, actor_loss, critic_loss, temperature_loss
from reachgoal.rnet.model import RNetModel, rnet_loss_and_gradient

OBS_DIM = 3
ACTION_DIM = 2
BATCH = 8
SMALL_SAC = SACConfig(hidden_size=8, replay_capacity=1)

# a draw returns (fn mapping a flat vector to (value, gradient), starting point)
Draw = Callable[[np.random.Generator], Tuple[Callable, np.ndarray]]


def _network_draw(rng: np.random.Generator):
    params = net_init(NetSpec((OBS_DIM, 6, 2)), rng)
    batch = (rng.normal(size=(BATCH, OBS_DIM)), rng.normal(size=(BATCH, 2)))
    return lambda flat: net_gradient(params.with_flat(flat), mean_squared_loss, batch), params.flat


def _rnet_draw(rng: np.random.Generator):
    model = RNetModel(net_init(NetSpec((OBS_DIM, 6, 4)), rng), net_init(NetSpec((8, 6, 1)), rng), tau_reach=2)
    first = rng.uniform(0, 1, (BATCH, OBS_DIM))
    second = rng.uniform(0, 1, (BATCH, OBS_DIM))
    labels = rng.integers(0, 2, BATCH).astype(float)
    return lambda flat: rnet_loss_and_gradient(model.with_flat(flat), first, second, labels), model.flat()


def _critic_draw(rng: np.random.Generator):
    sac = SACState.create(OBS_DIM, ACTION_DIM, SMALL_SAC, rng)
    inputs = rng.uniform(-1, 1, (BATCH, 2 * OBS_DIM + ACTION_DIM))
    targets = rng.normal(size=BATCH)
    return lambda flat: critic_loss(sac.critic1.with_flat(flat), inputs, targets), sac.critic1.flat


def _actor_draw(rng: np.random.Generator):
    sac = SACState.create(OBS_DIM, ACTION_DIM, SMALL_SAC, rng)
    inputs = rng.uniform(0, 1, (BATCH, 2 * OBS_DIM))
    noise = rng.standard_normal((BATCH, ACTION_DIM))
    temperature = float(rng.uniform(0.01, 1.0))

    def loss(flat):
        value, grad, _ = actor_loss(sac.actor.with_flat(flat), sac.critic1, sac.critic2, inputs, noise, temperature)
        return value, grad

    return loss, sac.actor.flat


def _temperature_draw(rng: np.random.Generator):
    log_probs = rng.normal(size=BATCH)

    def loss(flat):
        value, grad = temperature_loss(float(flat[0]), log_probs, -float(ACTION_DIM))
        return value, np.array([grad])

    return loss, rng.normal(size=1)


GRADIENT_FAMILIES: Dict[str, Draw] = {
    "network_mse": _network_draw,
    "rnet_bce": _rnet_draw,
    "critic": _critic_draw,
    "actor": _actor_draw,
    "temperature": _temperature_draw,
}


def run_gradient_suite(draws: int = 20, seed: int = 0, corrupt: Optional[str] = None) -> Dict[str, float]:
    """
    Maximum relative gradient error of each loss family over random draws.

    Args:
        draws: Random networks and batches per family
        seed: Seed of the draws
        corrupt: Name of a family whose analytic gradient is scaled by 1.1, as a negative control

    Returns:
        family -> maximum relative error
    """
    if corrupt is not None and corrupt not in GRADIENT_FAMILIES:
        raise ValueError(f"Unknown loss family '{corrupt}', expected one of {sorted(GRADIENT_FAMILIES)}")
    rng = np.random.default_rng(seed)
    errors = {}
    for name, draw in GRADIENT_FAMILIES.items():
        worst = 0.0
        for _ in range(draws):
            fn, start = draw(rng)
            if name == corrupt:
                fn = _scaled_gradient(fn, 1.1)
            worst = max(worst, check_gradient(fn, start))
        errors[name] = worst
    return errors


def _scaled_gradient(fn: Callable, factor: float) -> Callable:

    def scaled(flat):
        value, grad = fn(flat)
        return value, factor * np.asarray(grad)

    return scaled
