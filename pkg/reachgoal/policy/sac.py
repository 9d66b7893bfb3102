# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Goal-conditioned soft actor-critic on flat-parameter networks.

The actor maps state || goal to a mean and a raw log-std per action component. The raw
value is squashed smoothly into [LOG_STD_MIN, LOG_STD_MAX]; actions are tanh of a
reparameterised Gaussian draw. Twin critics map state || goal || action to a value and
are tracked by Polyak-averaged targets. The temperature is learned in log space.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np

from reachgoal.exceptions import NonFiniteLossError
from reachgoal.numcore.losses import mean_squared_loss
from reachgoal.numcore.network import NetParams, NetSpec, net_backward, net_forward, net_forward_cached, net_init
from reachgoal.numcore.optim import AdamState, adam_step
from reachgoal.policy.replay import DEFAULT_REPLAY_CAPACITY, ReplayBuffer, Transition, TransitionBatch

logger = logging.getLogger(__file__)

LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0
HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class SACConfig:
    gamma: float = 0.99
    polyak: float = 0.995
    lr: float = 3e-4
    batch_size: int = 256
    hidden_size: int = 64
    replay_capacity: int = DEFAULT_REPLAY_CAPACITY
    initial_temperature: float = 0.1
    learn_temperature: bool = True
    # None selects -action_dim
    target_entropy: Optional[float] = None


@dataclass
class SACState:
    """Networks, optimizer states and replay buffer of one agent"""
    config: SACConfig
    obs_dim: int
    action_dim: int
    actor: NetParams
    critic1: NetParams
    critic2: NetParams
    target1: NetParams
    target2: NetParams
    log_temperature: float
    actor_adam: AdamState
    critic1_adam: AdamState
    critic2_adam: AdamState
    temperature_adam: AdamState
    replay: ReplayBuffer = field(repr=False)
    updates: int = 0

    @classmethod
    def create(cls, obs_dim: int, action_dim: int, config: SACConfig = SACConfig(), seed=None) -> "SACState":
        """Fresh agent; targets start equal to their critics"""
        rng = np.random.default_rng(seed)
        hidden = (config.hidden_size, config.hidden_size)
        actor = net_init(NetSpec((2 * obs_dim, ) + hidden + (2 * action_dim, )), rng)
        critic_spec = NetSpec((2 * obs_dim + action_dim, ) + hidden + (1, ))
        critic1 = net_init(critic_spec, rng)
        critic2 = net_init(critic_spec, rng)
        return cls(config=config,
                   obs_dim=obs_dim,
                   action_dim=action_dim,
                   actor=actor,
                   critic1=critic1,
                   critic2=critic2,
                   target1=critic1.copy(),
                   target2=critic2.copy(),
                   log_temperature=math.log(config.initial_temperature),
                   actor_adam=AdamState.create(actor.spec.num_params, config.lr),
                   critic1_adam=AdamState.create(critic_spec.num_params, config.lr),
                   critic2_adam=AdamState.create(critic_spec.num_params, config.lr),
                   temperature_adam=AdamState.create(1, config.lr),
                   replay=ReplayBuffer(config.replay_capacity))

    @property
    def temperature(self) -> float:
        return math.exp(self.log_temperature)

    @property
    def target_entropy(self) -> float:
        if self.config.target_entropy is None:
            return -float(self.action_dim)
        return self.config.target_entropy


def squash_log_std(raw: np.ndarray) -> np.ndarray:
    return LOG_STD_MIN + 0.5 * (LOG_STD_MAX - LOG_STD_MIN) * (np.tanh(raw) + 1.0)


def squashed_sample(mean: np.ndarray, log_std: np.ndarray, noise: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    tanh of a reparameterised Gaussian draw and its log-density.

    Args:
        mean: Gaussian means, shape (batch, action_dim)
        log_std: Gaussian log standard deviations, same shape
        noise: Standard normal draws, same shape

    Returns:
        The actions and the log-density per row, including the tanh change of variables
    """
    pre_tanh = mean + np.exp(log_std) * noise
    action = np.tanh(pre_tanh)
    # log(1 - tanh(u)^2) without cancellation
    log_jacobian = 2.0 * (math.log(2.0) - pre_tanh - np.logaddexp(0.0, -2.0 * pre_tanh))
    log_prob = np.sum(-0.5 * noise**2 - log_std - HALF_LOG_TWO_PI - log_jacobian, axis=-1)
    return action, log_prob


def _actor_inputs(sac: SACState, states, goals) -> Tuple[np.ndarray, bool]:
    states = np.asarray(states, dtype=np.float64)
    goals = np.asarray(goals, dtype=np.float64)
    if states.shape[-1] != sac.obs_dim or goals.shape[-1] != sac.obs_dim:
        raise ValueError(f"Agent expects states and goals of size {sac.obs_dim}, got {states.shape} and {goals.shape}")
    single = states.ndim == 1 and goals.ndim == 1
    states, goals = np.broadcast_arrays(np.atleast_2d(states), np.atleast_2d(goals))
    return np.concatenate([states, goals], axis=1), single


def actor_heads(actor: NetParams, inputs: np.ndarray, action_dim: int):
    """Mean, squashed log-std, raw log-std and the forward cache for a batch of state || goal rows"""
    outputs, cache = net_forward_cached(actor, inputs)
    raw = outputs[:, action_dim:]
    return outputs[:, :action_dim], squash_log_std(raw), raw, cache


def actor_sample(sac: SACState, states, goals, rng: np.random.Generator):
    """
    Stochastic action toward a goal.

    Returns:
        (action, log_prob) for a single state, or arrays over a batch of states
    """
    inputs, single = _actor_inputs(sac, states, goals)
    mean, log_std, _, _ = actor_heads(sac.actor, inputs, sac.action_dim)
    action, log_prob = squashed_sample(mean, log_std, rng.standard_normal(mean.shape))
    if single:
        return action[0], float(log_prob[0])
    return action, log_prob


def actor_mean(sac: SACState, states, goals) -> np.ndarray:
    """Deterministic action tanh(mean) used for evaluation"""
    inputs, single = _actor_inputs(sac, states, goals)
    mean, _, _, _ = actor_heads(sac.actor, inputs, sac.action_dim)
    action = np.tanh(mean)
    return action[0] if single else action


def critic_targets(sac: SACState, batch: TransitionBatch, noise: np.ndarray, temperature: float) -> np.ndarray:
    """
    Soft Bellman targets r + gamma (1 - done) (min target Q(s', g, a') - temperature log pi(a' | s', g)).

    Args:
        sac: The agent
        batch: Transitions
        noise: Standard normal draws for the next actions, shape (batch, action_dim)
        temperature: Entropy weight

    Returns:
        One target per transition
    """
    next_inputs = np.concatenate([batch.next_states, batch.goals], axis=1)
    mean, log_std, _, _ = actor_heads(sac.actor, next_inputs, sac.action_dim)
    next_actions, next_log_prob = squashed_sample(mean, log_std, noise)
    critic_inputs = np.concatenate([next_inputs, next_actions], axis=1)
    next_value = np.minimum(net_forward(sac.target1, critic_inputs)[:, 0],
                            net_forward(sac.target2, critic_inputs)[:, 0])
    soft_value = next_value - temperature * next_log_prob if temperature else next_value
    return batch.rewards + sac.config.gamma * (1.0 - batch.dones) * soft_value


def critic_loss(critic: NetParams, inputs: np.ndarray, targets: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean squared error of one critic against fixed targets, and its gradient"""
    outputs, cache = net_forward_cached(critic, inputs)
    loss, grad_outputs = mean_squared_loss(outputs, np.asarray(targets).reshape(-1, 1))
    grad, _ = net_backward(critic, cache, grad_outputs)
    return loss, grad


def actor_loss(actor: NetParams, critic1: NetParams, critic2: NetParams, inputs: np.ndarray, noise: np.ndarray,
               temperature: float) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    mean(temperature * log pi(a | s, g) - min(Q1, Q2)(s, g, a)) with a reparameterised by the noise.

    Args:
        actor: Actor parameters
        critic1: First critic, held fixed
        critic2: Second critic, held fixed
        inputs: state || goal rows
        noise: Standard normal draws, shape (batch, action_dim)
        temperature: Entropy weight

    Returns:
        The loss, its gradient on the actor parameters and the log-probabilities of the actions
    """
    action_dim = noise.shape[1]
    count = inputs.shape[0]
    mean, log_std, raw, cache = actor_heads(actor, inputs, action_dim)
    action, log_prob = squashed_sample(mean, log_std, noise)
    std = np.exp(log_std)

    critic_inputs = np.concatenate([inputs, action], axis=1)
    q1, cache1 = net_forward_cached(critic1, critic_inputs)
    q2, cache2 = net_forward_cached(critic2, critic_inputs)
    _, grad_in1 = net_backward(critic1, cache1, np.ones_like(q1))
    _, grad_in2 = net_backward(critic2, cache2, np.ones_like(q2))
    first_is_min = q1[:, 0] <= q2[:, 0]
    q_min = np.where(first_is_min, q1[:, 0], q2[:, 0])
    grad_q_action = np.where(first_is_min[:, None], grad_in1, grad_in2)[:, -action_dim:]

    loss = float(np.mean(temperature * log_prob - q_min))
    # d log pi / d u = 2 tanh(u); d u / d log_std = std * noise
    grad_pre_tanh = temperature * 2.0 * action - grad_q_action * (1.0 - action**2)
    grad_log_std = -temperature + grad_pre_tanh * std * noise
    grad_raw = grad_log_std * 0.5 * (LOG_STD_MAX - LOG_STD_MIN) * (1.0 - np.tanh(raw)**2)
    grad_outputs = np.concatenate([grad_pre_tanh, grad_raw], axis=1) / count
    grad, _ = net_backward(actor, cache, grad_outputs)
    return loss, grad, log_prob


def temperature_loss(log_temperature: float, log_probs: np.ndarray, target_entropy: float) -> Tuple[float, float]:
    """J = -log_temperature * mean(log pi + target_entropy) and dJ / d log_temperature"""
    slack = float(np.mean(np.asarray(log_probs) + target_entropy))
    return -log_temperature * slack, -slack


def _check_finite(name: str, loss: float, grad, step: int):
    if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
        raise NonFiniteLossError(name, float(loss), step)


def sac_update(sac: SACState, batch: TransitionBatch, rng: np.random.Generator) -> Tuple[SACState, Dict[str, float]]:
    """
    One update of the critics, then the actor, then the temperature, then the targets.

    Args:
        sac: The agent before the update
        batch: At least two transitions
        rng: Source of the reparameterisation noise

    Returns:
        The updated agent (sharing the replay buffer) and the losses of this update
    """
    if len(batch) < 2:
        raise ValueError(f"SAC updates need at least 2 transitions, got {len(batch)}")
    step = sac.updates
    temperature = sac.temperature
    inputs = np.concatenate([batch.states, batch.goals], axis=1)
    critic_inputs = np.concatenate([inputs, batch.actions], axis=1)

    targets = critic_targets(sac, batch, rng.standard_normal((len(batch), sac.action_dim)), temperature)
    loss1, grad1 = critic_loss(sac.critic1, critic_inputs, targets)
    _check_finite("critic1", loss1, grad1, step)
    loss2, grad2 = critic_loss(sac.critic2, critic_inputs, targets)
    _check_finite("critic2", loss2, grad2, step)
    critic1, critic1_adam = adam_step(sac.critic1, grad1, sac.critic1_adam)
    critic2, critic2_adam = adam_step(sac.critic2, grad2, sac.critic2_adam)

    noise = rng.standard_normal((len(batch), sac.action_dim))
    policy_loss, actor_grad, log_probs = actor_loss(sac.actor, critic1, critic2, inputs, noise, temperature)
    _check_finite("actor", policy_loss, actor_grad, step)
    actor, actor_adam = adam_step(sac.actor, actor_grad, sac.actor_adam)

    alpha_loss, alpha_grad = temperature_loss(sac.log_temperature, log_probs, sac.target_entropy)
    _check_finite("temperature", alpha_loss, alpha_grad, step)
    log_temperature, temperature_adam = sac.log_temperature, sac.temperature_adam
    if sac.config.learn_temperature:
        updated, temperature_adam = adam_step(np.array([sac.log_temperature]), np.array([alpha_grad]),
                                              sac.temperature_adam)
        log_temperature = float(updated[0])

    rho = sac.config.polyak
    target1 = sac.target1.with_flat(rho * sac.target1.flat + (1.0 - rho) * critic1.flat)
    target2 = sac.target2.with_flat(rho * sac.target2.flat + (1.0 - rho) * critic2.flat)

    updated_sac = replace(sac,
                          actor=actor,
                          critic1=critic1,
                          critic2=critic2,
                          target1=target1,
                          target2=target2,
                          log_temperature=log_temperature,
                          actor_adam=actor_adam,
                          critic1_adam=critic1_adam,
                          critic2_adam=critic2_adam,
                          temperature_adam=temperature_adam,
                          updates=step + 1)
    losses = {
        "critic1": loss1,
        "critic2": loss2,
        "actor": policy_loss,
        "temperature": alpha_loss,
        "alpha": math.exp(log_temperature),
    }
    return updated_sac, losses


def replay_push(sac: SACState, transition: Transition):
    """Append a transition to the agent's replay buffer"""
    if np.shape(transition.state)[-1] != sac.obs_dim or np.shape(transition.action)[-1] != sac.action_dim:
        raise ValueError("Transition dimensions do not match the agent")
    sac.replay.push(transition)


def replay_sample(sac: SACState, count: int, rng: np.random.Generator) -> TransitionBatch:
    """Uniform sample with replacement from the agent's replay buffer"""
    return sac.replay.sample(count, rng)
