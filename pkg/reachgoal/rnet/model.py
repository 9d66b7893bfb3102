# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Siamese reachability network: a shared embedding applied to both observations and a
comparator on the concatenated embeddings. The comparator output is a logit; the score
is its sigmoid and the distance its negation.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from reachgoal.numcore.losses import mean_bce_loss, sigmoid
from reachgoal.numcore.network import NetParams, NetSpec, net_backward, net_forward, net_forward_cached, net_init

EMBEDDING_HIDDEN = (64, 64)
EMBEDDING_SIZE = 16
COMPARATOR_HIDDEN = 64
DEFAULT_TAU_REACH = 5


@dataclass(frozen=True)
class RNetModel:
    """Immutable snapshot of the embedding and comparator parameters"""
    embedding: NetParams
    comparator: NetParams
    tau_reach: int = DEFAULT_TAU_REACH

    def __post_init__(self):
        if self.comparator.spec.input_size != 2 * self.embedding.spec.output_size:
            raise ValueError(f"Comparator input {self.comparator.spec.input_size} must be twice the embedding size "
                             f"{self.embedding.spec.output_size}")
        if self.comparator.spec.output_size != 1:
            raise ValueError("The comparator must output a single logit")
        if self.tau_reach < 1:
            raise ValueError(f"tau_reach must be at least 1, got {self.tau_reach}")

    @classmethod
    def create(cls, obs_dim: int, seed, tau_reach: int = DEFAULT_TAU_REACH) -> "RNetModel":
        """Freshly initialised obs -> 64 -> 64 -> 16 embedding and 32 -> 64 -> 1 comparator"""
        rng = np.random.default_rng(seed)
        embedding = net_init(NetSpec((obs_dim, ) + EMBEDDING_HIDDEN + (EMBEDDING_SIZE, )), rng)
        comparator = net_init(NetSpec((2 * EMBEDDING_SIZE, COMPARATOR_HIDDEN, 1)), rng)
        return cls(embedding, comparator, tau_reach)

    @property
    def obs_dim(self) -> int:
        return self.embedding.spec.input_size

    @property
    def num_params(self) -> int:
        return self.embedding.spec.num_params + self.comparator.spec.num_params

    def flat(self) -> np.ndarray:
        return np.concatenate([self.embedding.flat, self.comparator.flat])

    def with_flat(self, flat: np.ndarray) -> "RNetModel":
        split = self.embedding.spec.num_params
        return RNetModel(self.embedding.with_flat(flat[:split]), self.comparator.with_flat(flat[split:]),
                         self.tau_reach)


def _check(model: RNetModel, observations) -> np.ndarray:
    observations = np.asarray(observations, dtype=np.float64)
    if observations.shape[-1] != model.obs_dim:
        raise ValueError(f"RNet expects observations of size {model.obs_dim}, got {observations.shape[-1]}")
    return observations


def embed(model: RNetModel, observations) -> np.ndarray:
    """g(s) for one observation or a batch of them"""
    return net_forward(model.embedding, _check(model, observations))


def logits_from_embeddings(model: RNetModel, first, second) -> np.ndarray:
    """Comparator logits for row-aligned batches of embeddings"""
    first = np.atleast_2d(first)
    second = np.atleast_2d(second)
    first, second = np.broadcast_arrays(first, second)
    return net_forward(model.comparator, np.concatenate([first, second], axis=1))[:, 0]


def pairwise_logits(model: RNetModel, first, second) -> np.ndarray:
    """
    Logits for every combination of two embedding sets.

    Returns:
        Array of shape (len(first), len(second)) holding f(first[a] || second[b])
    """
    first = np.atleast_2d(first)
    second = np.atleast_2d(second)
    left = np.repeat(first, second.shape[0], axis=0)
    right = np.tile(second, (first.shape[0], 1))
    return logits_from_embeddings(model, left, right).reshape(first.shape[0], second.shape[0])


def rnet_logit(model: RNetModel, s_i, s_j):
    """
    Raw reachability logit f(g(s_i) || g(s_j)).

    Either argument may be a batch; a single observation is broadcast against the other.

    Returns:
        A float for two single observations, otherwise one logit per row
    """
    s_i = _check(model, s_i)
    s_j = _check(model, s_j)
    single = s_i.ndim == 1 and s_j.ndim == 1
    logits = logits_from_embeddings(model, embed(model, np.atleast_2d(s_i)), embed(model, np.atleast_2d(s_j)))
    return float(logits[0]) if single else logits


def rnet_score(model: RNetModel, s_i, s_j):
    """sigmoid(rnet_logit): higher means easier to reach by a random walk"""
    logit = rnet_logit(model, s_i, s_j)
    score = sigmoid(logit)
    return float(score) if isinstance(logit, float) else score


def rnet_distance(model: RNetModel, s_i, s_j):
    """Negated logit; larger means less reachable"""
    return -rnet_logit(model, s_i, s_j)


def rnet_loss_and_gradient(model: RNetModel, first, second, labels) -> Tuple[float, np.ndarray]:
    """
    Mean binary cross-entropy of the pair logits and its gradient on model.flat().

    Both observations of a pair go through the same embedding, so one backward pass over
    the stacked batch accumulates the gradient of the two branches.
    """
    first = _check(model, first)
    second = _check(model, second)
    count = first.shape[0]
    embeddings, embedding_cache = net_forward_cached(model.embedding, np.concatenate([first, second]))
    joined = np.concatenate([embeddings[:count], embeddings[count:]], axis=1)
    logits, comparator_cache = net_forward_cached(model.comparator, joined)
    loss, grad_logits = mean_bce_loss(logits, np.asarray(labels, dtype=np.float64).reshape(-1, 1))
    comparator_grad, grad_joined = net_backward(model.comparator, comparator_cache, grad_logits)
    size = model.embedding.spec.output_size
    grad_embeddings = np.concatenate([grad_joined[:, :size], grad_joined[:, size:]])
    embedding_grad, _ = net_backward(model.embedding, embedding_cache, grad_embeddings)
    return loss, np.concatenate([embedding_grad, comparator_grad])
