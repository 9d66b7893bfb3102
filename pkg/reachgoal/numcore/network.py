# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Fully connected networks stored as a single flat parameter vector.

Hidden layers use tanh, the output layer is affine. Layer l maps a row vector x to
x @ W_l + b_l, with W_l of shape (fan_in, fan_out). The flat vector holds, per layer,
W_l in row-major order followed by b_l.
"""
from dataclasses import dataclass
from typing import Callable, Iterator, List, Tuple

import numpy as np

from reachgoal.exceptions import NonFiniteLossError

# (outputs, targets) -> (mean loss, d loss / d outputs)
LossFunction = Callable[[np.ndarray, np.ndarray], Tuple[float, np.ndarray]]


@dataclass(frozen=True)
class NetSpec:
    """Layer sizes from input to output"""
    layer_sizes: Tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(size) for size in self.layer_sizes)
        if len(sizes) < 2:
            raise ValueError(f"A network needs at least an input and an output layer, got {sizes}")
        if any(size < 1 for size in sizes):
            raise ValueError(f"Layer sizes must be positive, got {sizes}")
        object.__setattr__(self, "layer_sizes", sizes)

    @property
    def input_size(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_size(self) -> int:
        return self.layer_sizes[-1]

    @property
    def layer_shapes(self) -> List[Tuple[int, int]]:
        return list(zip(self.layer_sizes[:-1], self.layer_sizes[1:]))

    @property
    def num_params(self) -> int:
        return sum(fan_in * fan_out + fan_out for fan_in, fan_out in self.layer_shapes)


class NetParams:
    """
    Parameters of a network. The flat vector is owned by the instance; weight and bias
    accessors return views into it.
    """

    def __init__(self, spec: NetSpec, flat: np.ndarray):
        flat = np.array(flat, dtype=np.float64).reshape(-1)
        if flat.shape[0] != spec.num_params:
            raise ValueError(f"Network {spec.layer_sizes} has {spec.num_params} parameters, got {flat.shape[0]}")
        self.spec = spec
        self.flat = flat

    def layers(self) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        """Yield (weights, bias) views, input layer first"""
        offset = 0
        for fan_in, fan_out in self.spec.layer_shapes:
            weights = self.flat[offset:offset + fan_in * fan_out].reshape(fan_in, fan_out)
            offset += fan_in * fan_out
            bias = self.flat[offset:offset + fan_out]
            offset += fan_out
            yield weights, bias

    def with_flat(self, flat: np.ndarray) -> "NetParams":
        return NetParams(self.spec, flat)

    def copy(self) -> "NetParams":
        return NetParams(self.spec, self.flat)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NetParams):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.flat, other.flat)

    def __repr__(self) -> str:
        return f"NetParams(layer_sizes={self.spec.layer_sizes})"


def net_init(spec: NetSpec, seed) -> NetParams:
    """
    Glorot-uniform weights and zero biases.

    Args:
        spec: The network layout
        seed: Anything numpy.random.default_rng accepts, including a Generator

    Returns:
        Freshly initialised parameters, identical for identical seeds
    """
    rng = np.random.default_rng(seed)
    params = NetParams(spec, np.zeros(spec.num_params))
    for weights, _ in params.layers():
        fan_in, fan_out = weights.shape
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights[...] = rng.uniform(-bound, bound, size=weights.shape)
    return params


def _as_batch(params: NetParams, inputs) -> Tuple[np.ndarray, bool]:
    inputs = np.asarray(inputs, dtype=np.float64)
    single = inputs.ndim == 1
    batch = inputs.reshape(1, -1) if single else inputs
    if batch.ndim != 2 or batch.shape[1] != params.spec.input_size:
        raise ValueError(f"Network expects inputs of size {params.spec.input_size}, got shape {inputs.shape}")
    return batch, single


def net_forward_cached(params: NetParams, inputs) -> Tuple[np.ndarray, List[np.ndarray]]:
    """
    Forward pass over a batch that keeps the input of every layer for net_backward.

    Args:
        params: Network parameters
        inputs: Array of shape (batch, input_size)

    Returns:
        The outputs of shape (batch, output_size) and the cache of layer inputs
    """
    activation, _ = _as_batch(params, inputs)
    cache = []
    layers = list(params.layers())
    for index, (weights, bias) in enumerate(layers):
        cache.append(activation)
        activation = activation @ weights + bias
        if index < len(layers) - 1:
            activation = np.tanh(activation)
    return activation, cache


def net_forward(params: NetParams, inputs) -> np.ndarray:
    """
    Evaluate the network on one input vector or a batch of row vectors.

    Returns:
        An output vector for a single input, otherwise an array of shape (batch, output_size)
    """
    _, single = _as_batch(params, inputs)
    outputs, _ = net_forward_cached(params, inputs)
    return outputs[0] if single else outputs


def net_backward(params: NetParams, cache: List[np.ndarray],
                 grad_outputs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Reverse-mode pass for a cached forward pass.

    Args:
        params: The parameters used for the forward pass
        cache: The layer inputs returned by net_forward_cached
        grad_outputs: Gradient of the scalar objective with respect to the outputs

    Returns:
        The gradient with respect to the flat parameter vector and with respect to the inputs
    """
    layers = list(params.layers())
    grad_view = NetParams(params.spec, np.zeros_like(params.flat))
    grad_layers = list(grad_view.layers())
    delta = np.asarray(grad_outputs, dtype=np.float64).reshape(cache[0].shape[0], -1)
    for index in range(len(layers) - 1, -1, -1):
        weights, _ = layers[index]
        grad_weights, grad_bias = grad_layers[index]
        grad_weights[...] = cache[index].T @ delta
        grad_bias[...] = delta.sum(axis=0)
        delta = delta @ weights.T
        if index > 0:
            delta = delta * (1.0 - cache[index]**2)
    return grad_view.flat, delta


def net_gradient(params: NetParams, loss_fn: LossFunction,
                 batch: Tuple[np.ndarray, np.ndarray]) -> Tuple[float, np.ndarray]:
    """
    Mean batch loss and its gradient with respect to the flat parameters.

    Args:
        params: Network parameters
        loss_fn: Maps (outputs, targets) to (mean loss, d loss / d outputs)
        batch: (inputs, targets)

    Returns:
        The loss and the gradient vector
    """
    inputs, targets = batch
    outputs, cache = net_forward_cached(params, inputs)
    loss, grad_outputs = loss_fn(outputs, targets)
    if not np.isfinite(loss):
        raise NonFiniteLossError("network", float(loss))
    grad, _ = net_backward(params, cache, grad_outputs)
    if not np.all(np.isfinite(grad)):
        raise NonFiniteLossError("network gradient", float(np.max(np.abs(grad))))
    return float(loss), grad
