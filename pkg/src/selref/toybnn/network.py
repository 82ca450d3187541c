"""Tiny multilayer perceptron shared by every training method.

The network is a plain tanh MLP (tanh keeps every objective smooth, which
the finite-difference gradient checks rely on).  Dropout multiplies the
hidden activations element-wise by caller-supplied masks; mask values use
the inverted convention {0, 1/(1 - rate)} so the deterministic no-mask
forward pass matches the training-time activation scale.
"""

from dataclasses import dataclass

import numpy as np

from ..exceptions import ShapeMismatchError
from .autodiff import Tensor, as_tensor


@dataclass
class ToyMlp:
    """Deterministic parameter bundle for the toy network.

    weights[k] has shape (layer_sizes[k], layer_sizes[k+1]); masks, when
    used, apply to the outputs of the hidden layers (never the logits).
    """

    layer_sizes: tuple
    weights: list
    biases: list
    dropout_rate: float = 0.0
    activation: str = "tanh"

    @property
    def n_classes(self):
        return self.layer_sizes[-1]

    @property
    def n_hidden_layers(self):
        return len(self.layer_sizes) - 2


def init_mlp(layer_sizes, rng, dropout_rate=0.0):
    """Glorot-normal weights (std sqrt(2 / (fan_in + fan_out))), zero biases."""
    layer_sizes = tuple(int(s) for s in layer_sizes)
    if len(layer_sizes) < 2:
        raise ValueError("need at least an input and an output layer")
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes, layer_sizes[1:]):
        std = np.sqrt(2.0 / (fan_in + fan_out))
        weights.append(rng.standard_normal((fan_in, fan_out)) * std)
        biases.append(np.zeros(fan_out))
    return ToyMlp(layer_sizes, weights, biases, dropout_rate=dropout_rate)


def forward_logits(weights, biases, inputs, masks=None):
    """Logits of the MLP; works on Tensors (training) and ndarrays alike.

    `masks`, when given, is one array per hidden layer, multiplied
    element-wise into that layer's activations.
    """
    h = as_tensor(np.asarray(inputs, dtype=np.float64))
    n_hidden = len(weights) - 1
    if masks is not None and len(masks) != n_hidden:
        raise ShapeMismatchError(f"expected {n_hidden} masks, got {len(masks)}")
    for k in range(n_hidden):
        h = (h @ weights[k] + biases[k]).tanh()
        if masks is not None:
            h = h * masks[k]
    return h @ weights[-1] + biases[-1]


def softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def forward(net, inputs, masks=None):
    """Class probabilities of the network for a batch of inputs."""
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape[1] != net.layer_sizes[0]:
        raise ShapeMismatchError(
            f"inputs must be (n, {net.layer_sizes[0]}), got {inputs.shape}"
        )
    logits = forward_logits(net.weights, net.biases, inputs, masks=masks)
    if isinstance(logits, Tensor):
        logits = logits.value
    return softmax(logits)


def sample_dropout_masks(net, n_rows, rng):
    """Inverted-scale dropout masks, one per hidden layer.

    Entries are 0 with probability `dropout_rate` and 1/(1 - rate)
    otherwise, so masked activations keep their expected value.
    """
    rate = net.dropout_rate
    masks = []
    for size in net.layer_sizes[1:-1]:
        if rate > 0.0:
            keep = rng.random((n_rows, size)) >= rate
            masks.append(keep.astype(np.float64) / (1.0 - rate))
        else:
            masks.append(np.ones((n_rows, size)))
    return masks
