"""Minimal reverse-mode automatic differentiation over numpy arrays.

A Tensor wraps a float64 ndarray and records the operations applied to
it; ``backward()`` on a scalar result accumulates gradients into every
reachable leaf.  The op set is exactly what the training objectives need:
elementwise arithmetic, matmul, tanh/log/exp/softplus/pow, axis sums,
log-softmax and label gather.  Plain ndarrays and python scalars mix
freely with Tensors and act as constants.
"""

import numpy as np
from scipy.special import expit


def _unbroadcast(grad, shape):
    """Sum `grad` down to `shape` (reverses numpy broadcasting)."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Tensor:
    """Array node in the computation graph."""

    __slots__ = ("value", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, value, requires_grad=False):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = ()
        self._backward = None

    @property
    def shape(self):
        return self.value.shape

    def _make(self, value, parents, backward):
        out = Tensor(value)
        out.requires_grad = any(p.requires_grad for p in parents)
        if out.requires_grad:
            out._parents = parents
            out._backward = backward
        return out

    # -- graph traversal ---------------------------------------------------

    def backward(self):
        if self.value.size != 1:
            raise ValueError("backward() is defined for scalar outputs only")
        # iterative post-order DFS: long op chains (many MC samples) would
        # blow the recursion limit
        topo, seen = [], set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen:
                    stack.append((p, False))
        grads = {id(self): np.ones_like(self.value)}
        for node in reversed(topo):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node.requires_grad and not node._parents:
                node.grad = g if node.grad is None else node.grad + g
            if node._backward is None:
                continue
            for parent, pg in zip(node._parents, node._backward(g)):
                if not parent.requires_grad:
                    continue
                key = id(parent)
                grads[key] = pg if key not in grads else grads[key] + pg

    # -- operations ----------------------------------------------------------

    def __add__(self, other):
        other = as_tensor(other)
        return self._make(
            self.value + other.value,
            (self, other),
            lambda g: (
                _unbroadcast(g, self.value.shape),
                _unbroadcast(g, other.value.shape),
            ),
        )

    __radd__ = __add__

    def __neg__(self):
        return self._make(-self.value, (self,), lambda g: (-g,))

    def __sub__(self, other):
        return self + (-as_tensor(other))

    def __rsub__(self, other):
        return as_tensor(other) + (-self)

    def __mul__(self, other):
        other = as_tensor(other)
        return self._make(
            self.value * other.value,
            (self, other),
            lambda g: (
                _unbroadcast(g * other.value, self.value.shape),
                _unbroadcast(g * self.value, other.value.shape),
            ),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_tensor(other)
        return self._make(
            self.value / other.value,
            (self, other),
            lambda g: (
                _unbroadcast(g / other.value, self.value.shape),
                _unbroadcast(-g * self.value / other.value**2, other.value.shape),
            ),
        )

    def __rtruediv__(self, other):
        return as_tensor(other) / self

    def __matmul__(self, other):
        other = as_tensor(other)
        return self._make(
            self.value @ other.value,
            (self, other),
            lambda g: (g @ other.value.T, self.value.T @ g),
        )

    def __pow__(self, exponent):
        if not np.isscalar(exponent):
            raise TypeError("only scalar exponents are supported")
        return self._make(
            self.value**exponent,
            (self,),
            lambda g: (g * exponent * self.value ** (exponent - 1),),
        )

    def log(self):
        return self._make(np.log(self.value), (self,), lambda g: (g / self.value,))

    def exp(self):
        out_value = np.exp(self.value)
        return self._make(out_value, (self,), lambda g: (g * out_value,))

    def tanh(self):
        out_value = np.tanh(self.value)
        return self._make(out_value, (self,), lambda g: (g * (1.0 - out_value**2),))

    def softplus(self):
        """log(1 + exp(x)), computed overflow-free."""
        return self._make(
            np.logaddexp(0.0, self.value),
            (self,),
            lambda g: (g * expit(self.value),),
        )

    def sum(self, axis=None, keepdims=False):
        def backward(g):
            if axis is None:
                return (np.broadcast_to(g, self.value.shape).copy(),)
            gg = g if keepdims else np.expand_dims(g, axis)
            return (np.broadcast_to(gg, self.value.shape).copy(),)

        return self._make(self.value.sum(axis=axis, keepdims=keepdims), (self,), backward)

    def log_softmax(self):
        """Row-wise log-softmax of a 2-D logits tensor."""
        shift = self.value - self.value.max(axis=1, keepdims=True)  # constant shift
        logp = shift - np.log(np.exp(shift).sum(axis=1, keepdims=True))

        def backward(g):
            softmax = np.exp(logp)
            return (g - softmax * g.sum(axis=1, keepdims=True),)

        return self._make(logp, (self,), backward)

    def pick(self, indices):
        """Gather self[k, indices[k]] for each row k of a 2-D tensor."""
        indices = np.asarray(indices, dtype=np.int64)
        rows = np.arange(self.value.shape[0])

        def backward(g):
            out = np.zeros_like(self.value)
            out[rows, indices] = g
            return (out,)

        return self._make(self.value[rows, indices], (self,), backward)


def as_tensor(value):
    return value if isinstance(value, Tensor) else Tensor(value)


def parameter(value):
    """Leaf tensor that accumulates gradients."""
    return Tensor(np.array(value, dtype=np.float64), requires_grad=True)
