"""Reverse-mode automatic differentiation over batched float64 arrays.

A Tensor wraps an ndarray and remembers how it was produced; the implicit
graph of parents and vector-Jacobian closures is the tape for one forward
evaluation.  backward(loss) replays it once in reverse topological order and
accumulates gradients into every reachable leaf with requires_grad set.

Every op also accepts plain ndarrays (or scalars) and returns a plain ndarray
when no Tensor is involved, so the same model code serves both the training
path and the fast evaluation path.
"""

from __future__ import annotations

import numpy as np


class Tensor:
    """Node of the tape: value, accumulated gradient, parents and local vjp."""

    __slots__ = ("data", "grad", "parents", "vjp", "requires_grad")

    # keep numpy from hijacking ndarray <op> Tensor expressions
    __array_ufunc__ = None

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.parents = ()
        self.vjp = None
        self.requires_grad = requires_grad

    @property
    def shape(self):
        return self.data.shape

    def backward(self):
        backward(self)

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    # operator sugar; every op lives at module level
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)

    def sum(self, axis=None, keepdims=False):
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return tmean(self, axis=axis, keepdims=keepdims)

    def reshape(self, shape):
        return reshape(self, shape)


def _is_tensor_op(*args) -> bool:
    return any(isinstance(a, Tensor) for a in args)


def _lift(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _node(data, parents, vjp) -> Tensor:
    """Result tensor; the graph is pruned below nodes nothing differentiates."""
    out = Tensor(data)
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out.parents = parents
        out.vjp = vjp
    return out


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Reduce a broadcast gradient back to the operand's shape."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


def backward(loss: Tensor) -> None:
    """Accumulate d loss / d leaf into .grad for every reachable leaf."""
    if loss.data.size != 1:
        raise ValueError("backward expects a scalar loss")
    order, seen, stack = [], set(), [(loss, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if p.requires_grad and id(p) not in seen:
                stack.append((p, False))
    loss.grad = np.ones_like(loss.data)
    for node in reversed(order):
        if node.vjp is None or node.grad is None:
            continue
        for p, g in zip(node.parents, node.vjp(node.grad)):
            if g is not None and p.requires_grad:
                p.grad = g if p.grad is None else p.grad + g


# ---------------------------------------------------------------- arithmetic

def add(a, b):
    if not _is_tensor_op(a, b):
        return np.add(a, b)
    a, b = _lift(a), _lift(b)
    return _node(
        a.data + b.data,
        (a, b),
        lambda g: (_unbroadcast(g, a.data.shape), _unbroadcast(g, b.data.shape)),
    )


def sub(a, b):
    if not _is_tensor_op(a, b):
        return np.subtract(a, b)
    a, b = _lift(a), _lift(b)
    return _node(
        a.data - b.data,
        (a, b),
        lambda g: (_unbroadcast(g, a.data.shape), _unbroadcast(-g, b.data.shape)),
    )


def mul(a, b):
    if not _is_tensor_op(a, b):
        return np.multiply(a, b)
    a, b = _lift(a), _lift(b)
    return _node(
        a.data * b.data,
        (a, b),
        lambda g: (
            _unbroadcast(g * b.data, a.data.shape),
            _unbroadcast(g * a.data, b.data.shape),
        ),
    )


def div(a, b):
    if not _is_tensor_op(a, b):
        return np.divide(a, b)
    a, b = _lift(a), _lift(b)
    return _node(
        a.data / b.data,
        (a, b),
        lambda g: (
            _unbroadcast(g / b.data, a.data.shape),
            _unbroadcast(-g * a.data / (b.data * b.data), b.data.shape),
        ),
    )


def neg(a):
    if not _is_tensor_op(a):
        return np.negative(a)
    return _node(-a.data, (a,), lambda g: (-g,))


def matmul(a, b):
    if not _is_tensor_op(a, b):
        return np.matmul(a, b)
    a, b = _lift(a), _lift(b)
    ad, bd = a.data, b.data
    if ad.ndim == 2 and bd.ndim == 2:
        vjp = lambda g: (g @ bd.T, ad.T @ g)
    elif ad.ndim == 2 and bd.ndim == 1:
        vjp = lambda g: (np.outer(g, bd), ad.T @ g)
    elif ad.ndim == 1 and bd.ndim == 2:
        vjp = lambda g: (bd @ g, np.outer(ad, g))
    else:
        raise ValueError(f"unsupported matmul shapes {ad.shape} @ {bd.shape}")
    return _node(ad @ bd, (a, b), vjp)


# -------------------------------------------------------------- nonlinearity

def relu(x):
    if not _is_tensor_op(x):
        return np.maximum(x, 0.0)
    return _node(np.maximum(x.data, 0.0), (x,), lambda g: (g * (x.data > 0.0),))


def tanh(x):
    if not _is_tensor_op(x):
        return np.tanh(x)
    y = np.tanh(x.data)
    return _node(y, (x,), lambda g: (g * (1.0 - y * y),))


def sigmoid(x):
    if not _is_tensor_op(x):
        return 1.0 / (1.0 + np.exp(-x))
    y = 1.0 / (1.0 + np.exp(-x.data))
    return _node(y, (x,), lambda g: (g * y * (1.0 - y),))


def exp(x):
    if not _is_tensor_op(x):
        return np.exp(x)
    y = np.exp(x.data)
    return _node(y, (x,), lambda g: (g * y,))


def log(x):
    if not _is_tensor_op(x):
        return np.log(x)
    return _node(np.log(x.data), (x,), lambda g: (g / x.data,))


def sqrt(x):
    if not _is_tensor_op(x):
        return np.sqrt(x)
    y = np.sqrt(x.data)
    return _node(y, (x,), lambda g: (g / (2.0 * y),))


def softmax(x, axis: int = -1):
    def _softmax(z):
        e = np.exp(z - z.max(axis=axis, keepdims=True))
        return e / e.sum(axis=axis, keepdims=True)

    if not _is_tensor_op(x):
        return _softmax(x)
    y = _softmax(x.data)

    def vjp(g):
        return (y * (g - (g * y).sum(axis=axis, keepdims=True)),)

    return _node(y, (x,), vjp)


def clip(x, lo: float, hi: float):
    """Clamp values; gradient passes only where the input lies inside [lo, hi]."""
    if not _is_tensor_op(x):
        return np.clip(x, lo, hi)
    mask = (x.data >= lo) & (x.data <= hi)
    return _node(np.clip(x.data, lo, hi), (x,), lambda g: (g * mask,))


# ----------------------------------------------------------------- structure

def tsum(x, axis=None, keepdims: bool = False):
    if not _is_tensor_op(x):
        return np.sum(x, axis=axis, keepdims=keepdims)
    y = x.data.sum(axis=axis, keepdims=keepdims)

    def vjp(g):
        if axis is None:
            return (np.broadcast_to(g, x.data.shape).copy(),)
        gg = g if keepdims else np.expand_dims(g, axis)
        return (np.broadcast_to(gg, x.data.shape).copy(),)

    return _node(y, (x,), vjp)


def tmean(x, axis=None, keepdims: bool = False):
    if not _is_tensor_op(x):
        return np.mean(x, axis=axis, keepdims=keepdims)
    count = x.data.size if axis is None else x.data.shape[axis]
    return div(tsum(x, axis=axis, keepdims=keepdims), float(count))


def reshape(x, shape):
    if not _is_tensor_op(x):
        return np.reshape(x, shape)
    orig = x.data.shape
    return _node(x.data.reshape(shape), (x,), lambda g: (g.reshape(orig),))


def concat(parts, axis: int = -1):
    if not _is_tensor_op(*parts):
        return np.concatenate(parts, axis=axis)
    parts = [_lift(p) for p in parts]
    sizes = [p.data.shape[axis] for p in parts]
    splits = np.cumsum(sizes)[:-1]

    def vjp(g):
        return tuple(np.split(g, splits, axis=axis))

    return _node(np.concatenate([p.data for p in parts], axis=axis), tuple(parts), vjp)


def take_rows(x, idx):
    """Gather rows x[idx]; the gradient scatter-adds back into place."""
    idx = np.asarray(idx)
    if not _is_tensor_op(x):
        return x[idx]

    def vjp(g):
        out = np.zeros_like(x.data)
        np.add.at(out, idx, g)
        return (out,)

    return _node(x.data[idx], (x,), vjp)


def slice_cols(x, start: int, stop: int):
    """Contiguous slice along the last axis."""
    if not _is_tensor_op(x):
        return x[..., start:stop]

    def vjp(g):
        out = np.zeros_like(x.data)
        out[..., start:stop] = g
        return (out,)

    return _node(x.data[..., start:stop], (x,), vjp)
