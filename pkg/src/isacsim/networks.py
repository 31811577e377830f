"""Feed-forward networks: containers, init, forward pass, Adam, checkpoints.

All networks are plain MLPs with ReLU hidden layers and one of a small set of
output activations.  Parameters live as float64 arrays; during training they
are lifted into autodiff Tensors (see lift_parameters / detach_parameters) so
the same forward() serves both the fast evaluation path and the tape.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from isacsim import autodiff as ad
from isacsim.rng import Rng

OUTPUT_ACTIVATIONS = ("linear", "sigmoid", "scaled-tanh", "relu-floor", "softmax")

# floor added to the ReLU output of the uncertainty head; keeps sigma > 0 and
# sits well below the achievable angle RMSE (~0.03 rad)
SIGMA_FLOOR = 1e-4

CHECKPOINT_MAGIC = b"ISACAE01"


@dataclass
class Mlp:
    """One network: dims (d_in, hidden..., d_out), per-layer weights/biases.

    weights[i] has shape (dims[i], dims[i+1]); entries are float64 ndarrays or
    autodiff Tensors wrapping them while a training tape is active.
    """

    layer_dims: tuple
    weights: list = field(repr=False)
    biases: list = field(repr=False)
    output_activation: str = "linear"

    def __post_init__(self):
        if len(self.layer_dims) < 2 or any(d < 1 for d in self.layer_dims):
            raise ValueError(f"bad layer dims {self.layer_dims}")
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(f"unknown output activation {self.output_activation!r}")


def param_count(layer_dims) -> int:
    """Total parameter count sum(d_in * d_out + d_out) over layers."""
    return sum(i * o + o for i, o in zip(layer_dims[:-1], layer_dims[1:]))


def init(rng: Rng, layer_dims, output_activation: str = "linear") -> Mlp:
    """Glorot-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases."""
    weights, biases = [], []
    for d_in, d_out in zip(layer_dims[:-1], layer_dims[1:]):
        limit = np.sqrt(6.0 / (d_in + d_out))
        weights.append(rng.uniform(-limit, limit, size=(d_in, d_out)))
        biases.append(np.zeros(d_out))
    return Mlp(tuple(layer_dims), weights, biases, output_activation)


def forward(net: Mlp, x):
    """Evaluate the network on a (n, d_in) batch; ReLU hidden layers.

    Accepts an ndarray (returns an ndarray) or an autodiff Tensor (extends the
    tape).  Lifted parameters likewise pull plain inputs onto the tape.
    """
    if x.shape[-1] != net.layer_dims[0]:
        raise ValueError(f"input width {x.shape[-1]} != {net.layer_dims[0]}")
    h = x
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        h = ad.add(ad.matmul(h, w), b)
        if i < last:
            h = ad.relu(h)
    act = net.output_activation
    if act == "linear":
        return h
    if act == "sigmoid":
        return ad.sigmoid(h)
    if act == "scaled-tanh":
        return ad.mul(np.pi / 2.0, ad.tanh(h))
    if act == "relu-floor":
        return ad.add(ad.relu(h), SIGMA_FLOOR)
    return ad.softmax(h, axis=-1)


def parameters(net: Mlp) -> list:
    """Flat list of the network's parameter arrays/Tensors (weights then biases per layer)."""
    out = []
    for w, b in zip(net.weights, net.biases):
        out.extend((w, b))
    return out


def lift_parameters(nets) -> list:
    """Wrap every parameter of the given nets in a grad-requiring Tensor, in place."""
    lifted = []
    for net in nets:
        net.weights = [p if isinstance(p, ad.Tensor) else ad.Tensor(p, requires_grad=True)
                       for p in net.weights]
        net.biases = [p if isinstance(p, ad.Tensor) else ad.Tensor(p, requires_grad=True)
                      for p in net.biases]
        lifted.extend(parameters(net))
    return lifted


def detach_parameters(nets) -> None:
    """Unwrap Tensors back to plain arrays, in place."""
    for net in nets:
        net.weights = [p.data if isinstance(p, ad.Tensor) else p for p in net.weights]
        net.biases = [p.data if isinstance(p, ad.Tensor) else p for p in net.biases]


# ------------------------------------------------------------------ optimizer

@dataclass
class AdamState:
    """Adam accumulators; shapes mirror the parameter list passed to adam_init."""

    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step_count: int = 0
    m: list = field(default_factory=list, repr=False)
    v: list = field(default_factory=list, repr=False)


def adam_init(params, learning_rate: float = 0.01) -> AdamState:
    state = AdamState(learning_rate=learning_rate)
    state.m = [np.zeros_like(_data(p)) for p in params]
    state.v = [np.zeros_like(_data(p)) for p in params]
    return state


def adam_step(state: AdamState, params, grads) -> None:
    """One Adam update with bias correction; parameters change in place."""
    if len(params) != len(state.m) or len(grads) != len(params):
        raise ValueError("parameter/gradient count does not match optimizer state")
    state.step_count += 1
    t = state.step_count
    b1, b2 = state.beta1, state.beta2
    for p, g, m, v in zip(params, grads, state.m, state.v):
        p = _data(p)
        g = np.zeros_like(p) if g is None else g
        if g.shape != p.shape:
            raise ValueError(f"gradient shape {g.shape} != parameter shape {p.shape}")
        m[...] = b1 * m + (1.0 - b1) * g
        v[...] = b2 * v + (1.0 - b2) * g * g
        m_hat = m / (1.0 - b1**t)
        v_hat = v / (1.0 - b2**t)
        p -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.eps)


def _data(p) -> np.ndarray:
    return p.data if isinstance(p, ad.Tensor) else p


# ----------------------------------------------------------------- checkpoint

def write_checkpoint(path, nets) -> None:
    """Serialize networks: magic, then per net a layer count (u32 LE), the
    layer_count+1 dims (u32 LE each), and per layer row-major float64 LE
    weights followed by biases."""
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        for net in nets:
            dims = net.layer_dims
            fh.write(struct.pack("<I", len(dims) - 1))
            fh.write(struct.pack(f"<{len(dims)}I", *dims))
            for w, b in zip(net.weights, net.biases):
                fh.write(_data(w).astype("<f8").tobytes(order="C"))
                fh.write(_data(b).astype("<f8").tobytes(order="C"))


def read_checkpoint(path, output_activations) -> list:
    """Read networks back; output activations are structural, supplied by the caller."""
    nets = []
    with open(path, "rb") as fh:
        if fh.read(len(CHECKPOINT_MAGIC)) != CHECKPOINT_MAGIC:
            raise ValueError(f"{path}: not a model checkpoint")

        def chunk(nbytes: int) -> bytes:
            raw = fh.read(nbytes)
            if len(raw) < nbytes:
                raise ValueError(f"{path}: truncated checkpoint")
            return raw

        for act in output_activations:
            n_layers = struct.unpack("<I", chunk(4))[0]
            dims = struct.unpack(f"<{n_layers + 1}I", chunk(4 * (n_layers + 1)))
            weights, biases = [], []
            for d_in, d_out in zip(dims[:-1], dims[1:]):
                w = np.frombuffer(chunk(8 * d_in * d_out), dtype="<f8")
                weights.append(w.reshape(d_in, d_out).copy())
                biases.append(np.frombuffer(chunk(8 * d_out), dtype="<f8").copy())
            nets.append(Mlp(tuple(dims), weights, biases, act))
        if fh.read(1):
            raise ValueError(f"{path}: trailing bytes after checkpoint payload")
    return nets
