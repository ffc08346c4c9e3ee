"""Gated, direction-aware graph convolution with a hand-written backward pass.

One layer computes, for every node ``v``::

    h_v' = relu( sum_{(u, label, dir) -> v}  g_e * (W[dir] @ h_u + b[label, dir]) )
    g_e  = sigmoid(gate_w[dir] . h_u + gate_b[label, dir])

where the sum runs over the edges flowing into ``v`` (its self-loop
included). With ``gating=False`` every ``g_e`` is 1. With ``normalize=True``
each sum is divided by the in-degree of ``v``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, fields

import numpy as np
from scipy.special import expit

from .graph import Graph, LabelSet

NUM_DIRECTIONS = 3


@dataclass(frozen=True)
class GcnConfig:
    dim: int = 300
    layers: int = 1
    gating: bool = True
    normalize: bool = False
    activation: str = "relu"

    def __post_init__(self):
        if self.dim < 1 or self.layers < 1:
            raise ValueError("dim and layers must be >= 1")
        if self.activation not in ("relu", "identity"):
            raise ValueError(f"unknown activation {self.activation!r}")


@dataclass
class GcnParams:
    """Weights for all layers, stacked along the leading axis.

    ``W``: (k, 3, d, d), ``b``: (k, L, 3, d), ``gate_w``: (k, 3, d),
    ``gate_b``: (k, L, 3) for ``k`` layers and ``L`` labels.
    """

    W: np.ndarray
    b: np.ndarray
    gate_w: np.ndarray
    gate_b: np.ndarray

    @classmethod
    def init(cls, config: GcnConfig, num_labels: int, rng: np.random.Generator,
             dtype=np.float32) -> "GcnParams":
        k, d = config.layers, config.dim
        W = np.stack([np.stack([xavier_init(d, d, rng) for _ in range(NUM_DIRECTIONS)])
                      for _ in range(k)])
        gate_w = np.stack([np.stack([xavier_init(1, d, rng)[0] for _ in range(NUM_DIRECTIONS)])
                           for _ in range(k)])
        return cls(W.astype(dtype), np.zeros((k, num_labels, NUM_DIRECTIONS, d), dtype),
                   gate_w.astype(dtype), np.zeros((k, num_labels, NUM_DIRECTIONS), dtype))

    @classmethod
    def zeros(cls, config: GcnConfig, num_labels: int, dtype=np.float64) -> "GcnParams":
        k, d = config.layers, config.dim
        return cls(np.zeros((k, NUM_DIRECTIONS, d, d), dtype),
                   np.zeros((k, num_labels, NUM_DIRECTIONS, d), dtype),
                   np.zeros((k, NUM_DIRECTIONS, d), dtype),
                   np.zeros((k, num_labels, NUM_DIRECTIONS), dtype))

    def zeros_like(self, dtype=np.float64) -> "GcnParams":
        return GcnParams(*(np.zeros_like(a, dtype=dtype) for a in self.arrays()))

    def copy(self) -> "GcnParams":
        return GcnParams(*(a.copy() for a in self.arrays()))

    def astype(self, dtype) -> "GcnParams":
        return GcnParams(*(a.astype(dtype) for a in self.arrays()))

    def arrays(self) -> tuple[np.ndarray, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    def as_dict(self, prefix: str = "") -> dict[str, np.ndarray]:
        return {prefix + f.name: getattr(self, f.name) for f in fields(self)}

    @property
    def layers(self) -> int:
        return self.W.shape[0]

    @property
    def dim(self) -> int:
        return self.W.shape[-1]

    @property
    def num_labels(self) -> int:
        return self.b.shape[1]

    def num_parameters(self) -> int:
        return sum(a.size for a in self.arrays())

    def __iadd__(self, other: "GcnParams") -> "GcnParams":
        for a, o in zip(self.arrays(), other.arrays()):
            a += o
        return self


def parameter_count(dim: int, layers: int, num_labels: int) -> int:
    d, L = dim, num_labels
    return layers * (3 * d * d + L * 3 * d + 3 * d + 3 * L)


def xavier_init(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples on ``[-a, a]`` with ``a = sqrt(6 / (rows + cols))``."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    a = np.sqrt(6.0 / (rows + cols))
    return rng.uniform(-a, a, size=(rows, cols))


def gate(h_u: np.ndarray, label: int, direction: int, params: GcnParams, layer: int = 0) -> float:
    z = float(np.dot(params.gate_w[layer, direction], h_u)) + float(params.gate_b[layer, label, direction])
    return float(expit(z))


@dataclass
class LayerTape:
    h_in: np.ndarray
    msg: np.ndarray
    gate: np.ndarray
    coef: np.ndarray
    pre: np.ndarray


@dataclass
class ForwardTape:
    num_nodes: int
    num_edges: int
    config: GcnConfig
    norm: np.ndarray
    layers: list[LayerTape]


def _check_graph(graph: Graph, params: GcnParams):
    if graph.num_edges and graph.label.max() >= params.num_labels:
        raise ValueError(f"graph uses label id {graph.label.max()} but params hold "
                         f"{params.num_labels} labels")


def _activate(pre: np.ndarray, config: GcnConfig) -> np.ndarray:
    return np.maximum(pre, 0.0) if config.activation == "relu" else pre.copy()


def gcn_forward(node_inputs: np.ndarray, graph: Graph, params: GcnParams,
                config: GcnConfig) -> tuple[np.ndarray, ForwardTape]:
    """Run ``config.layers`` propagation steps; computation is in float64."""
    H = np.asarray(node_inputs, dtype=np.float64)
    if H.shape != (graph.num_nodes, params.dim):
        raise ValueError(f"node_inputs has shape {H.shape}, expected "
                         f"{(graph.num_nodes, params.dim)}")
    if params.layers < config.layers:
        raise ValueError("params hold fewer layers than the config asks for")
    _check_graph(graph, params)
    src, dst, lab, dirs = graph.src, graph.dst, graph.label, graph.direction
    if config.normalize:
        norm = 1.0 / np.maximum(graph.in_degree(), 1)
    else:
        norm = np.ones(graph.num_nodes)
    masks = graph.direction_masks
    tape = ForwardTape(graph.num_nodes, graph.num_edges, config, norm, [])
    for l in range(config.layers):
        W = params.W[l].astype(np.float64)
        Hs = H[src]
        msg = np.empty((graph.num_edges, params.dim))
        for r, m in enumerate(masks):
            msg[m] = Hs[m] @ W[r].T
        msg += params.b[l, lab, dirs]
        if config.gating:
            z = np.einsum("ed,ed->e", Hs, params.gate_w[l, dirs].astype(np.float64))
            g = expit(z + params.gate_b[l, lab, dirs])
        else:
            g = np.ones(graph.num_edges)
        coef = g * norm[dst]
        pre = np.zeros((graph.num_nodes, params.dim))
        np.add.at(pre, dst, coef[:, None] * msg)
        tape.layers.append(LayerTape(H, msg, g, coef, pre))
        H = _activate(pre, config)
    return H, tape


def gcn_backward(tape: ForwardTape, upstream_grads: np.ndarray, graph: Graph,
                 params: GcnParams) -> tuple[GcnParams, np.ndarray]:
    """Gradients of ``sum(upstream_grads * h_out)`` w.r.t. params and inputs."""
    if tape.num_nodes != graph.num_nodes or tape.num_edges != graph.num_edges:
        raise ValueError("tape was recorded on a different graph")
    G = np.asarray(upstream_grads, dtype=np.float64)
    if G.shape != (graph.num_nodes, params.dim):
        raise ValueError(f"upstream_grads has shape {G.shape}")
    config = tape.config
    src, dst, lab, dirs = graph.src, graph.dst, graph.label, graph.direction
    masks = graph.direction_masks
    grads = params.zeros_like()
    for l in reversed(range(config.layers)):
        t = tape.layers[l]
        dpre = G * (t.pre > 0) if config.activation == "relu" else G
        dpd = dpre[dst]
        dmsg = t.coef[:, None] * dpd
        Hs = t.h_in[src]
        W = params.W[l].astype(np.float64)
        dHs = np.empty_like(Hs)
        for r, m in enumerate(masks):
            grads.W[l, r] = dmsg[m].T @ Hs[m]
            dHs[m] = dmsg[m] @ W[r]
        np.add.at(grads.b[l], (lab, dirs), dmsg)
        if config.gating:
            dg = np.einsum("ed,ed->e", dpd, t.msg) * tape.norm[dst]
            dz = dg * t.gate * (1.0 - t.gate)
            np.add.at(grads.gate_w[l], dirs, dz[:, None] * Hs)
            np.add.at(grads.gate_b[l], (lab, dirs), dz)
            dHs += dz[:, None] * params.gate_w[l, dirs]
        G = np.zeros_like(t.h_in)
        np.add.at(G, src, dHs)
    return grads, G


# Checkpoint layout (all little-endian):
#   8s   magic b"GCNPARAM"
#   u32  version (1)
#   u32  dim, u32 layers, u32 num_labels, u32 flags (bit0 gating, bit1 normalize,
#        bit2 identity activation)
#   num_labels x (u32 byte length, utf-8 bytes)      label inventory in id order
#   f32  W[k,3,d,d], b[k,L,3,d], gate_w[k,3,d], gate_b[k,L,3]   C order
MAGIC = b"GCNPARAM"
VERSION = 1


def save_checkpoint(path, params: GcnParams, config: GcnConfig, labels: LabelSet) -> None:
    if len(labels) != params.num_labels:
        raise ValueError("label inventory does not match parameter shapes")
    flags = int(config.gating) | int(config.normalize) << 1 | int(config.activation == "identity") << 2
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<5I", VERSION, params.dim, params.layers, params.num_labels, flags))
        for name in labels.labels:
            raw = name.encode("utf-8")
            f.write(struct.pack("<I", len(raw)))
            f.write(raw)
        for a in params.arrays():
            f.write(np.ascontiguousarray(a, dtype="<f4").tobytes())


def load_checkpoint(path) -> tuple[GcnParams, GcnConfig, LabelSet]:
    with open(path, "rb") as f:
        data = f.read()
    if data[:8] != MAGIC:
        raise ValueError(f"{path}: not a parameter checkpoint")
    version, d, k, L, flags = struct.unpack_from("<5I", data, 8)
    if version != VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    pos = 8 + 20
    names = []
    for _ in range(L):
        (n,) = struct.unpack_from("<I", data, pos)
        names.append(data[pos + 4:pos + 4 + n].decode("utf-8"))
        pos += 4 + n
    shapes = [(k, 3, d, d), (k, L, 3, d), (k, 3, d), (k, L, 3)]
    arrays = []
    for shape in shapes:
        size = int(np.prod(shape))
        arrays.append(np.frombuffer(data, dtype="<f4", count=size, offset=pos).reshape(shape).astype(np.float32))
        pos += 4 * size
    if pos != len(data):
        raise ValueError(f"{path}: trailing bytes in checkpoint")
    config = GcnConfig(dim=d, layers=k, gating=bool(flags & 1), normalize=bool(flags & 2),
                       activation="identity" if flags & 4 else "relu")
    labels = LabelSet()
    for name in names[1:]:
        labels.add(name)
    if labels.labels != names:
        raise ValueError(f"{path}: label inventory must start with 'self'")
    return GcnParams(*arrays), config, labels.freeze()
