"""Retrofitting pre-trained embeddings with a GCN over a typed semantic graph."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .corpus import Vocabulary
from .graph import RELATIONS, EdgeDirection, SemanticGraph, local_subgraph, relation_subset
from .model import GcnConfig, GcnParams, gcn_backward, gcn_forward
from .objective import NoiseTable, target_loss
from .optim import AdamState, adam_step
from .persist import EmbeddingStore

log = logging.getLogger(__name__)


@dataclass
class RetrofitConfig:
    lr: float = 0.001
    epochs: int = 20
    negatives: int = 5
    relations: tuple[str, ...] = RELATIONS
    anchor_weight: float = 1.0
    antonym_repel: float = 0.0
    batch_words: int = 32
    noise_power: float = 0.75
    gating: bool = True
    activation: str = "identity"
    seed: int = 0

    def __post_init__(self):
        self.relations = tuple(r.lower() for r in self.relations)
        if not self.relations:
            raise ValueError("at least one relation must be enabled")
        if not np.isfinite(self.anchor_weight) or self.anchor_weight < 0:
            raise ValueError("anchor_weight must be finite and >= 0")
        if self.negatives < 1 or self.batch_words < 1:
            raise ValueError("negatives and batch_words must be >= 1")


@dataclass
class RetrofitState:
    """Everything a retrofitting run learns besides the final vectors."""

    params: GcnParams
    output: np.ndarray
    config: GcnConfig
    epoch_losses: list[float] = field(default_factory=list)


def _antonym_pairs(graph: SemanticGraph, centers) -> list[tuple[int, int]]:
    if "antonym" not in graph.label_set:
        return []
    ant = graph.label_set.index["antonym"]
    pairs = []
    for c in centers:
        for e in graph.in_edges(int(c)):
            if graph.label[e] == ant and graph.direction[e] == EdgeDirection.FORWARD:
                pairs.append((int(c), int(graph.src[e])))
    return pairs


def _cosine_grad(u, v):
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0, np.zeros_like(u), np.zeros_like(v)
    c = float(u @ v) / (nu * nv)
    return c, v / (nu * nv) - c * u / nu**2, u / (nu * nv) - c * v / nv**2


def prediction_targets(graph: SemanticGraph, word: int) -> np.ndarray:
    """The word itself followed by each word related to it (one entry per relation edge)."""
    idx = graph.in_edges(int(word))
    related = graph.src[idx[graph.direction[idx] == EdgeDirection.FORWARD]]
    return np.concatenate([[word], related]).astype(np.int64)


def draw_negatives(noise: NoiseTable, rng: np.random.Generator, targets, n: int) -> np.ndarray:
    return np.stack([noise.sample(rng, n, exclude=int(t)) for t in targets])


def retrofit_loss(centers, negatives, X, output, params: GcnParams, graph: SemanticGraph,
                  config: GcnConfig, anchor_weight: float, antonym_repel: float = 0.0):
    """Loss for one batch of words and its gradients.

    Each center ``w`` is encoded from its incoming edges as ``h_w``. Its loss
    is the negative-sampling loss of predicting every entry of
    :func:`prediction_targets` (``w`` and its related words) from ``h_w``,
    plus ``anchor_weight * ||h_w - X_w||^2``, plus
    ``antonym_repel * cos(h_w, h_v)`` for every antonym ``v`` of ``w``.
    ``negatives[i]`` holds one row of noise ids per target of ``centers[i]``.

    Returns ``(loss, gcn_grads, out_ids, out_rows)``; ``X`` gets no gradient.
    """
    centers = np.asarray(centers, dtype=np.int64)
    pairs = _antonym_pairs(graph, centers) if antonym_repel > 0 else []
    extra = sorted({v for _, v in pairs} - set(centers.tolist()))
    enc = np.concatenate([centers, np.asarray(extra, dtype=np.int64)])
    sub, nodes = local_subgraph(graph, enc)
    H, tape = gcn_forward(X[nodes], sub, params, config)
    upstream = np.zeros_like(H)
    total = 0.0
    out_ids, out_rows = [], []
    for i, w in enumerate(centers):
        h = H[i]
        diff = h - X[w]
        total += anchor_weight * float(diff @ diff)
        upstream[i] += 2.0 * anchor_weight * diff
        for t, negs in zip(prediction_targets(graph, w), negatives[i]):
            loss, d_h, r_ids, d_r = target_loss(h, t, negs, output)
            total += loss
            upstream[i] += d_h
            out_ids.append(r_ids)
            out_rows.append(d_r)
    if pairs:
        local = {int(g): i for i, g in enumerate(enc)}
        for w, v in pairs:
            c, du, dv = _cosine_grad(H[local[w]], H[local[v]])
            total += antonym_repel * c
            upstream[local[w]] += antonym_repel * du
            upstream[local[v]] += antonym_repel * dv
    grads, _ = gcn_backward(tape, upstream, sub, params)
    return total, grads, np.concatenate(out_ids), np.concatenate(out_rows)


def encode_words(X, words, params: GcnParams, graph: SemanticGraph, config: GcnConfig,
                 chunk: int = 4096) -> np.ndarray:
    out = np.empty((len(words), X.shape[1]))
    for lo in range(0, len(words), chunk):
        centers = words[lo:lo + chunk]
        sub, nodes = local_subgraph(graph, centers)
        H, _ = gcn_forward(X[nodes], sub, params, config)
        out[lo:lo + len(centers)] = H[:len(centers)]
    return out


def retrofit_semgcn(init: EmbeddingStore, sem_graph: SemanticGraph, config: RetrofitConfig,
                    vocab: Vocabulary | None = None,
                    state: RetrofitState | None = None) -> EmbeddingStore:
    """Fine-tune ``init`` against the enabled relations of ``sem_graph``.

    The initial vectors ``X`` stay fixed; a one-layer GCN (fresh Xavier
    weights) and the output table are trained. Words with at least one
    enabled relation edge come out as their encoding ``h_w``; every other
    word is copied from ``X`` unchanged. Pass a :class:`RetrofitState` to get
    the trained weights and per-epoch losses back.
    """
    X = np.asarray(init.input, dtype=np.float64)
    if sem_graph.num_nodes != X.shape[0]:
        raise ValueError(f"semantic graph has {sem_graph.num_nodes} nodes but there are "
                         f"{X.shape[0]} embeddings")
    if vocab is not None and len(vocab) != X.shape[0]:
        raise ValueError("vocabulary does not match the embedding table")
    graph = relation_subset(sem_graph, config.relations)
    connected = graph.connected()
    gcn_config = GcnConfig(dim=X.shape[1], layers=1, gating=config.gating,
                           activation=config.activation)
    rng = np.random.default_rng(config.seed)
    params = GcnParams.init(gcn_config, len(graph.label_set), rng, dtype=np.float64)
    output = np.array(init.output, dtype=np.float64)
    if state is not None:
        state.params, state.output, state.config = params, output, gcn_config
    if len(connected) == 0:
        log.warning("no enabled relation edges; embeddings pass through unchanged")
        return init.copy()
    if vocab is None:
        vocab = Vocabulary([str(i) for i in range(X.shape[0])], np.ones(X.shape[0], np.int64))
    noise = NoiseTable(vocab, config.noise_power)
    adam = AdamState()
    arrays = {**params.as_dict("gcn."), "emb_out": output}
    d_out = np.zeros_like(output)
    for epoch in range(config.epochs):
        erng = np.random.default_rng([config.seed, epoch])
        order = erng.permutation(connected)
        epoch_loss = 0.0
        for lo in range(0, len(order), config.batch_words):
            centers = order[lo:lo + config.batch_words]
            negatives = [draw_negatives(noise, erng, prediction_targets(graph, w), config.negatives)
                         for w in centers]
            loss, grads, out_ids, out_rows = retrofit_loss(
                centers, negatives, X, output, params, graph, gcn_config,
                config.anchor_weight, config.antonym_repel)
            if not np.isfinite(loss):
                raise FloatingPointError(f"non-finite loss in epoch {epoch + 1}")
            epoch_loss += loss
            np.add.at(d_out, out_ids, out_rows)
            rows = np.unique(out_ids)
            adam_step(arrays, {**grads.as_dict("gcn."), "emb_out": d_out}, adam, config.lr,
                      sparse={"emb_out": rows})
            d_out[rows] = 0.0
        mean = epoch_loss / len(connected)
        if state is not None:
            state.epoch_losses.append(mean)
        log.info("epoch %d loss %.6f", epoch + 1, mean)
    result = np.array(init.input, copy=True)
    result[connected] = encode_words(X, connected, params, graph, gcn_config).astype(result.dtype)
    return EmbeddingStore(result, output.astype(init.output.dtype))
