"""Training word embeddings by predicting each word from its GCN-encoded parse context."""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .corpus import TokenizedSentence, Vocabulary, keep_probabilities, read_conllu, select_targets
from .graph import Graph, LabelSet, SentenceGraph, build_sentence_graph, discover_labels
from .model import GcnConfig, GcnParams, gcn_backward, gcn_forward, xavier_init
from .objective import NoiseTable, target_loss
from .optim import AdamState, adam_step
from .persist import EmbeddingStore

log = logging.getLogger(__name__)

THREADS_ENV = "GCNEMBED_THREADS"


@dataclass
class TrainConfig:
    lr: float = 0.001
    dim: int = 300
    negatives: int = 5
    epochs: int = 5
    batch_sentences: int = 128
    noise_power: float = 0.75
    subsample: float = 1e-4
    seed: int = 0
    layers: int = 1
    gating: bool = True
    normalize: bool = False
    mask_targets: bool = True
    deterministic: bool = False
    workers: int | None = None
    dtype: str = "float32"

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.negatives < 1:
            raise ValueError("negatives must be >= 1")
        if self.batch_sentences < 1:
            raise ValueError("batch_sentences must be >= 1")

    @property
    def gcn(self) -> GcnConfig:
        return GcnConfig(dim=self.dim, layers=self.layers, gating=self.gating,
                         normalize=self.normalize)

    def num_workers(self) -> int:
        if self.deterministic:
            return 1
        if self.workers is not None:
            return max(1, self.workers)
        env = os.environ.get(THREADS_ENV)
        return max(1, int(env)) if env else (os.cpu_count() or 1)


@dataclass
class SynGcnModel:
    store: EmbeddingStore
    params: GcnParams
    placeholder: np.ndarray
    labels: LabelSet
    config: GcnConfig
    epoch_losses: list[float] = field(default_factory=list)

    def trainable_arrays(self) -> dict[str, np.ndarray]:
        return {"emb_in": self.store.input, "emb_out": self.store.output,
                "placeholder": self.placeholder, **self.params.as_dict("gcn.")}


@dataclass
class SentenceGrads:
    loss: float
    targets: int
    gcn: GcnParams
    placeholder: np.ndarray
    in_ids: np.ndarray
    in_rows: np.ndarray
    out_ids: np.ndarray
    out_rows: np.ndarray


def init_model(vocab: Vocabulary, labels: LabelSet, config: TrainConfig) -> SynGcnModel:
    rng = np.random.default_rng(config.seed)
    dtype = np.dtype(config.dtype)
    n, d = len(vocab), config.dim
    store = EmbeddingStore(xavier_init(n, d, rng).astype(dtype), xavier_init(n, d, rng).astype(dtype))
    params = GcnParams.init(config.gcn, len(labels), rng, dtype=dtype)
    placeholder = xavier_init(1, d, rng)[0].astype(dtype)
    return SynGcnModel(store, params, placeholder, labels, config.gcn)


def mask_target(node_inputs: np.ndarray, position: int, placeholder: np.ndarray) -> np.ndarray:
    """Copy of ``node_inputs`` with row ``position`` replaced by ``placeholder``."""
    if not 0 <= position < len(node_inputs):
        raise IndexError(f"position {position} out of range")
    out = np.array(node_inputs, copy=True)
    out[position] = placeholder
    return out


def replicate(graph: Graph, copies: int) -> Graph:
    """Disjoint union of ``copies`` copies of ``graph`` (copy ``c`` owns nodes
    ``c*n .. c*n+n-1``), keeping each copy's edge order."""
    n, e = graph.num_nodes, graph.num_edges
    offset = np.repeat(np.arange(copies) * n, e)
    return Graph(n * copies, np.tile(graph.src, copies) + offset, np.tile(graph.dst, copies) + offset,
                 np.tile(graph.label, copies), np.tile(graph.direction, copies), graph.label_set)


def sentence_loss(graph: SentenceGraph, targets, negatives, model: SynGcnModel,
                  mask: bool = True, grads: bool = True) -> SentenceGrads | float:
    """Summed prediction loss over ``targets`` with fixed ``negatives`` (one
    row of ids per target) and its gradients.

    Every target gets its own encoding of the sentence, with the target's
    input row swapped for the placeholder when ``mask`` is set. The copies
    are batched as one disjoint graph. With ``grads=False`` only the loss
    is returned.
    """
    ids = graph.node_word_ids
    n, d = graph.num_nodes, model.params.dim
    T = len(targets)
    if T == 0:
        if not grads:
            return 0.0
        z = np.zeros((0, d))
        return SentenceGrads(0.0, 0, model.params.zeros_like(), np.zeros(d),
                             np.zeros(0, np.int64), z, np.zeros(0, np.int64), z)
    if ids.min() < 0 or ids.max() >= len(model.store.input):
        raise ValueError("sentence holds ids outside the vocabulary")
    targets = np.asarray(targets, dtype=np.int64)
    big = replicate(graph, T)
    rows = np.arange(T) * n + targets
    X = np.tile(model.store.input[ids].astype(np.float64), (T, 1))
    if mask:
        X[rows] = model.placeholder
    H, tape = gcn_forward(X, big, model.params, model.config)
    if not grads:
        return float(sum(target_loss(H[rows[c]], ids[targets[c]], negatives[c],
                                     model.store.output)[0] for c in range(T)))
    upstream = np.zeros_like(H)
    total = 0.0
    out_ids, out_rows = [], []
    for c in range(T):
        loss, d_ctx, r_ids, d_r = target_loss(H[rows[c]], ids[targets[c]], negatives[c],
                                              model.store.output)
        total += loss
        upstream[rows[c]] = d_ctx
        out_ids.append(r_ids)
        out_rows.append(d_r)
    gcn_grads, dX = gcn_backward(tape, upstream, big, model.params)
    tiled = np.tile(ids, T)
    if mask:
        keep = np.ones(len(tiled), dtype=bool)
        keep[rows] = False
        d_place = dX[rows].sum(axis=0)
        in_ids, in_rows = tiled[keep], dX[keep]
    else:
        d_place = np.zeros(d)
        in_ids, in_rows = tiled, dX
    return SentenceGrads(total, T, gcn_grads, d_place, in_ids, in_rows,
                         np.concatenate(out_ids), np.concatenate(out_rows))


def _sentence_step(args):
    graph, model, vocab, keep, noise, config, epoch, index = args
    rng = np.random.default_rng([config.seed, epoch, index])
    sentence = TokenizedSentence([], [], [], token_ids=list(graph.node_word_ids))
    targets = select_targets(sentence, vocab, config.subsample, rng, keep=keep)
    ids = graph.node_word_ids
    negatives = [noise.sample(rng, config.negatives, exclude=int(ids[t])) for t in targets]
    return sentence_loss(graph, targets, negatives, model, mask=config.mask_targets)


def load_corpus(corpus, vocab: Vocabulary, lowercase: bool = True) -> list[TokenizedSentence]:
    if isinstance(corpus, (str, os.PathLike)):
        sentences, errors = read_conllu(corpus, vocab, lowercase)
        for err in errors:
            log.warning("%s: skipped sentence (%s)", corpus, err)
        return sentences
    return [s if s.token_ids is not None else vocab.encode(s) for s in corpus]


def train_syngcn(corpus, vocab: Vocabulary, config: TrainConfig,
                 labels: LabelSet | None = None, lowercase: bool = True) -> SynGcnModel:
    """Train input/output embeddings and GCN weights on a parsed corpus.

    ``corpus`` is a CoNLL-U path or a list of sentences. Each epoch visits
    sentences in file order, batches of ``batch_sentences`` are merged by
    summation in that order and followed by a single Adam step, so the
    result does not depend on the worker count.
    """
    sentences = load_corpus(corpus, vocab, lowercase)
    if labels is None:
        labels = discover_labels(sentences)
    graphs = [build_sentence_graph(s, labels) for s in sentences]
    model = init_model(vocab, labels, config)
    noise = NoiseTable(vocab, config.noise_power)
    keep = keep_probabilities(vocab, config.subsample)
    state = AdamState()
    arrays = model.trainable_arrays()
    d_in = np.zeros(model.store.input.shape)
    d_out = np.zeros(model.store.output.shape)
    workers = config.num_workers()
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for epoch in range(config.epochs):
            start = time.perf_counter()
            epoch_loss, epoch_targets, tokens = 0.0, 0, 0
            for lo in range(0, len(graphs), config.batch_sentences):
                batch = [(graphs[i], model, vocab, keep, noise, config, epoch, i)
                         for i in range(lo, min(lo + config.batch_sentences, len(graphs)))]
                results = list(pool.map(_sentence_step, batch)) if pool else [_sentence_step(b) for b in batch]
                gcn = model.params.zeros_like()
                d_place = np.zeros(config.dim)
                for r in results:
                    epoch_loss += r.loss
                    epoch_targets += r.targets
                    gcn += r.gcn
                    d_place += r.placeholder
                    np.add.at(d_in, r.in_ids, r.in_rows)
                    np.add.at(d_out, r.out_ids, r.out_rows)
                tokens += sum(b[0].num_nodes for b in batch)
                if not np.isfinite(epoch_loss):
                    raise FloatingPointError(f"non-finite loss in epoch {epoch + 1} "
                                             f"at sentence {lo}")
                in_rows = np.unique(np.concatenate([r.in_ids for r in results]))
                out_rows = np.unique(np.concatenate([r.out_ids for r in results]))
                grads = {"emb_in": d_in, "emb_out": d_out, "placeholder": d_place,
                         **gcn.as_dict("gcn.")}
                adam_step(arrays, grads, state, config.lr,
                          sparse={"emb_in": in_rows, "emb_out": out_rows})
                d_in[in_rows] = 0.0
                d_out[out_rows] = 0.0
            mean = epoch_loss / max(epoch_targets, 1)
            model.epoch_losses.append(mean)
            rate = tokens / max(time.perf_counter() - start, 1e-9)
            log.info("epoch %d loss %.6f tokens/s %.0f", epoch + 1, mean, rate)
    finally:
        if pool:
            pool.shutdown()
    return model
