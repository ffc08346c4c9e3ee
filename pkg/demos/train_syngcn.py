"""
Training on dependency contexts
===============================

Two clusters of words that only ever share sentences with their own cluster.
After a short run the cluster structure shows up in the cosine geometry,
and the model still has exactly two vectors per word.
"""

import logging

import numpy as np

from gcnembed.corpus import TokenizedSentence, build_vocabulary
from gcnembed.evaluation import nearest_neighbors
from gcnembed.syngcn import TrainConfig, train_syngcn
from gcnembed.synthetic import planted_clusters

logging.basicConfig(level=logging.INFO, format="%(message)s")

raw, clusters = planted_clusters(num_sentences=600, seed=0)
sentences = [TokenizedSentence(f, h, l) for f, h, l in raw]
vocab = build_vocabulary(sentences, min_count=1)
for s in sentences:
    vocab.encode(s)

config = TrainConfig(dim=16, epochs=30, batch_sentences=16, subsample=1.0, deterministic=True)
model = train_syngcn(sentences, vocab, config)

E = model.store.input / np.linalg.norm(model.store.input, axis=1, keepdims=True)
a = [vocab.index[w] for w in clusters[0]]
b = [vocab.index[w] for w in clusters[1]]
within = (E[a] @ E[a].T)[~np.eye(len(a), dtype=bool)].mean()
across = (E[a] @ E[b].T).mean()
print(f"mean cosine within a cluster {within:.3f}, across clusters {across:.3f}")

print("neighbours of", clusters[0][0], "->",
      [w for w, _ in nearest_neighbors(model.store.input, vocab, clusters[0][0], 5)])

# twelve dependency labels, yet no per-label word entries
print("dependency labels:", len(model.labels) - 2, " embedding rows:", model.store.num_rows, "= 2 x", len(vocab))
