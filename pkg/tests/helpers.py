import numpy as np

from gcnembed.corpus import TokenizedSentence, Vocabulary
from gcnembed.graph import LabelSet, build_sentence_graph
from gcnembed.model import GcnParams
from gcnembed.synthetic import random_tree


def random_sentence(rng, n, vocab_size, labels=("nsubj", "obj", "amod", "nmod")):
    heads = random_tree(n, rng)
    labs = ["root" if h == 0 else labels[rng.integers(len(labels))] for h in heads]
    ids = [int(i) for i in rng.integers(vocab_size, size=n)]
    return TokenizedSentence([f"w{i}" for i in ids], heads, labs, token_ids=ids)


def random_graph(rng, n, labels=None):
    labels = labels or LabelSet.for_dependencies(["nsubj", "obj", "amod", "nmod"]).freeze()
    return build_sentence_graph(random_sentence(rng, n, 10), labels)


def random_params(rng, config, num_labels, scale=1.0):
    p = GcnParams.init(config, num_labels, rng, dtype=np.float64)
    p.b[...] = rng.normal(scale=0.3 * scale, size=p.b.shape)
    p.gate_b[...] = rng.normal(scale=0.5 * scale, size=p.gate_b.shape)
    return p


def uniform_vocab(n):
    return Vocabulary([f"w{i}" for i in range(n)], np.ones(n, dtype=np.int64))


def planted_corpus(seed=0, num_sentences=600, words_per_cluster=30):
    from gcnembed.corpus import build_vocabulary
    from gcnembed.synthetic import planted_clusters

    raw, clusters = planted_clusters(words_per_cluster=words_per_cluster,
                                     num_sentences=num_sentences, seed=seed)
    sentences = [TokenizedSentence(f, h, l) for f, h, l in raw]
    vocab = build_vocabulary(sentences, min_count=1)
    for s in sentences:
        vocab.encode(s)
    return sentences, vocab, clusters


def cluster_gap(E, vocab, clusters):
    """Mean intra-cluster cosine minus mean inter-cluster cosine."""
    E = E / np.linalg.norm(E, axis=1, keepdims=True)
    ids = [[vocab.index[w] for w in c] for c in clusters]
    intra, inter = [], []
    for a in range(len(ids)):
        for b in range(len(ids)):
            S = E[ids[a]] @ E[ids[b]].T
            if a == b:
                intra.append(S[~np.eye(len(ids[a]), dtype=bool)].mean())
            else:
                inter.append(S.mean())
    return float(np.mean(intra) - np.mean(inter))
