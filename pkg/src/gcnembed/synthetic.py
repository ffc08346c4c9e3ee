"""Small synthetic corpora and lexicons with planted structure."""

from __future__ import annotations

import numpy as np

DEPENDENCY_LABELS = ("nsubj", "obj", "iobj", "nmod", "amod", "advmod",
                     "det", "case", "compound", "conj", "xcomp", "obl")


def random_tree(n: int, rng: np.random.Generator) -> list[int]:
    """1-based CoNLL-U heads of a random tree rooted at a random token."""
    order = rng.permutation(n)
    heads = [0] * n
    for k in range(1, n):
        heads[order[k]] = int(order[rng.integers(k)]) + 1
    return heads


def to_conllu(sentences) -> str:
    """Render ``(forms, heads, labels)`` triples as CoNLL-U text."""
    blocks = []
    for forms, heads, labels in sentences:
        lines = [f"{i}\t{w}\t{w}\tX\tX\t_\t{h}\t{l}\t_\t_"
                 for i, (w, h, l) in enumerate(zip(forms, heads, labels), 1)]
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def planted_clusters(num_clusters: int = 2, words_per_cluster: int = 30,
                     num_sentences: int = 600, min_len: int = 3, max_len: int = 6,
                     labels=DEPENDENCY_LABELS, seed: int = 0):
    """Sentences whose tokens all come from a single cluster.

    Returns ``(sentences, clusters)``: ``(forms, heads, labels)`` triples and
    the list of word lists per cluster. Cluster ``c`` words are named
    ``c{c}w{i}``.
    """
    rng = np.random.default_rng(seed)
    clusters = [[f"c{c}w{i:02d}" for i in range(words_per_cluster)] for c in range(num_clusters)]
    sentences = []
    for s in range(num_sentences):
        words = clusters[s % num_clusters]
        n = int(rng.integers(min_len, max_len + 1))
        forms = [words[i] for i in rng.choice(len(words), size=n, replace=False)]
        heads = random_tree(n, rng)
        labs = [("root" if h == 0 else labels[rng.integers(len(labels))]) for h in heads]
        sentences.append((forms, heads, labs))
    return sentences, clusters


def planted_synonyms(num_words: int = 40, num_pairs: int = 10, dim: int = 16, seed: int = 0):
    """Random Gaussian vectors plus disjoint synonym pairs over the first
    ``2 * num_pairs`` words. Returns ``(words, vectors, pairs)``."""
    rng = np.random.default_rng(seed)
    words = [f"w{i:03d}" for i in range(num_words)]
    vectors = rng.normal(size=(num_words, dim))
    pairs = [("synonym", words[2 * i], words[2 * i + 1]) for i in range(num_pairs)]
    return words, vectors, pairs
