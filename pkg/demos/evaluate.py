"""
Intrinsic evaluation
====================

Similarity correlation, analogies and nearest neighbours on a tiny
hand-made embedding file, run through the same readers the CLI uses.
"""

import tempfile
from pathlib import Path

import numpy as np

from gcnembed.corpus import Vocabulary
from gcnembed.evaluation import eval_analogy, eval_similarity, nearest_neighbors, read_analogies, read_similarity
from gcnembed.persist import load_embeddings, save_embeddings

tmp = Path(tempfile.mkdtemp())

# a gender axis and a royalty axis, plus noise dimensions
words = ["man", "woman", "king", "queen", "boy", "girl", "apple", "pear"]
rng = np.random.default_rng(0)
E = np.zeros((len(words), 6))
E[:, 0] = [1, -1, 1, -1, 1, -1, 0, 0]
E[:, 1] = [0, 0, 1, 1, 0, 0, 0, 0]
E[:, 2] = [0, 0, 0, 0, 0.5, 0.5, 0, 0]
E[6:, 3] = 1.0
E += 0.05 * rng.normal(size=E.shape)
save_embeddings(E, Vocabulary(words, np.ones(len(words), np.int64)), tmp / "toy.txt")

(tmp / "sim.tsv").write_text("man\twoman\t6\nking\tqueen\t7\napple\tpear\t9\nking\tapple\t1\n"
                             "boy\tgirl\t6\nman\tpear\t0.5\nzebra\tman\t3\n")
(tmp / "ana.txt").write_text(": family\nman woman king queen\nman woman boy girl\nking queen man woman\n")

M, vocab_words = load_embeddings(tmp / "toy.txt")
vocab = Vocabulary(vocab_words, np.ones(len(vocab_words), np.int64))

rho, coverage = eval_similarity(M, vocab, read_similarity(tmp / "sim.tsv"))
print(f"similarity: rho {rho:.3f} on {coverage:.0%} of the rows")

for method in ("add", "mul"):
    r = eval_analogy(M, vocab, read_analogies(tmp / "ana.txt"), method=method)
    print(f"analogy ({method}): {r.correct}/{r.total}")

print("nearest to king:", [(w, round(c, 3)) for w, c in nearest_neighbors(M, vocab, "king", 3)])
