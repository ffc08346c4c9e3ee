"""Intrinsic evaluation: word similarity, analogies and nearest neighbours."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .corpus import Vocabulary


@dataclass
class SimilarityDataset:
    rows: list[tuple[str, str, float]]

    def __post_init__(self):
        for w1, w2, score in self.rows:
            if not np.isfinite(score):
                raise ValueError(f"non-finite gold score for ({w1}, {w2})")

    def __len__(self) -> int:
        return len(self.rows)


@dataclass
class AnalogyResult:
    accuracy: float
    correct: int
    total: int
    skipped: int


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.clip(u @ v / (nu * nv), -1.0, 1.0))


def spearman(gold, pred) -> float:
    """Pearson correlation of average-tie ranks."""
    gold = np.asarray(gold, dtype=np.float64)
    pred = np.asarray(pred, dtype=np.float64)
    if gold.shape != pred.shape or gold.ndim != 1:
        raise ValueError("gold and pred must be 1-d and of equal length")
    if len(gold) < 2:
        raise ValueError("need at least two pairs")
    if np.all(gold == gold[0]) or np.all(pred == pred[0]):
        raise ValueError("correlation is undefined for constant input")
    rg = rankdata(gold) - (len(gold) + 1) / 2.0
    rp = rankdata(pred) - (len(pred) + 1) / 2.0
    rho = rg @ rp / np.sqrt((rg @ rg) * (rp @ rp))
    return float(np.clip(rho, -1.0, 1.0))


def eval_similarity(embeddings, vocab: Vocabulary, dataset: SimilarityDataset) -> tuple[float, float]:
    """Spearman correlation between gold scores and cosines, with coverage.

    Rows with an out-of-vocabulary word are skipped.
    """
    if not len(dataset):
        raise ValueError("empty similarity dataset")
    gold, pred = [], []
    for w1, w2, score in dataset.rows:
        if w1 in vocab and w2 in vocab:
            gold.append(score)
            pred.append(cosine(embeddings[vocab.index[w1]], embeddings[vocab.index[w2]]))
    if len(gold) < 2:
        raise ValueError(f"only {len(gold)} usable rows; need at least 2")
    return spearman(gold, pred), len(gold) / len(dataset)


def _unit_rows(E) -> np.ndarray:
    E = np.asarray(E, dtype=np.float64)
    norms = np.linalg.norm(E, axis=1, keepdims=True)
    return np.divide(E, norms, out=np.zeros_like(E), where=norms > 0)


def eval_analogy(embeddings, vocab: Vocabulary, quadruples, method: str = "add") -> AnalogyResult:
    """Answer ``a:b :: c:?`` over the whole vocabulary, excluding a, b and c.

    ``method="add"`` maximises ``cos(x, b - a + c)``; ``"mul"`` maximises
    ``cos'(x,b) cos'(x,c) / (cos'(x,a) + 1e-3)`` with ``cos' = (1 + cos) / 2``.
    """
    if method not in ("add", "mul"):
        raise ValueError(f"unknown analogy method {method!r}")
    E = np.asarray(embeddings, dtype=np.float64)
    U = _unit_rows(E)
    correct = total = skipped = 0
    for quad in quadruples:
        if any(w not in vocab for w in quad):
            skipped += 1
            continue
        a, b, c, d = (vocab.index[w] for w in quad)
        if method == "add":
            target = E[b] - E[a] + E[c]
            n = np.linalg.norm(target)
            scores = U @ (target / n) if n > 0 else np.zeros(len(E))
        else:
            sims = [(1.0 + U @ U[i]) / 2.0 for i in (a, b, c)]
            scores = sims[1] * sims[2] / (sims[0] + 1e-3)
        scores[[a, b, c]] = -np.inf
        total += 1
        correct += int(np.argmax(scores) == d)
    if total == 0:
        raise ValueError("no usable analogy quadruples")
    return AnalogyResult(correct / total, correct, total, skipped)


def nearest_neighbors(embeddings, vocab: Vocabulary, word: str, k: int = 10) -> list[tuple[str, float]]:
    """Top ``k`` words by cosine to ``word`` (itself excluded); ties go to the lower id."""
    if word not in vocab:
        raise KeyError(f"{word!r} is not in the vocabulary")
    if k < 1:
        raise ValueError("k must be >= 1")
    U = _unit_rows(embeddings)
    q = vocab.index[word]
    sims = np.clip(U @ U[q], -1.0, 1.0)
    order = np.lexsort((np.arange(len(sims)), -sims))
    order = order[order != q][:k]
    return [(vocab.words[i], float(sims[i])) for i in order]


def read_similarity(path) -> SimilarityDataset:
    """``word1<TAB>word2<TAB>score`` lines."""
    rows = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'word1<TAB>word2<TAB>score'")
            try:
                rows.append((parts[0], parts[1], float(parts[2])))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad score {parts[2]!r}") from None
    return SimilarityDataset(rows)


def read_analogies(path) -> list[tuple[str, str, str, str]]:
    """Whitespace-separated ``a b c d`` lines; ``:`` section headers are skipped."""
    quads = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            parts = line.split()
            if not parts or parts[0].startswith(":"):
                continue
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected four words")
            quads.append(tuple(parts))
    return quads
