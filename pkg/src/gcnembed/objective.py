"""Negative-sampling objective and its noise distribution."""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from .corpus import Vocabulary


class NoiseTable:
    """Sampler over word ids with probability proportional to ``count ** power``.

    The unk entry never gets drawn.
    """

    def __init__(self, vocab: Vocabulary, power: float = 0.75):
        weights = vocab.counts.astype(np.float64) ** power
        weights[vocab.counts == 0] = 0.0
        if vocab.unk_id is not None:
            weights[vocab.unk_id] = 0.0
        total = weights.sum()
        if total <= 0:
            raise ValueError("noise distribution is empty: all counts are zero")
        self.probs = weights / total
        self._cdf = np.cumsum(self.probs)
        self._cdf[-1] = 1.0

    def __len__(self) -> int:
        return len(self.probs)

    def sample(self, rng: np.random.Generator, size: int, exclude: int | None = None) -> np.ndarray:
        """Draw ``size`` ids, redrawing any that equal ``exclude``."""
        if exclude is not None and self.probs[exclude] >= 1.0:
            raise ValueError(f"cannot draw negatives: word {exclude} carries all noise mass")
        out = np.searchsorted(self._cdf, rng.random(size), side="right")
        if exclude is not None:
            bad = out == exclude
            while bad.any():
                out[bad] = np.searchsorted(self._cdf, rng.random(int(bad.sum())), side="right")
                bad = out == exclude
        return out


def build_noise_table(vocab: Vocabulary, power: float = 0.75) -> NoiseTable:
    return NoiseTable(vocab, power)


def log_sigmoid(x):
    """``log(sigmoid(x))`` without overflow."""
    return -np.logaddexp(0.0, -np.asarray(x, dtype=np.float64))


def target_loss(context_vec, target_id, negative_ids, output_embeddings):
    """Sigmoid negative-sampling loss of predicting ``target_id`` from a context.

    ``L = -log s(o_t . h) - sum_n log s(-o_n . h)``.

    Returns ``(loss, d_context, row_ids, d_rows)``; ``d_rows[i]`` is the
    gradient for output row ``row_ids[i]``. ``row_ids`` is the target followed
    by the negatives, repeats included, so accumulate with ``np.add.at``.
    """
    h = np.asarray(context_vec, dtype=np.float64)
    negative_ids = np.asarray(negative_ids, dtype=np.int64)
    if np.any(negative_ids == target_id):
        raise ValueError("target id appears among the negatives")
    row_ids = np.concatenate([[target_id], negative_ids]).astype(np.int64)
    O = np.asarray(output_embeddings[row_ids], dtype=np.float64)
    scores = O @ h
    # d/ds of -log s(s) is s(s) - 1; of -log s(-s) is s(s)
    loss = float(-log_sigmoid(scores[0]) - log_sigmoid(-scores[1:]).sum())
    coeff = expit(scores)
    coeff[0] -= 1.0
    d_context = coeff @ O
    d_rows = coeff[:, None] * h[None, :]
    return loss, d_context, row_ids, d_rows
