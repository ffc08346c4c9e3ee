"""Embedding tables and their word2vec text serialisation; run manifests."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .corpus import Vocabulary


@dataclass
class EmbeddingStore:
    """Input (context/neighbourhood) and output (target) vectors, one row per word."""

    input: np.ndarray
    output: np.ndarray

    def __post_init__(self):
        if self.input.shape != self.output.shape or self.input.ndim != 2:
            raise ValueError("input and output tables must be 2-d and the same shape")

    @property
    def num_rows(self) -> int:
        return self.input.shape[0] + self.output.shape[0]

    @property
    def dim(self) -> int:
        return self.input.shape[1]

    def copy(self) -> "EmbeddingStore":
        return EmbeddingStore(self.input.copy(), self.output.copy())

    def export(self, which: str = "input") -> np.ndarray:
        if which == "input":
            return self.input
        if which == "output":
            return self.output
        if which == "mean":
            return (self.input.astype(np.float64) + self.output) / 2.0
        raise ValueError(f"unknown export choice {which!r}")


def save_embeddings(store, vocab: Vocabulary, path, which: str = "input") -> None:
    """word2vec text format: ``"<count> <dim>"`` then one word per line, six decimals.

    ``store`` may also be a bare matrix.
    """
    matrix = store.export(which) if isinstance(store, EmbeddingStore) else np.asarray(store)
    if matrix.shape[0] != len(vocab):
        raise ValueError(f"{matrix.shape[0]} vectors for {len(vocab)} words")
    for w in vocab.words:
        if not w or any(c.isspace() for c in w):
            raise ValueError(f"word {w!r} cannot be represented in word2vec text format")
    lines = [f"{matrix.shape[0]} {matrix.shape[1]}\n"]
    for w, row in zip(vocab.words, matrix):
        lines.append(w + " " + " ".join(f"{x:.6f}" for x in row) + "\n")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.writelines(lines)


def load_embeddings(path, dtype=np.float64) -> tuple[np.ndarray, list[str]]:
    """Read a word2vec text file. The ``"<count> <dim>"`` header is optional."""
    words: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    dim = None
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            parts = line.rstrip("\r\n").split(" ")
            if lineno == 1 and len(parts) == 2:
                try:
                    _, dim = int(parts[0]), int(parts[1])
                    continue
                except ValueError:
                    pass
            if not line.strip():
                continue
            word, values = parts[0], [p for p in parts[1:] if p]
            if dim is None:
                dim = len(values)
            if len(values) != dim:
                raise ValueError(f"{path}:{lineno}: expected {dim} values, got {len(values)}")
            if word in seen:
                raise ValueError(f"{path}:{lineno}: duplicate word {word!r}")
            seen.add(word)
            try:
                rows.append(np.array(values, dtype=np.float64))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric value") from None
            words.append(word)
    if not words:
        raise ValueError(f"{path}: no vectors")
    return np.stack(rows).astype(dtype), words


def load_pretrained(path, dtype=np.float64) -> tuple[EmbeddingStore, Vocabulary]:
    """Pre-trained vectors as an :class:`EmbeddingStore` plus vocabulary.

    The output table starts as a copy of the input table. Word counts are
    unknown, so every word gets count 1 (uniform negative sampling).
    """
    matrix, words = load_embeddings(path, dtype)
    vocab = Vocabulary(words, np.ones(len(words), dtype=np.int64))
    return EmbeddingStore(matrix, matrix.copy()), vocab


def write_manifest(path, manifest: dict) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")


def read_manifest(path) -> dict:
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def file_info(path) -> dict:
    return {"path": os.fspath(path), "bytes": os.path.getsize(path)}
