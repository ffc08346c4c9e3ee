import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gcnembed.corpus import Vocabulary
from gcnembed.evaluation import (SimilarityDataset, cosine, eval_analogy, eval_similarity,
                                 nearest_neighbors, read_analogies, read_similarity, spearman)

import oracles
from helpers import uniform_vocab


class TestCosine:
    def test_examples(self):
        assert cosine([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0)
        assert cosine([1, 0], [0, 1]) == 0.0
        assert cosine([1, 2, 3], [4, 5, 6]) == pytest.approx(32 / (math.sqrt(14) * math.sqrt(77)), rel=1e-12)
        assert cosine([1, 2, 3], [4, 5, 6]) == pytest.approx(0.97463, abs=5e-6)

    def test_zero_vector(self):
        assert cosine([0, 0], [1, 2]) == 0.0

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-10, 10), min_size=3, max_size=3),
           st.lists(st.floats(-10, 10), min_size=3, max_size=3),
           st.floats(0.01, 100), st.floats(0.01, 100))
    def test_scale_invariant(self, u, v, a, b):
        c = cosine(u, v)
        assert -1.0 <= c <= 1.0
        if np.linalg.norm(u) > 1e-3 and np.linalg.norm(v) > 1e-3:
            assert cosine(np.multiply(a, u), np.multiply(b, v)) == pytest.approx(c, abs=1e-12)


class TestSpearman:
    def test_identity_and_reverse(self):
        gold = [0.5, 2.0, 1.0, 7.0]
        assert spearman(gold, gold) == pytest.approx(1.0)
        assert spearman(gold, [-g for g in gold]) == pytest.approx(-1.0)

    def test_ties_example(self):
        gold, pred = [1, 2, 3, 3], [1, 3, 2, 4]
        assert spearman(gold, pred) == pytest.approx(oracles.spearman(gold, pred), rel=1e-12)

    def test_constant_input(self):
        with pytest.raises(ValueError):
            spearman([1, 1, 1], [1, 2, 3])
        with pytest.raises(ValueError):
            spearman([1], [1])

    @pytest.mark.parametrize("seed", range(20))
    def test_rank_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 15))
        gold = rng.integers(0, 5, size=n).astype(float)
        pred = rng.normal(size=n).round(1)
        if len(set(gold)) < 2 or len(set(pred)) < 2:
            pytest.skip("constant draw")
        assert spearman(gold, pred) == pytest.approx(oracles.spearman(gold, pred), abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.integers(-50, 50), st.integers(-50, 50)), min_size=3, max_size=12))
    def test_monotone_invariance(self, rows):
        gold = np.array([r[0] for r in rows], dtype=float)
        pred = np.array([r[1] for r in rows], dtype=float)
        if len(set(gold)) < 2 or len(set(pred)) < 2:
            return
        rho = spearman(gold, pred)
        assert spearman(np.exp(gold / 10), pred ** 3) == pytest.approx(rho, abs=1e-12)


class TestSimilarity:
    def test_perfect(self):
        vocab = uniform_vocab(4)
        E = np.array([[1, 0], [1, 0.1], [1, 1], [0, 1.0]])
        data = SimilarityDataset([("w0", "w1", 9.0), ("w0", "w2", 5.0), ("w0", "w3", 1.0)])
        assert eval_similarity(E, vocab, data) == (pytest.approx(1.0), 1.0)

    def test_coverage(self):
        vocab = uniform_vocab(5)
        rng = np.random.default_rng(0)
        rows = [(f"w{i % 5}", f"w{(i + 1) % 5}", float(i)) for i in range(7)]
        rows += [("w0", "zz", 1.0), ("qq", "w1", 2.0), ("a", "b", 3.0)]
        rho, coverage = eval_similarity(rng.normal(size=(5, 3)), vocab, SimilarityDataset(rows))
        assert coverage == pytest.approx(0.7)

    def test_too_few_rows(self):
        with pytest.raises(ValueError):
            eval_similarity(np.ones((2, 2)), uniform_vocab(2), SimilarityDataset([("w0", "w1", 1.0)]))

    def test_random_fixture_brute_force(self):
        rng = np.random.default_rng(3)
        vocab = uniform_vocab(12)
        E = rng.normal(size=(12, 5))
        rows = [(f"w{a}", f"w{b}", float(rng.uniform(0, 10))) for a, b in rng.integers(12, size=(20, 2))]
        rho, cov = eval_similarity(E, vocab, SimilarityDataset(rows))
        gold = [s for _, _, s in rows]
        pred = [oracles.cosine(E[int(a[1:])], E[int(b[1:])]) for a, b, _ in rows]
        assert cov == 1.0 and rho == pytest.approx(oracles.spearman(gold, pred), abs=1e-12)


class TestAnalogy:
    def test_engineered(self):
        vocab = Vocabulary(["a", "b", "c", "d", "e"], np.ones(5, np.int64))
        E = np.array([[1, 0, 0], [1, 1, 0], [0, 0, 1], [0, 1, 1], [1, 0, 1.0]])
        res = eval_analogy(E, vocab, [("a", "b", "c", "d")])
        assert res.accuracy == 1.0 and res.total == 1

    def test_oov_skipped(self):
        vocab = Vocabulary(["a", "b", "c", "d", "e"], np.ones(5, np.int64))
        E = np.array([[1, 0, 0], [1, 1, 0], [0, 0, 1], [0, 1, 1], [1, 0, 1.0]])
        res = eval_analogy(E, vocab, [("a", "b", "c", "d"), ("a", "b", "c", "zz")])
        assert res.skipped == 1 and res.accuracy == 1.0
        with pytest.raises(ValueError):
            eval_analogy(E, vocab, [("q", "b", "c", "d")])

    @pytest.mark.parametrize("seed", range(10))
    def test_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        vocab = uniform_vocab(8)
        E = rng.normal(size=(8, 4))
        quads = [tuple(f"w{i}" for i in rng.choice(8, 4, replace=False)) for _ in range(5)]
        assert eval_analogy(E, vocab, quads).accuracy == oracles.analogy_accuracy(E.tolist(), vocab.words, quads)

    @pytest.mark.parametrize("seed", range(5))
    def test_rotation_invariant(self, seed):
        rng = np.random.default_rng(seed)
        vocab = uniform_vocab(20)
        E = rng.normal(size=(20, 6))
        Q, _ = np.linalg.qr(rng.normal(size=(6, 6)))
        quads = [tuple(f"w{i}" for i in rng.choice(20, 4, replace=False)) for _ in range(30)]
        quads += [("w0", "w1", "w2", "w3")]
        for method in ("add", "mul"):
            assert eval_analogy(E @ Q, vocab, quads, method).correct == eval_analogy(E, vocab, quads, method).correct

    def test_mul_engineered(self):
        vocab = Vocabulary(["a", "b", "c", "d", "e"], np.ones(5, np.int64))
        E = np.array([[1, 0, 0], [1, 1, 0], [0, 0, 1], [0, 1, 1], [-1, 0, -1.0]])
        assert eval_analogy(E, vocab, [("a", "b", "c", "d")], method="mul").accuracy == 1.0


class TestNearest:
    def test_two_words(self):
        assert nearest_neighbors(np.array([[1, 0], [0, 1.0]]), uniform_vocab(2), "w0", 1)[0][0] == "w1"

    def test_tie_broken_by_id(self):
        E = np.array([[1, 0], [0, 1.0], [0, 2.0], [0, 1.0]])
        hits = nearest_neighbors(E, uniform_vocab(4), "w0", 3)
        assert [w for w, _ in hits] == ["w1", "w2", "w3"]

    def test_errors(self):
        with pytest.raises(KeyError):
            nearest_neighbors(np.eye(2), uniform_vocab(2), "nope", 1)
        with pytest.raises(ValueError):
            nearest_neighbors(np.eye(2), uniform_vocab(2), "w0", 0)

    @pytest.mark.parametrize("seed", range(5))
    def test_full_sort_oracle(self, seed):
        rng = np.random.default_rng(seed)
        vocab = uniform_vocab(50)
        E = rng.normal(size=(50, 8))
        hits = nearest_neighbors(E, vocab, "w7", 10)
        assert [w for w, _ in hits] == oracles.nearest(E.tolist(), vocab.words, "w7", 10)


def test_readers(tmp_path):
    sim = tmp_path / "sim.tsv"
    sim.write_text("# comment\na\tb\t1.5\nc\td\t2\n")
    assert read_similarity(sim).rows == [("a", "b", 1.5), ("c", "d", 2.0)]
    bad = tmp_path / "bad.tsv"
    bad.write_text("a\tb\tx\n")
    with pytest.raises(ValueError, match="bad.tsv:1"):
        read_similarity(bad)
    ana = tmp_path / "ana.txt"
    ana.write_text(": capital\na b c d\n\ne f g h\n")
    assert read_analogies(ana) == [("a", "b", "c", "d"), ("e", "f", "g", "h")]
