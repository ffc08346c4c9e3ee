import numpy as np
import pytest

from gcnembed.corpus import TokenizedSentence, Vocabulary
from gcnembed.graph import (SELF, UNK_LABEL, EdgeDirection as D, LabelSet, build_semantic_graph,
                            build_sentence_graph, discover_labels, local_subgraph, neighborhood,
                            read_lexicon, relation_subset, write_lexicon)

import oracles
from helpers import random_graph, uniform_vocab


def sentence(heads, labels):
    n = len(heads)
    return TokenizedSentence([f"t{i}" for i in range(n)], heads, labels, token_ids=list(range(n)))


@pytest.fixture
def dep_labels():
    return LabelSet.for_dependencies(["nsubj", "obj"])


class TestLabelSet:
    def test_reserved(self):
        labels = LabelSet.for_dependencies(["nsubj"])
        assert labels.labels == [SELF, UNK_LABEL, "nsubj"]
        assert labels.index[SELF] == 0

    def test_frozen_maps_unknown_to_unk_label(self, dep_labels):
        dep_labels.freeze()
        assert dep_labels.get("iobj") == dep_labels.index[UNK_LABEL]
        with pytest.raises(KeyError):
            dep_labels.add("iobj")

    def test_discovery(self):
        s = [sentence([2, 0], ["nsubj", "root"]), sentence([0, 1, 1], ["root", "obj", "amod"])]
        labels = discover_labels(s)
        assert labels.frozen
        assert labels.labels == [SELF, UNK_LABEL, "nsubj", "obj", "amod"]


class TestSentenceGraph:
    def test_two_tokens(self, dep_labels):
        g = build_sentence_graph(sentence([2, 0], ["nsubj", "root"]), dep_labels)
        ns, self_id = dep_labels.index["nsubj"], dep_labels.index[SELF]
        assert sorted(g.edges()) == sorted([(1, 0, ns, D.FORWARD), (0, 1, ns, D.INVERSE),
                                            (0, 0, self_id, D.SELF_LOOP), (1, 1, self_id, D.SELF_LOOP)])

    def test_single_token(self, dep_labels):
        g = build_sentence_graph(sentence([0], ["root"]), dep_labels)
        assert g.edges() == [(0, 0, 0, D.SELF_LOOP)]

    def test_chain_of_five(self, dep_labels):
        g = build_sentence_graph(sentence([0, 1, 2, 3, 4], ["root"] + ["obj"] * 4), dep_labels)
        assert g.num_edges == 13
        assert g.count(D.FORWARD) == 4 and g.count(D.INVERSE) == 4 and g.count(D.SELF_LOOP) == 5

    def test_bad_head(self, dep_labels):
        with pytest.raises(ValueError, match="token 2"):
            build_sentence_graph(sentence([0, 7], ["root", "obj"]), dep_labels)

    def test_unseen_label_added_while_unfrozen(self, dep_labels):
        build_sentence_graph(sentence([0, 1], ["root", "xcomp"]), dep_labels)
        assert "xcomp" in dep_labels

    @pytest.mark.parametrize("seed", range(20))
    def test_invariants(self, seed):
        g = random_graph(np.random.default_rng(seed), 2 + seed % 9)
        edges = g.edges()
        loops = [e for e in edges if e[3] == D.SELF_LOOP]
        assert sorted(e[0] for e in loops) == list(range(g.num_nodes))
        assert all(e[0] == e[1] and e[2] == g.label_set.index[SELF] for e in loops)
        fwd = {(s, d, l) for s, d, l, r in edges if r == D.FORWARD}
        inv = {(d, s, l) for s, d, l, r in edges if r == D.INVERSE}
        assert fwd == inv
        assert g.count(D.FORWARD) == g.count(D.INVERSE)


class TestNeighborhood:
    def test_isolated(self, dep_labels):
        g = build_sentence_graph(sentence([0], ["root"]), dep_labels)
        assert neighborhood(g, 0) == [(0, 0, D.SELF_LOOP)]

    def test_two_tokens(self, dep_labels):
        g = build_sentence_graph(sentence([2, 0], ["nsubj", "root"]), dep_labels)
        # the head's message reaches the dependent along the forward edge 1 -> 0
        assert neighborhood(g, 0) == [(0, dep_labels.index[SELF], D.SELF_LOOP),
                                      (1, dep_labels.index["nsubj"], D.FORWARD)]
        assert neighborhood(g, 1) == [(0, dep_labels.index["nsubj"], D.INVERSE),
                                      (1, dep_labels.index[SELF], D.SELF_LOOP)]

    def test_out_of_range(self, dep_labels):
        g = build_sentence_graph(sentence([0], ["root"]), dep_labels)
        with pytest.raises(IndexError):
            neighborhood(g, 1)

    @pytest.mark.parametrize("seed", range(50))
    def test_matches_edge_scan(self, seed):
        rng = np.random.default_rng(seed)
        vocab = uniform_vocab(30)
        pairs = [(str(rng.choice(["synonym", "antonym", "hypernym", "hyponym"])),
                  f"w{rng.integers(30)}", f"w{rng.integers(30)}") for _ in range(25)]
        g = build_semantic_graph(pairs, vocab)
        expected = oracles.in_neighbours(g.num_nodes, g.edges())
        seen = 0
        for v in range(g.num_nodes):
            got = neighborhood(g, v)
            assert [(s, l, int(r)) for s, l, r in got] == [(s, l, int(r)) for s, l, r in expected[v]]
            seen += len(got)
        assert seen == g.num_edges


class TestSemanticGraph:
    def test_synonym_symmetry(self):
        vocab = Vocabulary(["big", "large", "small"], [1, 1, 1])
        g = build_semantic_graph([("synonym", "big", "large")], vocab)
        syn = g.label_set.index["synonym"]
        rel = sorted(e for e in g.edges() if e[3] != D.SELF_LOOP)
        assert rel == sorted([(0, 1, syn, D.FORWARD), (1, 0, syn, D.FORWARD),
                              (1, 0, syn, D.INVERSE), (0, 1, syn, D.INVERSE)])
        assert g.count(D.SELF_LOOP) == 3
        assert list(g.connected()) == [0, 1]

    def test_oov_dropped(self):
        vocab = Vocabulary(["big"], [1])
        g = build_semantic_graph([("synonym", "big", "huge")], vocab)
        assert g.dropped == 1
        assert g.num_edges == 1

    def test_unknown_relation(self):
        with pytest.raises(ValueError):
            build_semantic_graph([("meronym", "a", "b")], Vocabulary(["a", "b"], [1, 1]))

    def test_hypernym_mirror(self):
        vocab = Vocabulary(["animal", "dog"], [1, 1])
        g = build_semantic_graph([("hypernym", "animal", "dog")], vocab)
        hyper, hypo = g.label_set.index["hypernym"], g.label_set.index["hyponym"]
        fwd = {(s, d, l) for s, d, l, r in g.edges() if r == D.FORWARD}
        assert fwd == {(0, 1, hyper), (1, 0, hypo)}
        assert g.count(label="hypernym") == g.count(label="hyponym")

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_set_oracle(self, seed):
        rng = np.random.default_rng(seed)
        words = [f"w{i}" for i in range(50)]
        vocab = Vocabulary(words, np.ones(50, dtype=np.int64))
        pool = words + [f"oov{i}" for i in range(12)]   # ~20% of draws are OOV
        rels = ["synonym", "antonym", "hypernym", "hyponym"]
        pairs = [(rels[rng.integers(4)], pool[rng.integers(len(pool))], pool[rng.integers(len(pool))])
                 for _ in range(100)]
        g = build_semantic_graph(pairs, vocab)
        expected, dropped = oracles.semantic_edge_set(pairs, words)
        names = {D.FORWARD: "fwd", D.INVERSE: "inv"}
        got = {(words[s], words[d], g.label_set[l], names[r]) for s, d, l, r in g.edges()
               if r != D.SELF_LOOP}
        assert got == expected
        assert g.num_edges == len(expected) + 50
        assert g.dropped == dropped
        assert len(set(g.edges())) == g.num_edges
        assert g.count(label="hypernym") == g.count(label="hyponym")


class TestRelationSubset:
    @pytest.fixture
    def mixed(self):
        vocab = uniform_vocab(6)
        pairs = [("synonym", "w0", "w1"), ("antonym", "w1", "w2"), ("hypernym", "w3", "w4"),
                 ("hyponym", "w5", "w0")]
        return build_semantic_graph(pairs, vocab)

    def test_synonym_only(self, mixed):
        sub = relation_subset(mixed, ["synonym"])
        names = {sub.label_set[l] for l in sub.label}
        assert names == {"synonym", SELF}
        assert sub.count(D.SELF_LOOP) == 6

    def test_all_is_identity(self, mixed):
        sub = relation_subset(mixed, ["synonym", "antonym", "hypernym", "hyponym"])
        assert sorted(sub.edges()) == sorted(mixed.edges())

    def test_tallies(self, mixed):
        for rel in ["synonym", "antonym", "hypernym", "hyponym"]:
            assert relation_subset(mixed, [rel]).count(label=rel) == mixed.count(label=rel)

    def test_empty_result_warns(self, mixed, caplog):
        g = build_semantic_graph([("synonym", "w0", "w1")], uniform_vocab(3))
        sub = relation_subset(g, ["antonym"])
        assert sub.count(D.SELF_LOOP) == 3 and sub.num_edges == 3
        assert "no relation edges" in caplog.text


def test_local_subgraph_keeps_incoming_edges():
    vocab = uniform_vocab(5)
    g = build_semantic_graph([("synonym", "w0", "w1"), ("antonym", "w1", "w2")], vocab)
    sub, nodes = local_subgraph(g, [1])
    assert nodes[0] == 1 and set(nodes) == {0, 1, 2}
    assert sub.num_edges == len(neighborhood(g, 1))
    assert np.all(nodes[sub.dst] == 1)


def test_lexicon_roundtrip(tmp_path):
    pairs = [("synonym", "big", "large"), ("hypernym", "animal", "dog"), ("antonym", "hot", "cold")]
    path = tmp_path / "lex.tsv"
    write_lexicon(pairs, path)
    assert read_lexicon(path) == pairs
    path.write_text("# comment\nSYNONYM\tbig\tlarge\n\n", encoding="utf-8")
    assert read_lexicon(path) == [("synonym", "big", "large")]
    path.write_text("related\ta\tb\n", encoding="utf-8")
    with pytest.raises(ValueError, match="unknown relation"):
        read_lexicon(path)
