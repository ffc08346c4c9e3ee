"""
Reading a parsed corpus
=======================

Parse a small CoNLL-U treebank, build a vocabulary and look at the graph
made from one sentence.
"""

import tempfile
from pathlib import Path

from gcnembed.corpus import build_vocabulary, read_conllu
from gcnembed.graph import EdgeDirection, build_sentence_graph, discover_labels, neighborhood
from gcnembed.synthetic import planted_clusters, to_conllu

tmp = Path(tempfile.mkdtemp())
raw, _ = planted_clusters(words_per_cluster=8, num_sentences=50, seed=0)
text = to_conllu(raw)
# break one sentence on purpose: a head that points past the end
text = text.replace("\t1\t", "\t99\t", 1)
(tmp / "toy.conllu").write_text(text)

sentences, errors = read_conllu(tmp / "toy.conllu")
print(f"{len(sentences)} sentences, {len(errors)} skipped")
for err in errors:
    print("  line", err.line, err.message)

vocab = build_vocabulary(sentences, min_count=1)
print("vocabulary:", len(vocab), "entries, last one is", vocab.words[-1])
for s in sentences:
    vocab.encode(s)

labels = discover_labels(sentences)
print("labels:", labels.labels)

s = sentences[0]
g = build_sentence_graph(s, labels)
print("sentence:", " ".join(s.forms))
n = len(s.forms)
print(f"edges: {g.num_edges} = {n - 1} arcs x 2 directions + {n} self-loops")
for node in range(g.num_nodes):
    msgs = [f"{s.forms[u]}/{labels[l]}/{EdgeDirection(r).name.lower()}"
            for u, l, r in neighborhood(g, node)]
    print(f"  {s.forms[node]:8s} <- {', '.join(msgs)}")
