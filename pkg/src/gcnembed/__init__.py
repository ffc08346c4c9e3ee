"""Graph-convolutional word embeddings.

Train embeddings by predicting each word from a GCN encoding of its
dependency-parse neighbourhood (:func:`train_syngcn`), or retrofit existing
vectors with a GCN over a typed lexicon graph (:func:`retrofit_semgcn`).
"""

from .corpus import (TokenizedSentence, Vocabulary, build_vocabulary, keep_probability,
                     parse_conllu, read_conllu, select_targets)
from .evaluation import cosine, eval_analogy, eval_similarity, nearest_neighbors, spearman
from .graph import (EdgeDirection, LabelSet, SemanticGraph, SentenceGraph, build_semantic_graph,
                    build_sentence_graph, neighborhood, read_lexicon, relation_subset)
from .model import GcnConfig, GcnParams, gcn_backward, gcn_forward, xavier_init
from .persist import EmbeddingStore, load_pretrained, save_embeddings
from .semgcn import RetrofitConfig, retrofit_semgcn
from .syngcn import TrainConfig, train_syngcn

__version__ = "0.1.0"
