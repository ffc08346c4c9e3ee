"""Command-line entry point.

Human-readable progress goes to stderr; results are printed to stdout as
``key=value`` lines. Exit status: 0 on success, 1 on usage errors, 2 on data
errors (missing or malformed files).
"""

from __future__ import annotations

import argparse
import logging
import sys
import time

import numpy as np

from .corpus import Vocabulary, build_vocabulary, read_conllu
from .evaluation import eval_analogy, eval_similarity, nearest_neighbors, read_analogies, read_similarity
from .graph import RELATIONS, build_semantic_graph, discover_labels, read_lexicon, relation_subset
from .model import save_checkpoint
from .persist import (file_info, load_embeddings, load_pretrained, read_manifest, save_embeddings,
                      write_manifest)
from .semgcn import RetrofitConfig, RetrofitState, retrofit_semgcn
from .syngcn import TrainConfig, train_syngcn

log = logging.getLogger("gcnembed")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _read_corpus(paths, vocab=None, lowercase=True):
    sentences, errors = [], []
    for p in paths:
        s, e = read_conllu(p, vocab, lowercase)
        sentences += s
        errors += [(p, err) for err in e]
    for p, err in errors:
        log.warning("%s: skipped sentence (%s)", p, err)
    return sentences, errors


def cmd_vocab(args):
    sentences, errors = _read_corpus(args.corpus, lowercase=not args.no_lowercase)
    vocab = build_vocabulary(sentences, args.max_vocab, args.min_count)
    if args.out:
        vocab.save(args.out)
    return {"vocab_size": len(vocab), "total_tokens": vocab.total_tokens,
            "sentences": len(sentences), "parse_errors": len(errors),
            "vocab_sha256": vocab.digest()}, vocab, []


def cmd_train(args):
    lowercase = not args.no_lowercase
    if args.vocab:
        vocab = Vocabulary.load(args.vocab)
        sentences, errors = _read_corpus(args.corpus, vocab, lowercase)
    else:
        sentences, errors = _read_corpus(args.corpus, lowercase=lowercase)
        vocab = build_vocabulary(sentences, args.max_vocab, args.min_count)
        for s in sentences:
            vocab.encode(s)
    labels = discover_labels(sentences)
    config = TrainConfig(lr=args.lr, dim=args.dim, negatives=args.negatives, epochs=args.epochs,
                         batch_sentences=args.batch, noise_power=args.noise_power,
                         subsample=args.subsample, seed=args.seed, layers=args.layers,
                         gating=not args.no_gating, normalize=args.normalize,
                         deterministic=args.deterministic, workers=args.threads)
    model = train_syngcn(sentences, vocab, config, labels=labels)
    save_embeddings(model.store, vocab, args.out, args.export)
    outputs = [args.out]
    if args.checkpoint:
        save_checkpoint(args.checkpoint, model.params, model.config, labels)
        outputs.append(args.checkpoint)
    metrics = {"vocab_size": len(vocab), "labels": len(labels), "sentences": len(sentences),
               "parse_errors": len(errors), "embedding_rows": model.store.num_rows,
               "epochs": config.epochs}
    if model.epoch_losses:
        metrics["final_loss"] = f"{model.epoch_losses[-1]:.6f}"
    return metrics, vocab, outputs


def cmd_retrofit(args):
    store, vocab = load_pretrained(args.embeddings)
    pairs = read_lexicon(args.lexicon)
    graph = build_semantic_graph(pairs, vocab)
    relations = tuple(r.strip() for r in args.relations.split(",") if r.strip())
    config = RetrofitConfig(lr=args.lr, epochs=args.epochs, negatives=args.negatives,
                            relations=relations, anchor_weight=args.lambda_,
                            antonym_repel=args.antonym_repel, batch_words=args.batch,
                            activation=args.activation, seed=args.seed)
    state = RetrofitState(None, None, None)
    out = retrofit_semgcn(store, graph, config, vocab, state=state)
    save_embeddings(out, vocab, args.out, "input")
    connected = len(relation_subset(graph, relations).connected())
    metrics = {"vocab_size": len(vocab), "lexicon_pairs": len(pairs), "dropped_pairs": graph.dropped,
               "connected_words": connected, "epochs": config.epochs}
    if state.epoch_losses:
        metrics["final_loss"] = f"{state.epoch_losses[-1]:.6f}"
    return metrics, vocab, [args.out]


def _load_eval_embeddings(path):
    matrix, words = load_embeddings(path)
    return matrix, Vocabulary(words, np.ones(len(words), dtype=np.int64))


def cmd_eval_sim(args):
    E, vocab = _load_eval_embeddings(args.embeddings)
    data = read_similarity(args.dataset)
    rho, coverage = eval_similarity(E, vocab, data)
    return {"rho": f"{rho:.6f}", "coverage": f"{coverage:.6f}", "rows": len(data)}, None, []


def cmd_eval_analogy(args):
    E, vocab = _load_eval_embeddings(args.embeddings)
    result = eval_analogy(E, vocab, read_analogies(args.dataset), method=args.method)
    return {"accuracy": f"{result.accuracy:.6f}", "correct": result.correct,
            "total": result.total, "skipped": result.skipped}, None, []


def cmd_nn(args):
    E, vocab = _load_eval_embeddings(args.embeddings)
    if args.word not in vocab:
        raise KeyError(f"word {args.word!r} not in {args.embeddings}")
    hits = nearest_neighbors(E, vocab, args.word, args.k)
    return {f"neighbor_{i}": f"{w} {c:.6f}" for i, (w, c) in enumerate(hits, 1)}, None, []


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gcnembed", description="Word embeddings from dependency graphs, "
                     "lexicon retrofitting and intrinsic evaluation.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def corpus_flags(p, required=True):
        p.add_argument("--corpus", nargs="+", required=required, help="CoNLL-U file(s)")
        p.add_argument("--max-vocab", type=int, default=150_000)
        p.add_argument("--min-count", type=int, default=5)
        p.add_argument("--no-lowercase", action="store_true")

    p = sub.add_parser("vocab", help="count a parsed corpus and write the vocabulary")
    corpus_flags(p)
    p.add_argument("--out", help="vocabulary file (word<TAB>count per line)")
    p.set_defaults(func=cmd_vocab)

    p = sub.add_parser("train", help="train embeddings on a parsed corpus")
    corpus_flags(p)
    p.add_argument("--vocab", help="vocabulary file; built from the corpus when omitted")
    p.add_argument("--dim", type=int, default=300)
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--noise-power", type=float, default=0.75)
    p.add_argument("--batch", type=int, default=128, help="sentences per optimizer step")
    p.add_argument("--subsample", type=float, default=1e-4)
    p.add_argument("--layers", type=int, default=1)
    p.add_argument("--no-gating", action="store_true")
    p.add_argument("--normalize", action="store_true", help="divide messages by in-degree")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--deterministic", action="store_true", help="single-threaded execution")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--export", choices=("input", "output", "mean"), default="input")
    p.add_argument("--checkpoint", help="also write GCN weights to this file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("retrofit", help="retrofit pre-trained embeddings to a lexicon")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--relations", default=",".join(RELATIONS))
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--batch", type=int, default=32, help="words per optimizer step")
    p.add_argument("--lambda", dest="lambda_", type=float, default=1.0, help="anchor weight")
    p.add_argument("--antonym-repel", type=float, default=0.0,
                   help="weight of an extra cosine penalty between antonyms (off by default)")
    p.add_argument("--activation", choices=("identity", "relu"), default="identity")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--deterministic", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_retrofit)

    p = sub.add_parser("eval-sim", help="Spearman correlation on a word similarity dataset")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=cmd_eval_sim)

    p = sub.add_parser("eval-analogy", help="analogy accuracy")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--method", choices=("add", "mul"), default="add")
    p.set_defaults(func=cmd_eval_analogy)

    p = sub.add_parser("nn", help="nearest neighbours of a word")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--k", type=int, default=10)
    p.set_defaults(func=cmd_nn)
    return parser


def run(argv) -> tuple[int, dict]:
    """Like :func:`main` but also returns the metrics dict."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("gcnembed: error: a subcommand is required")
    except UsageError as exc:
        if argv:
            print(exc, file=sys.stderr)
        else:
            parser.print_help(sys.stderr)
        return 1, {}
    start = time.time()
    try:
        metrics, vocab, outputs = args.func(args)
    except (OSError, ValueError, KeyError, FloatingPointError) as exc:
        print(f"gcnembed {args.command}: {exc}", file=sys.stderr)
        return 2, {}
    for key, value in metrics.items():
        print(f"{key}={value}")
    if outputs:
        inputs = [file_info(p) for key in ("corpus", "vocab", "embeddings", "lexicon")
                  for p in _as_list(getattr(args, key, None))]
        manifest = {
            "command": args.command,
            "argv": list(argv),
            "flags": {k: v for k, v in vars(args).items() if k != "func"},
            "vocab_sha256": vocab.digest() if vocab is not None else None,
            "inputs": inputs,
            "outputs": [file_info(p) for p in outputs],
            "seed": getattr(args, "seed", None),
            "wall_clock_seconds": round(time.time() - start, 3),
            "metrics": metrics,
        }
        write_manifest(outputs[0] + ".manifest.json", manifest)
    return 0, metrics


def _as_list(value):
    if value is None:
        return []
    return value if isinstance(value, list) else [value]


def replay(manifest_path) -> tuple[int, dict]:
    """Re-run the command recorded in a manifest."""
    return run(read_manifest(manifest_path)["argv"])


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    if not logging.getLogger().handlers:
        logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    return run(list(argv))[0]


if __name__ == "__main__":
    sys.exit(main())
