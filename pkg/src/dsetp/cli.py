"""Command line front end: ``dsetp {train,parse,eval,oracle-check,stats,gen}``."""
from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import checks
from .evaluation import EvalFilter, evaluate_corpus
from .generate import random_corpus, toy_corpus
from .model import PRESETS, ModelConfig
from .oracle import static_oracle
from .transitions import format_derivation
from .treebank import TreebankError, build_vocabularies, read_trees, write_discbracket

log = logging.getLogger("dsetp")


class UsageError(Exception):
    pass


def _seed(args, default=0):
    """--seed, then $DSETP_SEED, then ``default``."""
    if args.seed is not None:
        return args.seed
    env = os.environ.get("DSETP_SEED")
    if not env:
        return default
    try:
        return int(env)
    except ValueError:
        raise UsageError("DSETP_SEED must be an integer, got %r" % env) from None


def _read(path):
    if not os.path.isfile(path):
        raise UsageError("cannot read %s" % path)
    with open(path, encoding="utf-8") as f:
        return read_trees(f)


def _coerce(field, text):
    if field.type in (bool, "bool"):
        if text.lower() in ("1", "true", "yes"):
            return True
        if text.lower() in ("0", "false", "no"):
            return False
        raise UsageError("%s expects a boolean, got %r" % (field.name, text))
    kind = {"int": int, "float": float}.get(field.type, field.type)
    try:
        return kind(text)
    except (TypeError, ValueError):
        raise UsageError("%s expects %s, got %r" % (field.name, field.type, text)) from None


def _overrides(pairs):
    fields = {f.name: f for f in dataclasses.fields(ModelConfig)}
    result = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in fields:
            raise UsageError("bad configuration entry %r" % pair)
        result[key] = _coerce(fields[key], value.strip())
    return result


def _config_file(path):
    if not os.path.isfile(path):
        raise UsageError("cannot read config file %s" % path)
    with open(path, encoding="utf-8") as f:
        lines = [ln.split("#", 1)[0].strip() for ln in f]
    return _overrides(ln for ln in lines if ln)


def _filter(args):
    def split(text):
        return frozenset((text or "").split())
    return EvalFilter(split(args.root_labels), split(args.punct_tags))


def cmd_train(args):
    config = PRESETS[args.preset]
    settings = {}
    if args.config:
        settings.update(_config_file(args.config))
    settings.update(_overrides(args.set or ()))
    if args.epochs is not None:
        settings["epochs"] = args.epochs
    if args.explore_p is not None:
        settings["explore_prob"] = args.explore_p
    settings["seed"] = _seed(args, settings.get("seed", config.seed))
    config = config.replace(**settings)
    train_trees, dev_trees = _read(args.train), _read(args.dev)
    corpus = build_vocabularies(train_trees, config.unk_fraction)

    import torch
    from .persist import save_model
    from .training import train
    torch.set_num_threads(1)
    log_path = args.log or args.model + ".log.tsv"
    with open(log_path, "w", encoding="utf-8") as out:
        out.write("epoch\tL_t\tL_p\tdev_F\tdev_disc_F\tPOS\n")

        def record(row):
            out.write("%d\t%.6f\t%.6f\t%.4f\t%.4f\t%.4f\n" % (
                row["epoch"], row["L_t"], row["L_p"], 100 * row["dev_f"],
                100 * row["dev_disc_f"], 100 * row["pos"]))
            out.flush()
            log.info("epoch %d dev F %.2f", row["epoch"], 100 * row["dev_f"])

        model, _ = train(corpus, config, args.oracle, dev=dev_trees,
                         eval_every=args.eval_every, ignore=_filter(args), callback=record)
    save_model(model, args.model)
    return 0


_WORKER_MODEL = None


def _init_worker(path):
    global _WORKER_MODEL
    import torch
    from .persist import load_model
    torch.set_num_threads(1)
    _WORKER_MODEL = load_model(path)


def _parse_line(tokens):
    return write_discbracket(_WORKER_MODEL.greedy_parse(tokens))


def cmd_parse(args):
    if not os.path.isfile(args.model):
        raise UsageError("cannot read %s" % args.model)
    if not os.path.isfile(args.input):
        raise UsageError("cannot read %s" % args.input)
    _init_worker(args.model)   # fail on a bad model before reading input
    sentences = []
    with open(args.input, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            tokens = line.split()
            if not tokens:
                raise UsageError("%s: line %d: empty line" % (args.input, lineno))
            sentences.append(tokens)
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs, initializer=_init_worker,
                                 initargs=(args.model,)) as pool:
            lines = list(pool.map(_parse_line, sentences, chunksize=8))
    else:
        lines = [_parse_line(tokens) for tokens in sentences]
    with open(args.output, "w", encoding="utf-8") as out:
        for line in lines:
            out.write(line + "\n")
    return 0


def cmd_eval(args):
    pred, gold = _read(args.pred), _read(args.gold)
    if len(pred) != len(gold):
        raise UsageError("%d predicted trees but %d gold trees" % (len(pred), len(gold)))
    try:
        report = evaluate_corpus(pred, gold, _filter(args))
    except ValueError as err:
        raise UsageError(str(err)) from None
    print(report.summary())
    return 0


def cmd_oracle_check(args):
    trees = _read(args.treebank)
    rng = np.random.default_rng(_seed(args))
    labels = sorted({x.label for t in trees for x in t.constituents})
    failed = 0
    for k, tree in enumerate(trees, 1):
        problems = checks.check_tree(tree, rng, args.exhaustive_max, args.perturb, labels)
        if problems:
            failed += 1
            print("tree %d: FAIL" % k)
            for p in problems[:5]:
                print("  " + p)
    if args.dump:
        with open(args.dump, "w", encoding="utf-8") as out:
            for tree in trees:
                out.write(format_derivation(static_oracle(tree)) + "\n")
    print("%d trees checked, %d failed: %s" % (len(trees), failed,
                                                 "FAIL" if failed else "PASS"))
    return 1 if failed else 0


def cmd_stats(args):
    trees = _read(args.treebank)
    sizes = checks.memory_histogram(trees)
    total = sum(sizes.values())
    print("memory_size\tcount\tcumulative_%")
    running = 0
    for size in range(max(sizes) + 1):
        running += sizes[size]
        print("%d\t%d\t%.2f" % (size, sizes[size], 100.0 * running / total))
    lengths = [4 * t.n - 2 for t in trees]
    print("derivation_length\tmin %d\tmean %.2f\tmax %d" % (
        min(lengths), sum(lengths) / len(lengths), max(lengths)))
    gaps = checks.gap_degrees(trees)
    print("gap_degree\tcount")
    for g in sorted(gaps):
        print("%d\t%d" % (g, gaps[g]))
    return 0


def cmd_gen(args):
    seed = _seed(args)
    if args.toy:
        trees = toy_corpus(args.count, seed, args.gap_rate)
    else:
        trees = random_corpus(args.count, args.max_n, seed, args.gap_rate, args.min_n)
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        for t in trees:
            out.write(write_discbracket(t) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _add_filter(p):
    p.add_argument("--root-labels", default="",
                   help="space-separated labels to ignore, e.g. 'ROOT VROOT'")
    p.add_argument("--punct-tags", default="",
                   help="space-separated POS tags whose tokens are removed, e.g. '. , :'")


def build_parser():
    parser = argparse.ArgumentParser(prog="dsetp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a parser")
    p.add_argument("train")
    p.add_argument("dev")
    p.add_argument("model")
    p.add_argument("--oracle", choices=("static", "dynamic"), default="static")
    p.add_argument("--explore-p", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--eval-every", type=int, default=4)
    p.add_argument("--preset", choices=sorted(PRESETS), default="full")
    p.add_argument("--config", help="file of key=value lines")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--seed", type=int)
    p.add_argument("--log", help="TSV metrics log (default: MODEL.log.tsv)")
    _add_filter(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("parse", help="parse tokenized sentences")
    p.add_argument("model")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval", help="labelled F-score of predicted trees")
    p.add_argument("pred")
    p.add_argument("gold")
    _add_filter(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("oracle-check", help="verify the oracles on a treebank")
    p.add_argument("treebank")
    p.add_argument("--exhaustive-max", type=int, default=6)
    p.add_argument("--perturb", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--dump", help="write canonical derivations to this file")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("stats", help="memory size and derivation statistics")
    p.add_argument("treebank")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gen", help="generate random trees")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-n", type=int, default=12)
    p.add_argument("--min-n", type=int, default=1)
    p.add_argument("--gap-rate", type=float, default=0.3)
    p.add_argument("--toy", action="store_true", help="use the toy grammar")
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (UsageError, TreebankError, OSError) as err:
        print("dsetp %s: error: %s" % (args.command, err), file=sys.stderr)
        return 1
    except ValueError as err:
        print("dsetp %s: error: %s" % (args.command, err), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
