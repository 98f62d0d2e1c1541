# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Reading trees and scoring predictions
#
# Terminals carry their sentence position (`3=a`), so a discontinuous
# constituent is written by listing its children in any order.

# %%
import io

from dsetp.evaluation import EvalFilter, evaluate_corpus, labelled_fscore
from dsetp.generate import random_corpus
from dsetp.treebank import parse_tree, read_discbracket, write_trees

gold = parse_tree("(S (VP (VB 0=Wake) (PRT 2=up)) (NP (PRP 1=him)) (. 3=!))")
print(gold.constituents)

# %% [markdown]
# A prediction that attaches the particle elsewhere loses the gapped VP.

# %%
pred = parse_tree("(S (VP (VB 0=Wake) (NP (PRP 1=him))) (PRT 2=up) (. 3=!))")
report = labelled_fscore(pred, gold)
print(report.summary())
print(labelled_fscore(pred, gold, EvalFilter(root_labels=frozenset({"S"}))).summary())

# %% [markdown]
# Removing punctuation renumbers the remaining tokens before comparison.

# %%
f = EvalFilter(punct_tags=frozenset({"."}))
print(labelled_fscore(gold, gold, f))

# %% [markdown]
# Treebanks are one tree per line; `read_discbracket` also builds the
# vocabularies used by the scorer.

# %%
trees = random_corpus(200, 10, seed=3)
buffer = io.StringIO()
write_trees(trees, buffer)
corpus = read_discbracket(io.StringIO(buffer.getvalue()))
print(len(corpus), "trees,", len(corpus.vocab.nonterminals), "labels")
print(evaluate_corpus(corpus.trees, trees).summary())
