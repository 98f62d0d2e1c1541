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
# # Dynamic oracle from an arbitrary configuration
#
# After a mistake, the dynamic oracle still returns the actions that keep
# the best reachable F-score.  Here we derail a parse on purpose, follow
# the oracle afterwards, and compare against exhaustive search.

# %%
import numpy as np

from dsetp.checks import check_tree
from dsetp.evaluation import labelled_fscore
from dsetp.generate import random_tree
from dsetp.oracle import dynamic_oracle, exhaustive_best_f, reach
from dsetp.transitions import NOLABEL, SHIFT, combine, initial
from dsetp.tree import DiscTree
from dsetp.treebank import write_discbracket

rng = np.random.default_rng(11)
gold = random_tree(rng, 6, gap_rate=0.5)
print(write_discbracket(gold))

# %%
c = initial(gold.n)
for a in [SHIFT, NOLABEL, SHIFT, NOLABEL, SHIFT, NOLABEL, combine(1)]:
    c = c.apply(a)
print("memory", c.memory, "focus", c.focus)
print("still reachable:", sorted(reach(c, gold), key=lambda x: x.yld.sortkey()))
print("best F from here: %.3f" % exhaustive_best_f(c, gold))

# %%
while not c.is_goal():
    answer = dynamic_oracle(c, gold)
    c = c.apply(answer.canonical)
pred = DiscTree(gold.tokens, gold.pos_tags, c.built)
print(write_discbracket(pred))
print("F after following the oracle: %.3f" % labelled_fscore(pred, gold).f1)

# %% [markdown]
# `check_tree` runs the same comparison on every configuration of the gold
# path and of random wrong prefixes; an empty list means every check held.

# %%
problems = []
for _ in range(50):
    t = random_tree(rng, int(rng.integers(2, 7)), gap_rate=0.4)
    problems += check_tree(t, rng, exhaustive_max=6, perturb=3)
print(len(problems), "problems")
