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
# # Training the scorer on a toy grammar
#
# The toy grammar mixes plain clauses, questions with a fronted object
# (a VP with a gap) and extraposed relative phrases.  The desk preset
# trains in a few seconds per epoch on one core.

# %% tags=["parameters"]
n_train = 60
n_dev = 20
epochs = 16
oracle = "dynamic"
warmup_steps = 200   # the default 1000 is sized for large treebanks

# %%
import tempfile

import torch

from dsetp.evaluation import evaluate_corpus
from dsetp.generate import toy_corpus
from dsetp.model import PRESETS
from dsetp.persist import load_model, save_model
from dsetp.training import parse_corpus, train
from dsetp.treebank import build_vocabularies, write_discbracket

torch.set_num_threads(1)
trees = toy_corpus(n_train + n_dev, seed=0)
corpus = build_vocabularies(trees[:n_train])
dev = trees[n_train:]
print(write_discbracket(dev[0]))

# %%
config = PRESETS["desk"].replace(warmup_steps=warmup_steps)
model, history = train(corpus, config, oracle, dev=dev, epochs=epochs)
for row in history:
    print("epoch %(epoch)3d  L_t %(L_t)7.3f  L_p %(L_p)7.3f  dev F %(dev_f).3f" % row)

# %%
print(evaluate_corpus(parse_corpus(model, dev), dev).summary())
print(write_discbracket(model.greedy_parse(list(dev[0].tokens))))

# %% [markdown]
# Model files round-trip bit for bit.

# %%
with tempfile.NamedTemporaryFile(suffix=".dsetp") as f:
    save_model(model, f.name)
    again = load_model(f.name)
print(parse_corpus(again, dev) == parse_corpus(model, dev))
