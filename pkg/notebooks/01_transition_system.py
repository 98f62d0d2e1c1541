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
# # The set-based transition system
#
# A configuration holds a memory of pending index sets, one focus set, the
# buffer position and the constituents built so far.  Structural steps
# (SHIFT, COMB-k) alternate with labelling steps (LABEL-X, NOLABEL), so a
# sentence of n tokens always takes 4n - 2 actions.

# %%
from dsetp.oracle import static_oracle
from dsetp.transitions import derivation_configurations
from dsetp.treebank import parse_tree, write_discbracket

line = ("(SBARQ (RB 0=So) (SQ (VP (VP (WHNP (WP 1=what)) (VB 6=do)) (TO 5=to)) "
        "(VBZ 2='s) (NP (DT 3=a) (NN 4=parent))) (. 7=?))")
tree = parse_tree(line)
for c in tree.constituents:
    print(c, "gap" if c.yld.gap() else "")

# %% [markdown]
# The two VPs have gaps: {1, 6} skips 2..5 and {1, 5, 6} skips 2..4.
# The canonical derivation combines as early as it can, preferring the
# most recent memory item.

# %%
actions = static_oracle(tree)
configs = derivation_configurations(tree.n, actions)
for c, a in zip(configs, actions):
    memory = " ".join(map(repr, c.memory_by_left()))
    print("%2d  %-12s  S=[%s]  f=%r  i=%d" % (c.j, a, memory, c.focus, c.i))

# %%
print(len(actions), "actions for", tree.n, "tokens")
print("largest memory:", max(len(c.memory) for c in configs))
assert configs[-1].is_goal() and configs[-1].built == tree.constituent_set()
print(write_discbracket(tree) == line)
