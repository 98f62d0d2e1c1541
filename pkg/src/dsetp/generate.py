"""Random discontinuous trees for tests, plus a small toy grammar.

``random_tree`` builds a tree by repeatedly merging top-level blocks, either
adjacent ones (continuous) or an arbitrary subset (discontinuous, with
probability ``gap_rate``).  ``toy_corpus`` produces learnable sentences from
a tiny English-like grammar with wh-fronting and NP extraposition as the
sources of discontinuity, and PP attachment as the source of ambiguity.
"""
from __future__ import annotations

import numpy as np

from .tree import Constituent, DiscTree, IndexSet

LABELS = ("S", "NP", "VP", "PP", "AP", "SBAR", "ADVP")
TAGS = ("NN", "VB", "DT", "JJ", "IN", "RB", "PRP", ".")
WORDS = ("the", "a", "dog", "cat", "runs", "sees", "big", "red", "on", "in",
         "it", "we", "fast", "now", ".", ",", "what", "did")


def random_tree(rng: np.random.Generator, n: int, gap_rate: float = 0.3,
                unary_rate: float = 0.15, chain_rate: float = 0.05) -> DiscTree:
    if n < 1:
        raise ValueError("n must be positive")
    tokens = [str(rng.choice(WORDS)) for _ in range(n)]
    tags = [str(rng.choice(TAGS)) for _ in range(n)]

    def pick_label():
        x = str(rng.choice(LABELS))
        if rng.random() < chain_rate:
            x += "+" + str(rng.choice(LABELS))
        return x

    constituents = []
    items = [IndexSet([k]) for k in range(n)]
    for s in items:
        if rng.random() < unary_rate:
            constituents.append(Constituent(pick_label(), s))
    while len(items) > 1:
        if len(items) > 2 and rng.random() < gap_rate:
            k = int(rng.integers(2, len(items) + 1))
            chosen = sorted(rng.choice(len(items), size=k, replace=False).tolist())
        else:
            k = int(rng.integers(2, min(4, len(items)) + 1))
            start = int(rng.integers(0, len(items) - k + 1))
            chosen = list(range(start, start + k))
        merged = IndexSet()
        for c in chosen:
            merged = merged | items[c]
        items = [s for c, s in enumerate(items) if c not in chosen] + [merged]
        items.sort(key=lambda s: s.left)
        constituents.append(Constituent(pick_label(), merged))
    if n == 1 and not constituents:
        constituents.append(Constituent(pick_label(), items[0]))
    return DiscTree(tokens, tags, constituents)


def random_corpus(count: int, max_n: int, seed: int = 0, gap_rate: float = 0.3,
                  min_n: int = 1) -> list:
    rng = np.random.default_rng(seed)
    return [random_tree(rng, int(rng.integers(min_n, max_n + 1)), gap_rate)
            for _ in range(count)]


# ---------------------------------------------------------------------------
# toy grammar

LEXICON = {
    "DT": ("the", "a", "every", "some"),
    "NN": ("dog", "cat", "man", "telescope", "park", "book", "review", "saw",
           "duck", "letter", "garden", "child"),
    "JJ": ("big", "small", "old", "red", "quiet"),
    "NNP": ("Mary", "John", "Paris", "Kim"),
    "PRP": ("she", "he", "they"),
    "VBD": ("saw", "liked", "found", "read", "watched", "duck"),
    "VBI": ("slept", "arrived", "appeared", "left"),
    "VB": ("see", "like", "find", "read", "watch"),
    "IN": ("with", "in", "near", "of"),
    "WP": ("what", "who"),
}


class _Node:
    __slots__ = ("label", "children")

    def __init__(self, label, children):
        self.label, self.children = label, children


class _Leaf:
    __slots__ = ("tag", "word")

    def __init__(self, tag, word):
        self.tag, self.word = tag, word


def _word(rng, tag):
    words = LEXICON[tag]
    return _Leaf("VBD" if tag == "VBI" else tag, words[int(rng.integers(len(words)))])


def _np(rng, depth=0):
    r = rng.random()
    if r < 0.15:
        return _Node("NP", [_word(rng, "PRP")])
    if r < 0.3:
        return _Node("NP", [_word(rng, "NNP")])
    kids = [_word(rng, "DT")]
    if rng.random() < 0.3:
        kids.append(_word(rng, "JJ"))
    kids.append(_word(rng, "NN"))
    if depth == 0 and rng.random() < 0.2:
        kids.append(_pp(rng, depth + 1))
    return _Node("NP", kids)


def _pp(rng, depth=1):
    return _Node("PP", [_word(rng, "IN"), _np(rng, depth)])


def _transitive_vp(rng, verb_tag, obj=None):
    obj = obj if obj is not None else _np(rng, 1)
    kids = [_word(rng, verb_tag), obj]
    if rng.random() < 0.35:
        pp = _pp(rng)
        if obj.label == "NP" and len(obj.children) > 1 and rng.random() < 0.5:
            obj.children.append(pp)        # PP attached low
        else:
            kids.append(pp)                # PP attached to the verb phrase
    return _Node("VP", kids)


def _declarative(rng, disc_rate):
    order = None
    r = rng.random()
    if r < disc_rate / 2:
        # NP extraposition: "a review appeared of the book"
        pp = _pp(rng)
        subj = _Node("NP", [_word(rng, "DT"), _word(rng, "NN"), pp])
        vp = _Node("VP", [_word(rng, "VBI")])
        stop = _Leaf(".", ".")
        tree = _Node("S", [subj, vp, stop])
        order = subj.children[:2] + [vp.children[0]] + [pp, stop]
        return tree, order
    subj = _np(rng)
    if rng.random() < 0.3:
        vp = _Node("VP", [_word(rng, "VBI")])
    else:
        vp = _transitive_vp(rng, "VBD")
    return _Node("S", [subj, vp, _Leaf(".", ".")]), order


def _question(rng):
    # wh-fronting: "what did the man see in the park ?"
    wh = _Node("WHNP", [_word(rng, "WP")])
    vp = _transitive_vp(rng, "VB", obj=wh)
    aux = _Leaf("VBD", "did")
    subj = _np(rng)
    sq = _Node("SQ", [aux, subj, vp])
    tree = _Node("SBARQ", [sq, _Leaf(".", "?")])
    order = [wh, aux, subj] + vp.children[:1] + vp.children[2:] + [tree.children[1]]
    return tree, order


def _linearize(nodes):
    out = []
    for x in nodes:
        if isinstance(x, _Leaf):
            out.append(x)
        else:
            out.extend(_linearize(x.children))
    return out


def toy_tree(rng: np.random.Generator, disc_rate: float = 0.3) -> DiscTree:
    if rng.random() < disc_rate / 2:
        root, order = _question(rng)
    else:
        root, order = _declarative(rng, disc_rate)
    leaves = _linearize(order if order is not None else [root])
    position = {id(leaf): k for k, leaf in enumerate(leaves)}
    constituents = []

    def visit(node):
        if isinstance(node, _Leaf):
            return 1 << position[id(node)]
        mask = 0
        for ch in node.children:
            mask |= visit(ch)
        constituents.append(Constituent(node.label, IndexSet.from_mask(mask)))
        return mask

    visit(root)
    return DiscTree([x.word for x in leaves], [x.tag for x in leaves], constituents)


def toy_corpus(count: int, seed: int = 0, disc_rate: float = 0.3,
               unique: bool = True) -> list:
    """Sentences from the toy grammar; with ``unique`` no token sequence
    occurs twice."""
    rng = np.random.default_rng(seed)
    trees, seen = [], set()
    while len(trees) < count:
        t = toy_tree(rng, disc_rate)
        if unique:
            if t.tokens in seen:
                continue
            seen.add(t.tokens)
        trees.append(t)
    return trees
