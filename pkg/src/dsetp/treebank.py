"""Reading and writing trees in discbracket format, and vocabularies.

One tree per line::

    (S (NP (NN 0=Mary)) (VP (VB 1=walks)))

Terminals are written ``INDEX=TOKEN`` with 0-based indices, so the order of
children is free and crossing branches need no special notation.  A node
with a single terminal child is a preterminal and its label is the POS tag.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

from .tree import (UNARY_SEP, Constituent, DiscTree, IndexSet, collapse_unaries,
                   expand_unaries, validate_tree)

ROOT = "ROOT"
UNK = "<UNK>"

_LEXRE = re.compile(r"\(|\)|[^\s()]+")
_TERMRE = re.compile(r"^(\d+)=(.+)$")


class TreebankError(ValueError):
    def __init__(self, lineno, message):
        super().__init__("line %d: %s" % (lineno, message))
        self.lineno = lineno


def _parse_brackets(line):
    """Return a nested ``(label, children)`` structure; terminals are
    ``(index, token)`` pairs."""
    tokens = _LEXRE.findall(line)
    if not tokens:
        raise ValueError("empty line")
    pos = 0

    def node():
        nonlocal pos
        if tokens[pos] != "(":
            raise ValueError("expected '(' but found %r" % tokens[pos])
        pos += 1
        if pos >= len(tokens) or tokens[pos] in "()":
            raise ValueError("missing label after '('")
        label = tokens[pos]
        pos += 1
        children = []
        while True:
            if pos >= len(tokens):
                raise ValueError("unbalanced brackets: missing ')'")
            tok = tokens[pos]
            if tok == ")":
                pos += 1
                break
            if tok == "(":
                children.append(node())
                continue
            m = _TERMRE.match(tok)
            if m is None:
                raise ValueError("malformed terminal %r (expected INDEX=TOKEN)" % tok)
            children.append((int(m.group(1)), m.group(2)))
            pos += 1
        if not children:
            raise ValueError("node %r has no children" % label)
        return label, children

    result = node()
    if pos != len(tokens):
        raise ValueError("trailing material after tree: %r" % " ".join(tokens[pos:]))
    return result


def _is_terminal(child):
    return isinstance(child[0], int)


def parse_tree(line: str, sep: str = UNARY_SEP) -> DiscTree:
    """Parse a single discbracket line; raises ValueError on bad input."""
    top = _parse_brackets(line)
    words, tags = {}, {}
    constituents = []

    def visit(node):
        label, children = node
        terminals = [c for c in children if _is_terminal(c)]
        if terminals:
            if len(children) != 1:
                raise ValueError("node %r mixes terminals with other children"
                                 % label)
            idx, tok = terminals[0]
            if idx in words:
                raise ValueError("duplicate index %d" % idx)
            words[idx], tags[idx] = tok, label
            return 1 << idx
        mask = 0
        for child in children:
            mask |= visit(child)
        constituents.append(Constituent(label, IndexSet.from_mask(mask)))
        return mask

    visit(top)
    n = len(words)
    missing = sorted(set(range(n)) - set(words))
    if missing:
        raise ValueError("missing index %d" % missing[0])
    tree = DiscTree([words[i] for i in range(n)], [tags[i] for i in range(n)],
                    constituents)
    if validate_tree(tree, allow_unary_chains=True):
        tree = DiscTree(tree.tokens, tree.pos_tags,
                        tree.constituents + (Constituent(ROOT, IndexSet.span(0, n)),),
                        synthetic_root=True)
        bad = validate_tree(tree, allow_unary_chains=True)
        if bad:
            raise ValueError("invalid tree: %s" % bad[0])
    return collapse_unaries(tree, sep)


def read_trees(stream, sep: str = UNARY_SEP) -> list:
    trees = []
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            raise TreebankError(lineno, "empty line")
        try:
            trees.append(parse_tree(line, sep))
        except ValueError as err:
            raise TreebankError(lineno, str(err)) from None
    return trees


def _check_token(text, what):
    if not text or re.search(r"[\s()]", text):
        raise ValueError("%s %r cannot be written in discbracket format" % (what, text))


def write_discbracket(t: DiscTree, sep: str = UNARY_SEP) -> str:
    """Format a tree on one line; children are ordered by left-index."""
    nodes = list(expand_unaries(t, sep).constituents)
    if t.synthetic_root and nodes and nodes[-1].label == ROOT:
        stripped = nodes[:-1]
        # keep the synthetic root if dropping it would leave several top nodes
        tops = [c for k, c in enumerate(stripped)
                if not any(c.yld.issubset(d.yld) for d in stripped[k + 1:])]
        covered = 0
        for c in tops:
            covered |= c.yld.mask
        if len(tops) + t.n - bin(covered).count("1") == 1:
            nodes = stripped
    for tok in t.tokens:
        _check_token(tok, "token")
    for c in nodes:
        _check_token(c.label, "label")
    children = {k: [] for k in range(len(nodes))}
    tops = []
    for k, c in enumerate(nodes):
        parent = next((m for m in range(k + 1, len(nodes))
                       if c.yld.issubset(nodes[m].yld)), None)
        (tops if parent is None else children[parent]).append(k)

    def preterminal(i):
        return (i, "(%s %d=%s)" % (t.pos_tags[i], i, t.tokens[i]))

    def render(k):
        items, covered = [], 0
        for ch in children[k]:
            items.append((nodes[ch].yld.left, render(ch)))
            covered |= nodes[ch].yld.mask
        items.extend(preterminal(i) for i in nodes[k].yld if not covered >> i & 1)
        items.sort()
        return "(%s %s)" % (nodes[k].label, " ".join(s for _, s in items))

    items, covered = [], 0
    for k in tops:
        items.append((nodes[k].yld.left, render(k)))
        covered |= nodes[k].yld.mask
    items.extend(preterminal(i) for i in range(t.n) if not covered >> i & 1)
    items.sort()
    if len(items) != 1:
        raise ValueError("tree has %d top-level nodes" % len(items))
    return items[0][1]


def write_trees(trees, stream, sep: str = UNARY_SEP):
    for t in trees:
        stream.write(write_discbracket(t, sep) + "\n")


def _ranked(counter):
    """Symbols by decreasing frequency, ties broken lexicographically."""
    return sorted(counter, key=lambda x: (-counter[x], x))


@dataclass(frozen=True)
class Vocabulary:
    words: tuple                 # id -> word, UNK at 0
    word_freq: dict
    chars: tuple                 # id -> char, UNK at 0
    pos_tags: tuple
    nonterminals: tuple
    unk_replaceable: frozenset = frozenset()
    word_index: dict = field(init=False, repr=False, compare=False)
    char_index: dict = field(init=False, repr=False, compare=False)
    pos_index: dict = field(init=False, repr=False, compare=False)
    label_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "word_index", {w: k for k, w in enumerate(self.words)})
        object.__setattr__(self, "char_index", {c: k for k, c in enumerate(self.chars)})
        object.__setattr__(self, "pos_index", {p: k for k, p in enumerate(self.pos_tags)})
        object.__setattr__(self, "label_index",
                           {x: k for k, x in enumerate(self.nonterminals)})

    def word_id(self, word):
        return self.word_index.get(word, 0)

    def char_ids(self, word):
        return [self.char_index.get(ch, 0) for ch in word]

    def to_json(self):
        return {"words": list(self.words),
                "word_freq": [self.word_freq.get(w, 0) for w in self.words],
                "chars": list(self.chars), "pos_tags": list(self.pos_tags),
                "nonterminals": list(self.nonterminals),
                "unk_replaceable": sorted(self.unk_replaceable)}

    @classmethod
    def from_json(cls, obj):
        return cls(tuple(obj["words"]),
                   {w: f for w, f in zip(obj["words"], obj["word_freq"]) if f},
                   tuple(obj["chars"]), tuple(obj["pos_tags"]),
                   tuple(obj["nonterminals"]), frozenset(obj["unk_replaceable"]))


@dataclass(frozen=True)
class Corpus:
    trees: tuple
    vocab: Vocabulary

    @property
    def word_vocab(self):
        return self.vocab.word_index

    @property
    def char_vocab(self):
        return self.vocab.char_index

    @property
    def pos_inventory(self):
        return self.vocab.pos_tags

    @property
    def nonterminal_inventory(self):
        return self.vocab.nonterminals

    def __len__(self):
        return len(self.trees)


def build_vocabularies(trees, unk_fraction: float = 2 / 3) -> Corpus:
    """Frequency-ranked inventories; the ``unk_fraction`` least frequent word
    types are marked as candidates for UNK replacement during training."""
    trees = tuple(trees)
    if not trees:
        raise ValueError("cannot build vocabularies from an empty corpus")
    words, chars, tags, labels = Counter(), Counter(), Counter(), Counter()
    for t in trees:
        words.update(t.tokens)
        tags.update(t.pos_tags)
        labels.update(c.label for c in t.constituents)
        for w in t.tokens:
            chars.update(w)
    ranked = _ranked(words)
    n_rare = int(len(ranked) * unk_fraction + 1e-9)
    rare = frozenset(ranked[len(ranked) - n_rare:]) if n_rare else frozenset()
    vocab = Vocabulary((UNK,) + tuple(ranked), dict(words), (UNK,) + tuple(_ranked(chars)),
                       tuple(_ranked(tags)), tuple(_ranked(labels)), rare)
    return Corpus(trees, vocab)


def read_discbracket(stream, sep: str = UNARY_SEP, unk_fraction: float = 2 / 3) -> Corpus:
    return build_vocabularies(read_trees(stream, sep), unk_fraction)
