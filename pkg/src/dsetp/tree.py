"""Index sets, instantiated constituents and discontinuous trees.

A discontinuous tree is stored as its set of instantiated constituents
``(label, yield)``; preterminals live in ``DiscTree.pos_tags``.  Yields are
:class:`IndexSet` values, kept both as a sorted tuple and as an integer
bitmask so that min/max are O(1) and inclusion tests are single ``&``
operations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

UNARY_SEP = "+"


class IndexSet:
    """Immutable sorted set of non-negative token positions."""

    __slots__ = ("indices", "mask")

    def __init__(self, indices: Iterable[int] = ()):
        idx = tuple(sorted(set(indices)))
        if idx and idx[0] < 0:
            raise ValueError("token positions must be non-negative: %r" % (idx,))
        mask = 0
        for i in idx:
            mask |= 1 << i
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def from_mask(cls, mask: int) -> "IndexSet":
        result = cls.__new__(cls)
        idx = []
        m, pos = mask, 0
        while m:
            if m & 1:
                idx.append(pos)
            m >>= 1
            pos += 1
        object.__setattr__(result, "indices", tuple(idx))
        object.__setattr__(result, "mask", mask)
        return result

    @classmethod
    def span(cls, start: int, stop: int) -> "IndexSet":
        """Contiguous positions ``start .. stop - 1``."""
        return cls.from_mask(((1 << (stop - start)) - 1) << start)

    def __setattr__(self, name, value):
        raise AttributeError("IndexSet is immutable")

    @property
    def left(self) -> int:
        if not self.mask:
            raise ValueError("empty index set has no left-index")
        return self.indices[0]

    @property
    def right(self) -> int:
        if not self.mask:
            raise ValueError("empty index set has no right-index")
        return self.indices[-1]

    def gap(self) -> "IndexSet":
        if not self.mask:
            raise ValueError("gap of an empty index set")
        lo, hi = self.indices[0], self.indices[-1]
        full = ((1 << (hi - lo + 1)) - 1) << lo
        return IndexSet.from_mask(full & ~self.mask)

    def fanout(self) -> int:
        """Number of maximal contiguous blocks."""
        m = self.mask
        # a block starts at every set bit whose lower neighbour is unset
        return bin(m & ~(m << 1)).count("1")

    def issubset(self, other: "IndexSet") -> bool:
        return self.mask & ~other.mask == 0

    def isdisjoint(self, other: "IndexSet") -> bool:
        return self.mask & other.mask == 0

    def __or__(self, other: "IndexSet") -> "IndexSet":
        return IndexSet.from_mask(self.mask | other.mask)

    def __sub__(self, other: "IndexSet") -> "IndexSet":
        return IndexSet.from_mask(self.mask & ~other.mask)

    def __contains__(self, i) -> bool:
        return i >= 0 and bool(self.mask >> i & 1)

    def __iter__(self):
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __bool__(self) -> bool:
        return self.mask != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, IndexSet):
            return self.mask == other.mask
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.mask)

    def sortkey(self):
        """Construction order key: right-index, then size, then positions."""
        return (self.indices[-1] if self.indices else -1, len(self.indices), self.indices)

    def __repr__(self) -> str:
        return "{%s}" % ", ".join(map(str, self.indices))

    def __reduce__(self):
        return (IndexSet, (self.indices,))


def left_index(s: IndexSet) -> int:
    return s.left


def right_index(s: IndexSet) -> int:
    return s.right


def gap_set(s: IndexSet) -> IndexSet:
    """Positions strictly between min(s) and max(s) that are not in s."""
    return s.gap()


def boundary_tuple(s: IndexSet):
    """``(min(s), max(s), min(gap), max(gap))``; gap slots are None if no gap."""
    g = s.gap()
    if g:
        return (s.left, s.right, g.left, g.right)
    return (s.left, s.right, None, None)


def compatible(s: IndexSet, g: IndexSet) -> bool:
    """True iff ``s`` is included in ``g`` or disjoint from it."""
    return s.mask & ~g.mask == 0 or s.mask & g.mask == 0


def precedes(s: IndexSet, s2: IndexSet) -> bool:
    """The construction order: right-index first, then inclusion."""
    if s.right != s2.right:
        return s.right < s2.right
    return s.issubset(s2)


@dataclass(frozen=True)
class Constituent:
    label: str
    yld: IndexSet

    def __post_init__(self):
        if not self.yld:
            raise ValueError("constituent %r has an empty yield" % self.label)

    def __repr__(self) -> str:
        return "(%s, %r)" % (self.label, self.yld)


def _constituent_key(c: Constituent):
    return c.yld.sortkey()


@dataclass(frozen=True)
class DiscTree:
    """A discontinuous tree: tokens, POS tags and non-preterminal constituents.

    ``constituents`` is normalised to construction order (right-index, then
    size).  Constituents sharing a yield (unary chains) keep their relative
    order, which must be bottom-up.  ``synthetic_root`` records that the top
    ``ROOT`` node was added at ingestion and should be stripped on output.
    """

    tokens: tuple
    pos_tags: tuple
    constituents: tuple = ()
    synthetic_root: bool = field(default=False, compare=True)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "pos_tags", tuple(self.pos_tags))
        object.__setattr__(self, "constituents",
                           tuple(sorted(self.constituents, key=_constituent_key)))

    @property
    def n(self) -> int:
        return len(self.tokens)

    def constituent_set(self) -> frozenset:
        return frozenset(self.constituents)

    def labels_by_yield(self) -> dict:
        """Map yield -> label (meaningful for collapsed trees)."""
        return {c.yld: c.label for c in self.constituents}

    def root(self):
        full = IndexSet.span(0, self.n)
        for c in reversed(self.constituents):
            if c.yld == full:
                return c
        return None


class Violation(NamedTuple):
    kind: str
    constituents: tuple

    def __str__(self) -> str:
        return "%s: %s" % (self.kind, ", ".join(map(repr, self.constituents)))


def validate_tree(t: DiscTree, allow_unary_chains: bool = False) -> list:
    """Return every violated tree invariant; an empty list means valid.

    With ``allow_unary_chains`` several constituents may share a yield, which
    is the state of a tree before :func:`collapse_unaries`.
    """
    violations = []
    n = t.n
    if len(t.pos_tags) != n:
        violations.append(Violation(
            "length mismatch: %d tokens, %d tags" % (n, len(t.pos_tags)), ()))
    full = IndexSet.span(0, n)
    ok = []
    for c in t.constituents:
        if not c.yld.issubset(full):
            violations.append(Violation("index out of range", (c,)))
        else:
            ok.append(c)
    for a in range(len(ok)):
        for b in range(a + 1, len(ok)):
            s, g = ok[a].yld, ok[b].yld
            if not (compatible(s, g) or compatible(g, s)):
                violations.append(Violation("crossing membership", (ok[a], ok[b])))
            elif s == g and not allow_unary_chains:
                violations.append(Violation("duplicate yield", (ok[a], ok[b])))
    if n and not any(c.yld == full for c in ok):
        violations.append(Violation("missing root", ()))
    if n == 0:
        violations.append(Violation("empty sentence", ()))
    return violations


def collapse_unaries(t: DiscTree, sep: str = UNARY_SEP) -> DiscTree:
    """Merge constituents with identical yields into one label, top first.

    >>> t = DiscTree(("a", "b"), ("X", "Y"), (
    ...     Constituent("VP", IndexSet([1])), Constituent("NP", IndexSet([1])),
    ...     Constituent("S", IndexSet([0, 1]))))
    >>> collapse_unaries(t).constituents[0]
    (NP+VP, {1})
    """
    for c in t.constituents:
        if sep in c.label:
            raise ValueError("label %r contains the unary separator %r; "
                             "choose another separator" % (c.label, sep))
    chains = {}
    for c in t.constituents:  # bottom-up within a chain
        chains.setdefault(c.yld, []).append(c.label)
    merged = [Constituent(sep.join(reversed(labels)), yld)
              for yld, labels in chains.items()]
    return DiscTree(t.tokens, t.pos_tags, merged, t.synthetic_root)


def expand_unaries(t: DiscTree, sep: str = UNARY_SEP) -> DiscTree:
    """Inverse of :func:`collapse_unaries`."""
    out = []
    for c in t.constituents:
        for label in reversed(c.label.split(sep)):
            out.append(Constituent(label, c.yld))
    return DiscTree(t.tokens, t.pos_tags, out, t.synthetic_root)
