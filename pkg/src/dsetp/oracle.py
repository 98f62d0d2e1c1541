"""Static and dynamic oracles, plus exhaustive reference searches.

The exhaustive functions enumerate every legal completion of a
configuration and are only meant for short sentences; they serve as
independent checks of the closed-form reachability conditions and of the
optimality of the dynamic oracle.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .tree import DiscTree, IndexSet, compatible, precedes, validate_tree
from .transitions import (COMB_KIND, NOLABEL, SHIFT, Action, Configuration, combine,
                          initial, label)

EXHAUSTIVE_MAX_N = 7


def constituent_reachable(c: Configuration, g: IndexSet) -> bool:
    """Whether a gold yield not yet in ``c.built`` can still be labelled.

    ``g`` must not start before the focus' right-index, and must not split
    any memory item or the focus.  At an even step the focus has already had
    its labelling decision, so ``g == focus`` is no longer reachable.
    """
    f = c.focus
    if f is not None:
        if f.right > g.right:
            return False
        if not compatible(f, g):
            return False
        if c.j % 2 == 0 and f == g:
            return False
    return all(compatible(s, g) for s in c.memory)


def reach(c: Configuration, gold: DiscTree) -> set:
    return {x for x in gold.constituents
            if x not in c.built and constituent_reachable(c, x.yld)}


def next_constituent(c: Configuration, gold: DiscTree):
    """The first reachable gold constituent in construction order."""
    best = None
    for x in reach(c, gold):
        if best is None or precedes(x.yld, best.yld):
            best = x
    return best


@dataclass(frozen=True)
class OracleAnswer:
    actions: frozenset
    canonical: Action


def tie_break(actions, c: Configuration) -> Action:
    """Prefer COMB over SHIFT, and the memory item with the greatest
    right-index among COMB actions."""
    actions = list(actions)
    if not actions:
        raise ValueError("tie_break over an empty action set")
    if not actions[0].structural:
        if len(actions) != 1:
            raise ValueError("labelling answers are singletons: %r" % actions)
        return actions[0]
    combs = [a for a in actions if a.kind == COMB_KIND]
    if combs:
        return max(combs, key=lambda a: c.member(a.arg).right)
    return SHIFT


def dynamic_oracle(c: Configuration, gold: DiscTree) -> OracleAnswer:
    if c.is_goal():
        raise ValueError("no oracle action for a final configuration")
    if c.j % 2:
        x = gold.labels_by_yield().get(c.focus)
        a = label(x) if x is not None else NOLABEL
        return OracleAnswer(frozenset([a]), a)
    if c.focus is None:
        return OracleAnswer(frozenset([SHIFT]), SHIFT)
    nxt = next_constituent(c, gold)
    if nxt is None:
        acts = c.legal_actions()
    else:
        sg = nxt.yld
        acts = [combine(s.left) for s in c.memory if (c.focus | s).issubset(sg)]
        if sg.right > c.focus.right:
            acts.append(SHIFT)
    acts = frozenset(acts)
    return OracleAnswer(acts, tie_break(acts, c))


def _tree_consistent(c: Configuration, gold: DiscTree) -> bool:
    return all(x in c.built or constituent_reachable(c, x.yld)
               for x in gold.constituents)


def static_oracle(gold: DiscTree) -> list:
    """Canonical derivation: combine as early as possible, with the most
    recent memory item first."""
    bad = validate_tree(gold)
    if bad:
        raise ValueError("invalid tree: %s" % "; ".join(map(str, bad)))
    labels = gold.labels_by_yield()
    c = initial(gold.n)
    actions = []
    while not c.is_goal():
        if c.j % 2:
            x = labels.get(c.focus)
            a = label(x) if x is not None else NOLABEL
        else:
            a = None
            if c.focus is not None:
                for s in reversed(c.memory):  # decreasing right-index
                    if _tree_consistent(c.apply(combine(s.left)), gold):
                        a = combine(s.left)
                        break
            if a is None:
                if c.i >= c.n:
                    raise ValueError("tree cannot be derived (stuck at step %d)" % c.j)
                a = SHIFT
        actions.append(a)
        c = c.apply(a)
    if c.built != gold.constituent_set():
        raise AssertionError("static oracle did not reconstruct the tree")
    return actions


def _structural_successors(memory, focus, i, n):
    """Successor structural states of ``(memory, focus, i)``, as bitmasks."""
    if i < n:
        yield (memory if focus is None else tuple(sorted(memory + (focus,))),
               1 << i, i + 1)
    if focus is not None:
        for k, s in enumerate(memory):
            yield memory[:k] + memory[k + 1:], focus | s, i


def reachable_yields(c: Configuration) -> set:
    """Every focus yield that receives a labelling decision in some legal
    completion of ``c`` (brute force)."""
    n = c.n
    start = (tuple(sorted(s.mask for s in c.memory)),
             None if c.focus is None else c.focus.mask, c.i)
    found = set()
    if c.j % 2 and c.focus is not None:
        found.add(c.focus.mask)
    seen = {start}
    todo = [start]
    while todo:
        state = todo.pop()
        for nxt in _structural_successors(*state, n):
            found.add(nxt[1])
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return {IndexSet.from_mask(m) for m in found}


def _f1(matched, predicted, gold):
    if predicted == 0 and gold == 0:
        return 1.0
    if matched == 0:
        return 0.0
    return 2 * matched / (predicted + gold)


@lru_cache(maxsize=32)
def _completion_search(n: int, gold_masks: frozenset):
    """Most gold yields that the remaining structural steps can still
    label, from a structural state.  A yield is a focus at most once per
    derivation, so the count does not depend on what was built before."""
    full = (1 << n) - 1

    @lru_cache(maxsize=None)
    def best(memory, focus, i):
        if not memory and i == n and focus == full:
            return 0
        result = -1
        for nxt in _structural_successors(memory, focus, i, n):
            result = max(result, (nxt[1] in gold_masks) + best(*nxt))
        return result

    return best


def exhaustive_best_f(c: Configuration, gold: DiscTree,
                      max_n: int = EXHAUSTIVE_MAX_N) -> float:
    """Best labelled F1 over all completions of ``c``.

    Each labelling step only considers the gold label of the focus (if any)
    and NOLABEL: a wrong label can only lower precision.
    """
    n = c.n
    if n > max_n:
        raise ValueError("exhaustive search limited to n <= %d (got %d)" % (max_n, n))
    gold_set = gold.constituent_set()
    gold_masks = frozenset(x.yld.mask for x in gold.constituents)
    if (1 << n) - 1 not in gold_masks:
        raise ValueError("gold tree has no root constituent")
    best = _completion_search(n, gold_masks)
    memory = tuple(sorted(s.mask for s in c.memory))
    focus = None if c.focus is None else c.focus.mask
    extra = 0
    if not c.is_goal():
        extra = best(memory, focus, c.i)
        if c.j % 2 and focus in gold_masks:
            extra += 1
    matched = len(c.built & gold_set) + extra
    return _f1(matched, len(c.built) + extra, len(gold_set))
