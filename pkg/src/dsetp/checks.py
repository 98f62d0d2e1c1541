"""Executable checks of the oracles, and derivation statistics."""
from __future__ import annotations

from collections import Counter

import numpy as np

from .oracle import (constituent_reachable, dynamic_oracle, exhaustive_best_f,
                     reachable_yields, static_oracle)
from .transitions import COMB_KIND, SHIFT_KIND, derivation_configurations, initial, replay

EPS = 1e-12


def check_static(tree, static=static_oracle) -> list:
    """Round-trip and length law for the canonical derivation."""
    n = tree.n
    try:
        actions = static(tree)
        final = replay(n, actions)
    except ValueError as err:
        return ["static oracle failed: %s" % err]
    problems = []
    if len(actions) != 4 * n - 2:
        problems.append("derivation has %d actions, expected %d" % (len(actions), 4 * n - 2))
    kinds = Counter(a.kind for a in actions)
    if kinds[SHIFT_KIND] != n or kinds[COMB_KIND] != n - 1:
        problems.append("derivation has %d SHIFT / %d COMB for n=%d"
                        % (kinds[SHIFT_KIND], kinds[COMB_KIND], n))
    if not final.is_goal():
        problems.append("static derivation does not end in a final configuration")
    elif final.built != tree.constituent_set():
        problems.append("static derivation does not rebuild the tree")
    return problems


def follow_oracle(tree, prefix=(), dynamic=dynamic_oracle) -> list:
    """Configurations visited by ``prefix`` then by the tie-broken oracle."""
    c = initial(tree.n)
    path = [c]
    for a in prefix:
        c = c.apply(a)
        path.append(c)
    while not c.is_goal():
        c = c.apply(dynamic(c, tree).canonical)
        path.append(c)
    return path


def random_prefix(tree, rng, labels):
    """A random sequence of legal actions, cut at a random length."""
    length = int(rng.integers(0, 4 * tree.n - 2))
    c = initial(tree.n)
    prefix = []
    for _ in range(length):
        acts = c.legal_actions(labels)
        a = acts[int(rng.integers(len(acts)))]
        prefix.append(a)
        c = c.apply(a)
    return prefix


def check_reachability(c, tree) -> list:
    brute = reachable_yields(c)
    return ["reachability of %r disagrees with search at %r" % (x, c)
            for x in tree.constituents
            if x not in c.built and constituent_reachable(c, x.yld) != (x.yld in brute)]


def check_soundness(c, tree, labels, dynamic=dynamic_oracle, max_n=None) -> list:
    """Oracle actions keep the best reachable F; at labelling steps no other
    action does better."""
    if c.is_goal():
        return []
    max_n = max(tree.n, 1) if max_n is None else max_n
    best = exhaustive_best_f(c, tree, max_n)
    answer = dynamic(c, tree)
    problems = []
    legal = c.legal_actions(labels)
    for a in answer.actions:
        if a not in legal:
            problems.append("oracle action %s is illegal at %r" % (a, c))
            continue
        f = exhaustive_best_f(c.apply(a), tree, max_n)
        if abs(f - best) > EPS:
            problems.append("oracle action %s lowers best F %.4f -> %.4f at %r"
                            % (a, best, f, c))
    if answer.canonical not in answer.actions:
        problems.append("canonical action %s not in the answer set" % answer.canonical)
    if c.j % 2:
        for a in legal:
            if a not in answer.actions and \
                    exhaustive_best_f(c.apply(a), tree, max_n) > best + EPS:
                problems.append("excluded action %s beats the oracle at %r" % (a, c))
    return problems


def check_tree(tree, rng=None, exhaustive_max=6, perturb=1, labels=None,
               static=static_oracle, dynamic=dynamic_oracle) -> list:
    """All oracle checks for one tree; returns a list of problems."""
    problems = check_static(tree, static)
    try:
        path = follow_oracle(tree, dynamic=dynamic)
        if path[-1].built != tree.constituent_set():
            problems.append("following the dynamic oracle does not rebuild the tree")
    except ValueError as err:
        return problems + ["dynamic oracle failed: %s" % err]
    if tree.n > exhaustive_max:
        return problems
    rng = rng if rng is not None else np.random.default_rng(0)
    labels = sorted({x.label for x in tree.constituents}) if labels is None else labels
    paths = [path]
    for _ in range(perturb):
        paths.append(follow_oracle(tree, random_prefix(tree, rng, labels), dynamic))
    seen = set()
    for p in paths:
        for c in p:
            if c in seen:
                continue
            seen.add(c)
            problems.extend(check_reachability(c, tree))
            problems.extend(check_soundness(c, tree, labels, dynamic))
    return problems


def memory_histogram(trees) -> Counter:
    """|S| at every structural decision of the canonical derivations."""
    sizes = Counter()
    for t in trees:
        for c in derivation_configurations(t.n, static_oracle(t))[:-1]:
            if c.j % 2 == 0:
                sizes[len(c.memory)] += 1
    return sizes


def gap_degrees(trees) -> Counter:
    """Number of gaps (fan-out minus one) of every constituent."""
    return Counter(x.yld.fanout() - 1 for t in trees for x in t.constituents)
