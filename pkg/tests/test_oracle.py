import numpy as np
import pytest

from conftest import REF_DERIVATION
from dsetp.generate import random_tree
from dsetp.oracle import (constituent_reachable, dynamic_oracle, exhaustive_best_f,
                          next_constituent, reach, reachable_yields, static_oracle, tie_break)
from dsetp.transitions import (NOLABEL, SHIFT, Configuration, combine,
                               derivation_configurations, format_derivation, initial, label,
                               parse_derivation)
from dsetp.tree import Constituent, DiscTree, IndexSet


def S(*xs):
    return IndexSet(xs)


def flat(n, label_="X"):
    return DiscTree(tuple("w%d" % i for i in range(n)), ("T",) * n,
                    (Constituent(label_, IndexSet(range(n))),))


def after(prefix_len, ref_tree=None):
    return derivation_configurations(8, parse_derivation(REF_DERIVATION))[prefix_len]


AFTER_NP = 12     # configuration right after LABEL-NP, focus {3, 4}
AFTER_VP16 = 20   # right after LABEL-VP on {1, 6}


def test_reachable_examples():
    c = Configuration(6, (S(0), S(1, 2)), S(3), 4, frozenset(), 8)
    assert constituent_reachable(c, S(1, 2, 3, 5))
    assert S(1, 2, 3, 5) in reachable_yields(c)
    c = Configuration(6, (S(1, 2),), S(3), 4, frozenset(), 8)
    assert not constituent_reachable(c, S(2, 3))
    assert S(2, 3) not in reachable_yields(c)
    c = after(AFTER_NP)
    assert c.focus == S(3, 4) and constituent_reachable(c, S(1, 6))


def test_focus_is_unreachable_once_labelled():
    c = initial(3).apply(SHIFT)
    assert constituent_reachable(c, S(0))
    assert not constituent_reachable(c.apply(NOLABEL), S(0))


def test_reach_after_np(ref_tree):
    c = after(AFTER_NP)
    assert {(x.label, tuple(x.yld)) for x in reach(c, ref_tree)} == {
        ("VP", (1, 6)), ("VP", (1, 5, 6)), ("SQ", (1, 2, 3, 4, 5, 6)),
        ("SBARQ", tuple(range(8)))}
    assert next_constituent(c, ref_tree) == Constituent("VP", S(1, 6))


def test_reach_at_ends(ref_tree):
    assert reach(initial(8), ref_tree) == set(ref_tree.constituents)
    goal = derivation_configurations(8, parse_derivation(REF_DERIVATION))[-1]
    assert reach(goal, ref_tree) == set() and next_constituent(goal, ref_tree) is None


def test_next_after_first_vp(ref_tree):
    c = after(AFTER_VP16)
    assert c.focus == S(1, 6)
    assert next_constituent(c, ref_tree) == Constituent("VP", S(1, 5, 6))


def test_dynamic_oracle_reference_rows(ref_tree):
    configs = derivation_configurations(8, parse_derivation(REF_DERIVATION))
    c = configs[3]
    assert c.focus == S(1) and dynamic_oracle(c, ref_tree).actions == {label("WHNP")}
    c = configs[18]
    assert c.focus == S(6) and S(1) in c.memory
    assert dynamic_oracle(c, ref_tree).actions == {combine(1)}
    # soundness without completeness: the canonical derivation combines here
    c = configs[AFTER_NP]
    assert dynamic_oracle(c, ref_tree).actions == {SHIFT}
    assert parse_derivation(REF_DERIVATION)[AFTER_NP] == combine(2)


def test_dynamic_oracle_rejects_goal(ref_tree):
    goal = derivation_configurations(8, parse_derivation(REF_DERIVATION))[-1]
    with pytest.raises(ValueError):
        dynamic_oracle(goal, ref_tree)


def test_tie_break():
    c = Configuration(5, (S(0), S(2, 3)), S(4), 5, frozenset(), 10)
    assert tie_break({SHIFT, combine(0)}, c) == combine(0)
    assert tie_break({combine(0), combine(2)}, c) == combine(2)
    assert tie_break({SHIFT}, c) == SHIFT
    assert tie_break({label("X")}, c) == label("X")
    with pytest.raises(ValueError):
        tie_break(set(), c)


def test_static_oracle_reference(ref_tree):
    assert format_derivation(static_oracle(ref_tree)) == REF_DERIVATION


def test_static_oracle_small_cases():
    assert static_oracle(flat(1)) == [SHIFT, label("X")]
    assert format_derivation(static_oracle(flat(3))) == (
        "SHIFT NOLABEL SHIFT NOLABEL COMB-0 NOLABEL SHIFT NOLABEL COMB-0 LABEL-X")


def test_static_oracle_rejects_invalid_tree():
    t = DiscTree(("a", "b"), ("T", "T"), (Constituent("X", S(0)),))
    with pytest.raises(ValueError):
        static_oracle(t)


def test_exhaustive_best_f_cases(ref_tree):
    assert exhaustive_best_f(initial(3), flat(3)) == 1.0
    goal = derivation_configurations(8, parse_derivation(REF_DERIVATION))[-1]
    assert exhaustive_best_f(goal, ref_tree, max_n=8) == 1.0
    # gold {S:{0,1,2}, A:{0,1}}; combining 1 and 2 first loses A for good
    gold = DiscTree(("a", "b", "c"), ("T",) * 3,
                    (Constituent("S", S(0, 1, 2)), Constituent("A", S(0, 1))))
    c = initial(3)
    for a in [SHIFT, NOLABEL, SHIFT, NOLABEL, SHIFT, NOLABEL, combine(1)]:
        c = c.apply(a)
    # best completion builds only S: P = 1, R = 1/2
    assert exhaustive_best_f(c, gold) == pytest.approx(2 / 3)
    # a wrong label already in C lowers precision
    c = initial(3).apply(SHIFT).apply(label("B"))
    assert exhaustive_best_f(c, gold) == pytest.approx(4 / 5)


def test_exhaustive_best_f_size_limit():
    with pytest.raises(ValueError):
        exhaustive_best_f(initial(9), flat(9))


def test_following_the_oracle_from_a_wrong_prefix_finishes():
    rng = np.random.default_rng(3)
    for _ in range(20):
        t = random_tree(rng, int(rng.integers(2, 7)))
        c = initial(t.n)
        for _ in range(int(rng.integers(0, 4 * t.n - 2))):
            acts = c.legal_actions(["S", "NP"])
            c = c.apply(acts[int(rng.integers(len(acts)))])
        best = exhaustive_best_f(c, t)
        while not c.is_goal():
            c = c.apply(dynamic_oracle(c, t).canonical)
        built = len(c.built & t.constituent_set())
        f = 2 * built / (len(c.built) + len(t.constituents))
        assert f == pytest.approx(best)
