import pytest

from dsetp.evaluation import EvalFilter, EvalReport, evaluate_corpus, labelled_fscore
from dsetp.tree import Constituent, DiscTree, IndexSet


def tree(n, cs, tags=None):
    return DiscTree(tuple("w%d" % i for i in range(n)), tags or ("T",) * n,
                    tuple(Constituent(x, IndexSet(y)) for x, y in cs))


def test_identity(ref_tree):
    r = labelled_fscore(ref_tree, ref_tree)
    assert r.precision == r.recall == r.f1 == 1.0
    assert r.disc_f1 == 1.0 and r.pos_accuracy == 1.0


def test_two_of_three_against_four():
    gold = tree(4, [("S", range(4)), ("A", (0, 1)), ("B", (2, 3)), ("C", (3,))])
    pred = tree(4, [("S", range(4)), ("A", (0, 1)), ("X", (2, 3))])
    r = labelled_fscore(pred, gold)
    assert (r.precision, r.recall) == (2 / 3, 1 / 2)
    assert r.f1 == pytest.approx(4 / 7, abs=1e-12)
    assert r.summary().startswith("F 57.14 P 66.67 R 50.00")


def test_disc_scores_on_reference_tree(ref_tree):
    pred = DiscTree(ref_tree.tokens, ref_tree.pos_tags,
                    tuple(x for x in ref_tree.constituents if x.yld != IndexSet((1, 6))))
    r = labelled_fscore(pred, ref_tree)
    assert (r.disc_gold, r.disc_predicted, r.disc_matched) == (2, 1, 1)
    assert r.disc_precision == 1.0 and r.disc_recall == 0.5
    assert r.disc_f1 == pytest.approx(2 / 3, abs=1e-12)


def test_root_filter(ref_tree):
    r = labelled_fscore(ref_tree, ref_tree, EvalFilter(root_labels=frozenset({"SBARQ"})))
    assert r.gold == 5 and r.f1 == 1.0


def test_punctuation_renumbering():
    # the gap of {0, 2} is only punctuation: after deletion it is continuous
    gold = tree(3, [("S", (0, 1, 2)), ("A", (0, 2))], tags=("N", ",", "V"))
    r = labelled_fscore(gold, gold, EvalFilter(punct_tags=frozenset({","})))
    assert r.gold == 2 and r.disc_gold == 0


def test_constituent_emptied_by_filter_is_dropped():
    gold = tree(2, [("S", (0, 1)), ("P", (1,))], tags=("N", "."))
    r = labelled_fscore(gold, gold, EvalFilter(punct_tags=frozenset({"."})))
    assert r.gold == 1


def test_empty_sets_score_one():
    gold = tree(1, [("S", (0,))])
    r = labelled_fscore(gold, gold, EvalFilter(root_labels=frozenset({"S"})))
    assert (r.predicted, r.gold, r.f1) == (0, 0, 1.0)


def test_unary_chains_count_every_label():
    gold = tree(2, [("S", (0, 1)), ("NP+N", (1,))])
    pred = tree(2, [("S", (0, 1)), ("NP", (1,))])
    r = labelled_fscore(pred, gold)
    assert (r.matched, r.predicted, r.gold) == (2, 2, 3)


def test_pos_accuracy():
    gold = tree(2, [("S", (0, 1))], tags=("A", "B"))
    pred = tree(2, [("S", (0, 1))], tags=("A", "C"))
    assert labelled_fscore(pred, gold).pos_accuracy == 0.5


def test_length_mismatch():
    with pytest.raises(ValueError, match="length"):
        labelled_fscore(tree(1, [("S", (0,))]), tree(2, [("S", (0, 1))]))


def test_corpus_counts_are_summed(ref_tree):
    r = evaluate_corpus([ref_tree, ref_tree], [ref_tree, ref_tree])
    one = labelled_fscore(ref_tree, ref_tree)
    assert r.gold == 12 and r == one + one
    with pytest.raises(ValueError):
        evaluate_corpus([ref_tree], [])
    assert EvalReport().f1 == 1.0
