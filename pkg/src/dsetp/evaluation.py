"""Labelled bracket precision/recall/F over (label, yield) pairs."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .tree import UNARY_SEP, DiscTree, IndexSet, expand_unaries


@dataclass(frozen=True)
class EvalFilter:
    """Constituents labelled with ``root_labels`` are ignored; tokens whose
    gold POS tag is in ``punct_tags`` are deleted before comparison."""

    root_labels: frozenset = frozenset()
    punct_tags: frozenset = frozenset()


def _prf(matched, predicted, gold):
    if predicted == 0 and gold == 0:
        return 1.0, 1.0, 1.0
    p = matched / predicted if predicted else 0.0
    r = matched / gold if gold else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


@dataclass(frozen=True)
class EvalReport:
    matched: int = 0
    predicted: int = 0
    gold: int = 0
    disc_matched: int = 0
    disc_predicted: int = 0
    disc_gold: int = 0
    pos_correct: int = 0
    pos_total: int = 0

    def __add__(self, other: "EvalReport") -> "EvalReport":
        return EvalReport(*(a + b for a, b in zip(self._counts(), other._counts())))

    def _counts(self):
        return (self.matched, self.predicted, self.gold, self.disc_matched,
                self.disc_predicted, self.disc_gold, self.pos_correct, self.pos_total)

    @property
    def precision(self):
        return _prf(self.matched, self.predicted, self.gold)[0]

    @property
    def recall(self):
        return _prf(self.matched, self.predicted, self.gold)[1]

    @property
    def f1(self):
        return _prf(self.matched, self.predicted, self.gold)[2]

    @property
    def disc_precision(self):
        return _prf(self.disc_matched, self.disc_predicted, self.disc_gold)[0]

    @property
    def disc_recall(self):
        return _prf(self.disc_matched, self.disc_predicted, self.disc_gold)[1]

    @property
    def disc_f1(self):
        return _prf(self.disc_matched, self.disc_predicted, self.disc_gold)[2]

    @property
    def pos_accuracy(self):
        return self.pos_correct / self.pos_total if self.pos_total else 1.0

    def summary(self) -> str:
        return "F %.2f P %.2f R %.2f DISC-F %.2f DISC-P %.2f DISC-R %.2f POS %.2f" % tuple(
            100 * v for v in (self.f1, self.precision, self.recall, self.disc_f1,
                              self.disc_precision, self.disc_recall, self.pos_accuracy))


def _brackets(t: DiscTree, keep: dict, ignore: EvalFilter, sep: str) -> Counter:
    result = Counter()
    for c in expand_unaries(t, sep).constituents:
        if c.label in ignore.root_labels:
            continue
        yld = IndexSet(keep[i] for i in c.yld if i in keep)
        if yld:
            result[c.label, yld] += 1
    return result


def labelled_fscore(pred: DiscTree, gold: DiscTree, ignore: EvalFilter = EvalFilter(),
                    sep: str = UNARY_SEP) -> EvalReport:
    """Compare two trees over the same sentence.

    Unary chains are expanded so that every node counts once.  Punctuation
    positions are decided by the gold tags and removed from both sides; the
    remaining positions are renumbered, so gaps made only of punctuation do
    not make a constituent discontinuous.
    """
    if pred.n != gold.n:
        raise ValueError("length mismatch: predicted tree has %d tokens, gold has %d"
                         % (pred.n, gold.n))
    kept = [i for i, tag in enumerate(gold.pos_tags) if tag not in ignore.punct_tags]
    keep = {old: new for new, old in enumerate(kept)}
    p = _brackets(pred, keep, ignore, sep)
    g = _brackets(gold, keep, ignore, sep)
    common = p & g
    pdisc = Counter({k: v for k, v in p.items() if k[1].gap()})
    gdisc = Counter({k: v for k, v in g.items() if k[1].gap()})
    pos_correct = sum(a == b for a, b in zip(pred.pos_tags, gold.pos_tags))
    return EvalReport(
        matched=sum(common.values()), predicted=sum(p.values()), gold=sum(g.values()),
        disc_matched=sum((pdisc & gdisc).values()), disc_predicted=sum(pdisc.values()),
        disc_gold=sum(gdisc.values()), pos_correct=pos_correct, pos_total=gold.n)


def evaluate_corpus(preds, golds, ignore: EvalFilter = EvalFilter(),
                    sep: str = UNARY_SEP) -> EvalReport:
    preds, golds = list(preds), list(golds)
    if len(preds) != len(golds):
        raise ValueError("%d predicted trees for %d gold trees" % (len(preds), len(golds)))
    total = EvalReport()
    for k, (p, g) in enumerate(zip(preds, golds)):
        try:
            total = total + labelled_fscore(p, g, ignore, sep)
        except ValueError as err:
            raise ValueError("sentence %d: %s" % (k + 1, err)) from None
    return total
