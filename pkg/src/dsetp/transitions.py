"""The set-based transition system.

A configuration holds a memory ``S`` of pending index sets, a focus item,
the buffer position ``i``, the constituents built so far and the step
counter ``j``.  Structural actions (SHIFT, COMB-k) happen at even steps and
labelling actions (LABEL-X, NOLABEL) at odd steps, so every derivation of
an ``n``-token sentence has exactly ``4n - 2`` steps.

Memory items are addressed by their left-index, which is unique because the
memory and the focus partition ``{0, ..., i-1}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .tree import Constituent, IndexSet

SHIFT_KIND, COMB_KIND, LABEL_KIND, NOLABEL_KIND = "SHIFT", "COMB", "LABEL", "NOLABEL"


@dataclass(frozen=True)
class Action:
    kind: str
    arg: object = None

    @property
    def structural(self) -> bool:
        return self.kind in (SHIFT_KIND, COMB_KIND)

    def __str__(self) -> str:
        if self.kind == COMB_KIND:
            return "COMB-%d" % self.arg
        if self.kind == LABEL_KIND:
            return "LABEL-%s" % self.arg
        return self.kind

    __repr__ = __str__

    @classmethod
    def parse(cls, text: str) -> "Action":
        if text == SHIFT_KIND:
            return SHIFT
        if text == NOLABEL_KIND:
            return NOLABEL
        if text.startswith("COMB-") and text[5:].isdigit():
            return combine(int(text[5:]))
        if text.startswith("LABEL-") and len(text) > 6:
            return label(text[6:])
        raise ValueError("unknown action %r" % text)


SHIFT = Action(SHIFT_KIND)
NOLABEL = Action(NOLABEL_KIND)


def combine(key: int) -> Action:
    return Action(COMB_KIND, key)


def label(x: str) -> Action:
    return Action(LABEL_KIND, x)


def format_derivation(actions) -> str:
    return " ".join(map(str, actions))


def parse_derivation(text: str) -> list:
    return [Action.parse(tok) for tok in text.split()]


class IllegalAction(ValueError):
    pass


class ReplayError(IllegalAction):
    def __init__(self, step, message):
        super().__init__("step %d: %s" % (step, message))
        self.step = step


@dataclass(frozen=True)
class Configuration:
    """Parser state; ``memory`` is kept in insertion order, which is also
    increasing right-index order."""

    n: int
    memory: tuple = ()
    focus: Optional[IndexSet] = None
    i: int = 0
    built: frozenset = frozenset()
    j: int = 0

    def member(self, key: int) -> IndexSet:
        for s in self.memory:
            if s.left == key:
                return s
        raise KeyError(key)

    def memory_by_left(self) -> list:
        return sorted(self.memory, key=lambda s: s.left)

    @property
    def structural_step(self) -> bool:
        return self.j % 2 == 0

    def is_goal(self) -> bool:
        return (not self.memory and self.i == self.n and self.focus is not None
                and len(self.focus) == self.n and self.j == 4 * self.n - 2)

    def forced_label(self) -> bool:
        """True at the odd step where NOLABEL is not allowed."""
        return self.i == self.n and not self.memory

    def legal_actions(self, labels=()) -> list:
        if self.is_goal():
            return []
        if self.j % 2 == 0:
            acts = [SHIFT] if self.i < self.n else []
            if self.focus is not None:
                acts.extend(combine(s.left) for s in self.memory_by_left())
            return acts
        acts = [label(x) for x in labels]
        if not self.forced_label():
            acts.append(NOLABEL)
        return acts

    def check(self, a: Action):
        """Raise IllegalAction naming the violated precondition."""
        if self.is_goal():
            raise IllegalAction("%s: configuration is final" % a)
        if a.structural and self.j % 2:
            raise IllegalAction("%s requires an even step (j=%d)" % (a, self.j))
        if not a.structural and self.j % 2 == 0:
            raise IllegalAction("%s requires an odd step (j=%d)" % (a, self.j))
        if a.kind == SHIFT_KIND:
            if self.i >= self.n:
                raise IllegalAction("SHIFT requires i < n (i=%d, n=%d)" % (self.i, self.n))
        elif a.kind == COMB_KIND:
            if self.focus is None:
                raise IllegalAction("%s requires a focus item" % a)
            if not any(s.left == a.arg for s in self.memory):
                raise IllegalAction("%s: no memory item with left-index %r" % (a, a.arg))
        elif a.kind == NOLABEL_KIND:
            if self.forced_label():
                raise IllegalAction("NOLABEL requires i != n or a non-empty memory")
        elif a.kind != LABEL_KIND:
            raise IllegalAction("unknown action kind %r" % a.kind)

    def apply(self, a: Action) -> "Configuration":
        self.check(a)
        if a.kind == SHIFT_KIND:
            memory = self.memory if self.focus is None else self.memory + (self.focus,)
            return Configuration(self.n, memory, IndexSet.from_mask(1 << self.i),
                                 self.i + 1, self.built, self.j + 1)
        if a.kind == COMB_KIND:
            s = self.member(a.arg)
            memory = tuple(m for m in self.memory if m is not s)
            return Configuration(self.n, memory, self.focus | s, self.i,
                                 self.built, self.j + 1)
        if a.kind == LABEL_KIND:
            return Configuration(self.n, self.memory, self.focus, self.i,
                                 self.built | {Constituent(a.arg, self.focus)}, self.j + 1)
        return Configuration(self.n, self.memory, self.focus, self.i, self.built, self.j + 1)


def initial(n: int) -> Configuration:
    if n < 1:
        raise ValueError("sentence length must be at least 1")
    return Configuration(n)


def is_goal(c: Configuration, n: Optional[int] = None) -> bool:
    if n is not None and n != c.n:
        return False
    return c.is_goal()


def legal_actions(c: Configuration, labels=()) -> list:
    return c.legal_actions(labels)


def apply(c: Configuration, a: Action) -> Configuration:
    return c.apply(a)


def replay(n: int, actions) -> Configuration:
    """Run ``actions`` from the initial configuration; the error reports the
    index of the first illegal step."""
    c = initial(n)
    for step, a in enumerate(actions):
        try:
            c = c.apply(a)
        except IllegalAction as err:
            raise ReplayError(step, str(err)) from None
    return c


def derivation_configurations(n: int, actions) -> list:
    """All configurations visited by a derivation, the last one included."""
    c = initial(n)
    result = [c]
    for a in actions:
        c = c.apply(a)
        result.append(c)
    return result
