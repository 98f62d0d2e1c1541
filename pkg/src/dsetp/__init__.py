"""Discontinuous constituency parsing with a set-based transition system.

The pure-Python core (trees, transitions, oracles, evaluation, I/O) does not
import torch; the scorer lives in :mod:`dsetp.model`, :mod:`dsetp.training`
and :mod:`dsetp.persist`.
"""
from .evaluation import EvalFilter, EvalReport, evaluate_corpus, labelled_fscore
from .oracle import (OracleAnswer, constituent_reachable, dynamic_oracle,
                     exhaustive_best_f, next_constituent, reach, static_oracle, tie_break)
from .transitions import (NOLABEL, SHIFT, Action, Configuration, IllegalAction, ReplayError,
                          combine, initial, is_goal, label, legal_actions, replay)
from .tree import (Constituent, DiscTree, IndexSet, collapse_unaries, expand_unaries,
                   validate_tree)
from .treebank import (Corpus, TreebankError, Vocabulary, build_vocabularies,
                       parse_tree, read_discbracket, read_trees, write_discbracket,
                       write_trees)

__version__ = "0.1.0"

__all__ = [
    "Action", "Configuration", "Constituent", "Corpus", "DiscTree", "EvalFilter",
    "EvalReport", "IllegalAction", "IndexSet", "NOLABEL", "OracleAnswer", "ReplayError",
    "SHIFT", "TreebankError", "Vocabulary", "build_vocabularies", "collapse_unaries",
    "combine", "constituent_reachable", "dynamic_oracle", "evaluate_corpus",
    "exhaustive_best_f", "expand_unaries", "initial", "is_goal", "label",
    "labelled_fscore", "legal_actions", "next_constituent", "parse_tree", "reach",
    "read_discbracket", "read_trees", "replay", "static_oracle", "tie_break",
    "validate_tree", "write_discbracket", "write_trees",
]
