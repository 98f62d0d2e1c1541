"""Boundary-based scorer with a joint POS tagger.

Tokens are encoded by a character bi-LSTM concatenated with a word
embedding, then by a stack of sentence-level bi-LSTMs.  An index set ``s``
is represented by the top-layer vectors at ``min(s)``, ``max(s)`` and at the
two ends of its gap (a learned ``h_nil`` vector stands in when there is no
gap).  Structural actions are scored one column at a time by a feedforward
net applied to ``[r(s_k); r(s_f)]``; labels by a second feedforward net on
``r(s_f)``; POS tags from the first recurrent layer.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import NamedTuple

import torch
import torch.nn.functional as F
from torch import nn
from torch.nn.utils.rnn import pack_padded_sequence

from .transitions import (NOLABEL, NOLABEL_KIND, SHIFT, Configuration, combine, initial,
                          label)
from .tree import DiscTree, IndexSet


@dataclass(frozen=True)
class ModelConfig:
    dim_word_emb: int = 32
    dim_char_emb: int = 100
    dim_char_rnn: int = 50
    dim_sent_rnn: int = 200
    dim_hidden: int = 200
    sent_rnn_layers: int = 2
    learning_rate: float = 0.01
    decay: float = 1e-7
    dropout_tagger: float = 0.5
    dropout_parser: float = 0.2
    epochs: int = 100
    grad_clip_norm: float = 100.0
    explore_prob: float = 0.15
    unk_prob: float = 0.3
    unk_fraction: float = 2 / 3
    warmup_steps: int = 1000
    grad_noise: bool = True
    grad_noise_eta: float = 0.01
    grad_noise_gamma: float = 0.55
    seed: int = 0

    def __post_init__(self):
        for name in ("dim_word_emb", "dim_char_emb", "dim_char_rnn", "dim_sent_rnn",
                     "dim_hidden", "sent_rnn_layers", "epochs"):
            if getattr(self, name) <= 0:
                raise ValueError("%s must be positive" % name)
        for name in ("dropout_tagger", "dropout_parser", "explore_prob", "unk_prob",
                     "unk_fraction"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError("%s must be in [0, 1]" % name)
        if self.warmup_steps < 0 or self.learning_rate <= 0:
            raise ValueError("invalid optimisation settings")

    def replace(self, **overrides) -> "ModelConfig":
        return dataclasses.replace(self, **overrides)

    def to_json(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_json(cls, obj) -> "ModelConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(obj) - names
        if unknown:
            raise ValueError("unknown configuration keys: %s" % ", ".join(sorted(unknown)))
        return cls(**obj)


PRESETS = {
    "full": ModelConfig(),
    # small corpora give few updates: a larger step keeps the running
    # average (taken from the first update) close to the live weights
    "desk": ModelConfig(dim_word_emb=16, dim_char_emb=32, dim_char_rnn=16,
                        dim_sent_rnn=32, dim_hidden=32, learning_rate=0.05),
    "tiny": ModelConfig(dim_word_emb=4, dim_char_emb=4, dim_char_rnn=3,
                        dim_sent_rnn=5, dim_hidden=6),
}


class SentenceEncoding(NamedTuple):
    h1: torch.Tensor   # (n, 2 * dim_sent_rnn), first recurrent layer
    h2: torch.Tensor   # (n, 2 * dim_sent_rnn), last recurrent layer


def boundary_positions(s: IndexSet, nil: int):
    """Rows of the encoding table used to represent ``s``; ``nil`` is the
    row holding ``h_nil``."""
    g = s.gap()
    if g:
        return (s.left, s.right, g.left, g.right)
    return (s.left, s.right, nil, nil)


def _feedforward(d_in, d_hidden, d_out):
    return nn.Sequential(nn.Linear(d_in, d_hidden), nn.Tanh(),
                         nn.Linear(d_hidden, d_hidden), nn.Tanh(),
                         nn.Linear(d_hidden, d_out))


class SetParserNet(nn.Module):
    def __init__(self, config: ModelConfig, vocab):
        super().__init__()
        self.config = config
        self.vocab = vocab
        d = 2 * config.dim_sent_rnn
        self.word_emb = nn.Embedding(len(vocab.words), config.dim_word_emb)
        self.char_emb = nn.Embedding(len(vocab.chars), config.dim_char_emb)
        self.char_rnn = nn.LSTM(config.dim_char_emb, config.dim_char_rnn,
                                batch_first=True, bidirectional=True)
        d_in = 2 * config.dim_char_rnn + config.dim_word_emb
        self.sent_rnn = nn.ModuleList()
        for k in range(config.sent_rnn_layers):
            self.sent_rnn.append(nn.LSTM(d_in if k == 0 else d, config.dim_sent_rnn,
                                         batch_first=True, bidirectional=True))
        self.h_nil = nn.Parameter(torch.empty(d))
        self.struct_ff = _feedforward(8 * d, config.dim_hidden, 1)
        self.label_ff = _feedforward(4 * d, config.dim_hidden, len(vocab.nonterminals) + 1)
        self.tagger = nn.Linear(d, len(vocab.pos_tags))
        self.reset_parameters()

    @property
    def nolabel_index(self) -> int:
        return len(self.vocab.nonterminals)

    def reset_parameters(self):
        nn.init.uniform_(self.word_emb.weight, -0.1, 0.1)
        nn.init.uniform_(self.char_emb.weight, -0.1, 0.1)
        for rnn in [self.char_rnn, *self.sent_rnn]:
            for name, p in rnn.named_parameters():
                if name.startswith("weight"):
                    nn.init.xavier_uniform_(p)
                else:
                    nn.init.zeros_(p)
                    if name.startswith("bias_ih"):
                        h = rnn.hidden_size
                        nn.init.ones_(p[h:2 * h])      # forget gate
        for module in [*self.struct_ff, *self.label_ff, self.tagger]:
            if isinstance(module, nn.Linear):
                nn.init.xavier_uniform_(module.weight)
                nn.init.zeros_(module.bias)
        bound = (6.0 / (1 + self.h_nil.numel())) ** 0.5
        nn.init.uniform_(self.h_nil, -bound, bound)

    # -- encoder -----------------------------------------------------------

    def word_ids(self, tokens, train_mode=False):
        ids = [self.vocab.word_id(w) for w in tokens]
        if train_mode and self.config.unk_prob > 0:
            rare = [w in self.vocab.unk_replaceable for w in tokens]
            draws = torch.rand(len(tokens))
            ids = [0 if r and u < self.config.unk_prob else k
                   for k, r, u in zip(ids, rare, draws.tolist())]
        return torch.tensor(ids, dtype=torch.long)

    def encode(self, tokens, train_mode=False) -> SentenceEncoding:
        if not tokens:
            raise ValueError("cannot encode an empty sentence")
        chars = [self.vocab.char_ids(w) for w in tokens]
        lengths = torch.tensor([len(c) for c in chars])
        padded = torch.zeros(len(chars), int(lengths.max()), dtype=torch.long)
        for k, c in enumerate(chars):
            padded[k, :len(c)] = torch.tensor(c, dtype=torch.long)
        packed = pack_padded_sequence(self.char_emb(padded), lengths,
                                      batch_first=True, enforce_sorted=False)
        _, (h_n, _) = self.char_rnn(packed)
        char_vec = torch.cat([h_n[0], h_n[1]], dim=-1)
        x = torch.cat([char_vec, self.word_emb(self.word_ids(tokens, train_mode))], -1)
        x = x.unsqueeze(0)
        layers = []
        for rnn in self.sent_rnn:
            x, _ = rnn(x)
            layers.append(x.squeeze(0))
        return SentenceEncoding(layers[0], layers[-1])

    # -- set representations -----------------------------------------------

    def table(self, enc: SentenceEncoding) -> torch.Tensor:
        return torch.cat([enc.h2, self.h_nil.unsqueeze(0)], 0)

    def set_representation(self, s: IndexSet, enc: SentenceEncoding) -> torch.Tensor:
        rows = boundary_positions(s, enc.h2.shape[0])
        return self.table(enc)[list(rows)].reshape(-1)

    def _dropout(self, x, p, train_mode):
        return F.dropout(x, p, training=True) if train_mode and p > 0 else x

    # -- structural actions --------------------------------------------------

    def structural_columns(self, c: Configuration):
        """Candidate actions in column order: memory by left-index, then SHIFT."""
        acts = [combine(s.left) for s in c.memory_by_left()]
        sets = c.memory_by_left()
        if c.i < c.n:
            acts.append(SHIFT)
            sets.append(IndexSet.from_mask(1 << c.i))
        return acts, sets

    def structural_logits(self, c: Configuration, enc: SentenceEncoding,
                          train_mode=False):
        """Pre-softmax score of every legal structural action.

        Each column goes through the scorer on its own, so the score of a
        COMB action is bit-for-bit independent of the other memory items.
        """
        if c.is_goal() or c.j % 2:
            raise ValueError("structural scores need a non-final even step")
        if c.focus is None:
            return [SHIFT], None
        acts, sets = self.structural_columns(c)
        table = self.table(enc)
        nil = enc.h2.shape[0]
        rf = table[list(boundary_positions(c.focus, nil))].reshape(-1)
        scores = []
        for s in sets:
            column = torch.cat([table[list(boundary_positions(s, nil))].reshape(-1), rf])
            column = self._dropout(column, self.config.dropout_parser, train_mode)
            scores.append(self.struct_ff(column.unsqueeze(0)).reshape(()))
        return acts, torch.stack(scores)

    def structural_distribution(self, c, enc, train_mode=False) -> dict:
        acts, logits = self.structural_logits(c, enc, train_mode)
        if logits is None:
            return {SHIFT: 1.0}
        probs = torch.softmax(logits, 0).tolist()
        return dict(zip(acts, probs))

    # -- labelling actions ---------------------------------------------------

    def label_logits(self, focus: IndexSet, enc, forced=False, train_mode=False):
        x = self.set_representation(focus, enc)
        x = self._dropout(x, self.config.dropout_parser, train_mode)
        logits = self.label_ff(x.unsqueeze(0)).squeeze(0)
        if forced:
            mask = torch.zeros_like(logits, dtype=torch.bool)
            mask[self.nolabel_index] = True
            logits = logits.masked_fill(mask, float("-inf"))
        return logits

    def label_actions(self):
        return [label(x) for x in self.vocab.nonterminals] + [NOLABEL]

    def label_distribution(self, focus: IndexSet, enc, forced=False,
                           train_mode=False) -> dict:
        probs = torch.softmax(self.label_logits(focus, enc, forced, train_mode), 0)
        return dict(zip(self.label_actions(), probs.tolist()))

    def action_distribution(self, c: Configuration, enc, train_mode=False) -> dict:
        if c.j % 2 == 0:
            return self.structural_distribution(c, enc, train_mode)
        return self.label_distribution(c.focus, enc, c.forced_label(), train_mode)

    # -- tagger ----------------------------------------------------------------

    def tag_logits(self, enc: SentenceEncoding, train_mode=False):
        return self.tagger(self._dropout(enc.h1, self.config.dropout_tagger, train_mode))

    def tag_distribution(self, enc: SentenceEncoding, position: int) -> torch.Tensor:
        return torch.softmax(self.tagger(enc.h1[position]), -1)

    # -- objectives ------------------------------------------------------------

    def tag_loss(self, enc: SentenceEncoding, tags, train_mode=False):
        gold = torch.tensor([self.vocab.pos_index[t] for t in tags], dtype=torch.long)
        return F.cross_entropy(self.tag_logits(enc, train_mode), gold, reduction="sum")

    def parse_loss(self, enc: SentenceEncoding, steps, train_mode=False):
        """Negative log-likelihood of ``(configuration, action)`` pairs.

        All steps are scored in one batch; each column and each labelling
        input gets its own dropout mask.
        """
        table = self.table(enc)
        nil = enc.h2.shape[0]
        s_rows, s_gold = [], []
        l_rows, l_forced, l_gold = [], [], []
        for c, a in steps:
            if c.j % 2 == 0:
                if c.focus is None:
                    continue          # SHIFT is the only action: log-prob 0
                acts, sets = self.structural_columns(c)
                rf = boundary_positions(c.focus, nil)
                s_rows.append([boundary_positions(s, nil) + rf for s in sets])
                s_gold.append(acts.index(a))
            else:
                l_rows.append(boundary_positions(c.focus, nil))
                l_forced.append(c.forced_label())
                if a.kind == NOLABEL_KIND:
                    l_gold.append(self.nolabel_index)
                else:
                    l_gold.append(self.vocab.label_index[a.arg])
        total = table.new_zeros(())
        if s_rows:
            width = max(len(r) for r in s_rows)
            idx = torch.zeros(len(s_rows), width, 8, dtype=torch.long)
            mask = torch.zeros(len(s_rows), width, dtype=torch.bool)
            for k, rows in enumerate(s_rows):
                idx[k, :len(rows)] = torch.tensor(rows, dtype=torch.long)
                mask[k, :len(rows)] = True
            x = table[idx].reshape(len(s_rows), width, -1)
            x = self._dropout(x, self.config.dropout_parser, train_mode)
            logits = self.struct_ff(x).squeeze(-1).masked_fill(~mask, float("-inf"))
            logp = torch.log_softmax(logits, -1)
            total = total - logp.gather(1, torch.tensor(s_gold).unsqueeze(1)).sum()
        if l_rows:
            x = table[torch.tensor(l_rows, dtype=torch.long)].reshape(len(l_rows), -1)
            x = self._dropout(x, self.config.dropout_parser, train_mode)
            logits = self.label_ff(x)
            forced = torch.zeros_like(logits, dtype=torch.bool)
            forced[torch.tensor(l_forced, dtype=torch.bool), self.nolabel_index] = True
            logp = torch.log_softmax(logits.masked_fill(forced, float("-inf")), -1)
            total = total - logp.gather(1, torch.tensor(l_gold).unsqueeze(1)).sum()
        return total

    # -- decoding ----------------------------------------------------------------

    def decode(self, enc: SentenceEncoding, n: int, choose=None) -> list:
        """Run the transition loop; ``choose(dist)`` picks an action from a
        ``{action: probability}`` dict (argmax by default).  Returns the
        visited ``(configuration, action)`` pairs."""
        choose = choose or (lambda dist: max(dist, key=dist.get))
        c = initial(n)
        path = []
        while not c.is_goal():
            a = choose(self.action_distribution(c, enc))
            path.append((c, a))
            c = c.apply(a)
        path.append((c, None))
        return path

    def greedy_parse(self, tokens) -> DiscTree:
        with torch.no_grad():
            enc = self.encode(tokens)
            path = self.decode(enc, len(tokens))
            tags = self.tag_logits(enc).argmax(-1).tolist()
        final = path[-1][0]
        return DiscTree(tokens, [self.vocab.pos_tags[k] for k in tags], final.built)


def greedy_parse(tokens, model: SetParserNet) -> DiscTree:
    return model.greedy_parse(list(tokens))


def check_mode(model: SetParserNet) -> SetParserNet:
    """Float64 copy for gradient checks."""
    import copy
    return copy.deepcopy(model).double()
