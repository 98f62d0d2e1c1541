"""Averaged SGD training with static or dynamic oracle supervision.

Every sentence gives two updates: one on the tagging loss and one on the
parsing loss.  With the dynamic oracle, each sentence is independently
chosen for exploration with probability ``explore_p`` at the start of an
epoch; an explored sentence is parsed by sampling actions from the current
model, and every visited configuration is supervised by the tie-broken
dynamic-oracle action.
"""
from __future__ import annotations

import copy
import logging
import math

import numpy as np
import torch

from .evaluation import EvalFilter, evaluate_corpus
from .model import ModelConfig, SetParserNet
from .oracle import dynamic_oracle, static_oracle
from .transitions import derivation_configurations

log = logging.getLogger(__name__)


class Trainer:
    def __init__(self, corpus, config: ModelConfig, oracle: str = "static",
                 explore_p: float = None, dtype=torch.float32):
        if not len(corpus):
            raise ValueError("cannot train on an empty corpus")
        if oracle not in ("static", "dynamic"):
            raise ValueError("oracle must be 'static' or 'dynamic'")
        self.corpus = corpus
        self.config = config
        if explore_p is None:
            explore_p = config.explore_prob if oracle == "dynamic" else 0.0
        self.explore_p = explore_p if oracle == "dynamic" else 0.0
        torch.manual_seed(config.seed)
        self.model = SetParserNet(config, corpus.vocab).to(dtype)
        # dropout, UNK replacement and gradient noise draw from torch's
        # global generator; keep a private copy so trainers do not interact
        self.torch_state = torch.get_rng_state()
        self.params = [p for p in self.model.parameters()]
        self.average = [p.detach().clone() for p in self.params]
        self.t = 0
        self.epoch = 0
        self.order_rng = np.random.default_rng(config.seed)
        self.explore_rng = np.random.default_rng([config.seed, 1])
        self.gold_steps = []
        for tree in corpus.trees:
            actions = static_oracle(tree)
            configs = derivation_configurations(tree.n, actions)
            self.gold_steps.append(list(zip(configs, actions)))

    def learning_rate(self, t: int) -> float:
        cfg = self.config
        lr = cfg.learning_rate / (1 + t * cfg.decay)
        if cfg.warmup_steps and t < cfg.warmup_steps:
            lr *= t / cfg.warmup_steps
        return lr

    def update(self, loss: torch.Tensor):
        cfg = self.config
        for p in self.params:
            p.grad = None
        loss.backward()
        self.t += 1
        torch.nn.utils.clip_grad_norm_(self.params, cfg.grad_clip_norm)
        lr = self.learning_rate(self.t)
        std = math.sqrt(cfg.grad_noise_eta / (1 + self.t) ** cfg.grad_noise_gamma)
        with torch.no_grad():
            for p, avg in zip(self.params, self.average):
                if p.grad is None:
                    grad = torch.zeros_like(p)
                else:
                    grad = p.grad
                if cfg.grad_noise:
                    grad = grad + torch.randn_like(p) * std
                p.sub_(lr * grad)
                avg.add_((p - avg) / self.t)

    def explore_steps(self, tree):
        """Sample a derivation from the current model and label every visited
        configuration with the dynamic oracle."""
        model = self.model
        rng = self.explore_rng

        def sample(dist):
            acts = list(dist)
            p = np.array([dist[a] for a in acts], dtype=np.float64)
            return acts[rng.choice(len(acts), p=p / p.sum())]

        with torch.no_grad():
            enc = model.encode(list(tree.tokens))
            path = model.decode(enc, tree.n, sample)
        return [(c, dynamic_oracle(c, tree).canonical) for c, _ in path[:-1]]

    def train_sentence(self, k: int, explore: bool = False):
        tree = self.corpus.trees[k]
        tokens = list(tree.tokens)
        enc = self.model.encode(tokens, train_mode=True)
        lt = self.model.tag_loss(enc, tree.pos_tags, train_mode=True)
        self.update(lt)
        steps = self.explore_steps(tree) if explore else self.gold_steps[k]
        enc = self.model.encode(tokens, train_mode=True)
        lp = self.model.parse_loss(enc, steps, train_mode=True)
        self.update(lp)
        return lt.item(), lp.item()

    def train_epoch(self):
        """One pass over the corpus in random order; returns mean losses."""
        self.model.train()
        size = len(self.corpus)
        order = self.order_rng.permutation(size)
        explore = self.explore_rng.random(size) < self.explore_p
        total_t = total_p = 0.0
        outer = torch.get_rng_state()
        torch.set_rng_state(self.torch_state)
        try:
            for k in order:
                lt, lp = self.train_sentence(int(k), bool(explore[k]))
                total_t += lt
                total_p += lp
        finally:
            self.torch_state = torch.get_rng_state()
            torch.set_rng_state(outer)
        self.epoch += 1
        return total_t / size, total_p / size

    def averaged_model(self) -> SetParserNet:
        model = copy.deepcopy(self.model)
        with torch.no_grad():
            for p, avg in zip(model.parameters(), self.average):
                p.copy_(avg)
        model.eval()
        return model


def parse_corpus(model: SetParserNet, trees) -> list:
    return [model.greedy_parse(list(t.tokens)) for t in trees]


def train(corpus, config: ModelConfig, oracle: str = "static", dev=None,
          eval_every: int = 4, epochs: int = None, ignore: EvalFilter = EvalFilter(),
          explore_p: float = None, callback=None):
    """Train and keep the averaged model with the best dev F-score.

    Returns ``(model, history)``; ``history`` has one dict per evaluated
    epoch (every ``eval_every`` epochs, and the last one).
    """
    trainer = Trainer(corpus, config, oracle, explore_p)
    epochs = config.epochs if epochs is None else epochs
    best, best_f, history = None, -1.0, []
    for epoch in range(1, epochs + 1):
        lt, lp = trainer.train_epoch()
        log.info("epoch %d  L_t %.4f  L_p %.4f", epoch, lt, lp)
        if dev is None or (epoch % eval_every and epoch != epochs):
            continue
        model = trainer.averaged_model()
        report = evaluate_corpus(parse_corpus(model, dev), dev, ignore)
        row = {"epoch": epoch, "L_t": lt, "L_p": lp, "dev_f": report.f1,
               "dev_disc_f": report.disc_f1, "pos": report.pos_accuracy}
        history.append(row)
        if callback is not None:
            callback(row)
        if report.f1 > best_f:
            best, best_f = model, report.f1
    if best is None:
        best = trainer.averaged_model()
    return best, history


def train_static(corpus, config: ModelConfig, **kwargs):
    return train(corpus, config, "static", **kwargs)


def train_dynamic(corpus, config: ModelConfig, **kwargs):
    return train(corpus, config, "dynamic", **kwargs)
