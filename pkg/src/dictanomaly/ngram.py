"""Additively smoothed n-gram language models over word or character tokens."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence


class _Reserved(str):
    """Marker tokens; the control characters are illegal in XML 1.0 text."""

    def __repr__(self) -> str:
        return f"<{str(self)}>"


BOS = _Reserved("\x02BOS")
EOS = _Reserved("\x03EOS")
UNK = _Reserved("\x1aUNK")

Token = Hashable


def tokenize(text: str, mode: str = "word") -> list[str]:
    if mode == "word":
        return text.split()
    if mode == "char":
        return list(text)
    raise ValueError(f"unknown tokenization mode {mode!r}")


@dataclass
class NGramLanguageModel:
    """Counts and the additive-smoothing estimator built on them.

    ``vocabulary`` holds the observed tokens plus ``UNK``; ``EOS`` is
    predicted but kept out of the vocabulary set, so the outcome space has
    ``len(vocabulary) + 1`` members.
    """

    order: int
    delta: float
    vocabulary: frozenset
    counts: dict[tuple, int] = field(repr=False)
    context_totals: dict[tuple, int] = field(repr=False)

    @property
    def outcome_size(self) -> int:
        return len(self.vocabulary) + 1

    def map_token(self, token: Token) -> Token:
        if token is EOS or token is BOS or token in self.vocabulary:
            return token
        return UNK

    def contexts(self, seq: Sequence[Token]) -> Iterable[tuple[tuple, Token]]:
        """Yield ``(context, token)`` scoring positions for a padded sequence."""
        k = self.order - 1
        padded = [BOS] * k + [self.map_token(t) for t in seq] + [EOS]
        for i in range(k, len(padded)):
            yield tuple(padded[i - k : i]), padded[i]

    def cond_prob(self, context: Sequence[Token], token: Token) -> float:
        ctx = tuple(self.map_token(t) for t in context)
        tok = self.map_token(token)
        return self._prob(ctx, tok)

    def _prob(self, ctx: tuple, tok: Token) -> float:
        total = self.context_totals.get(ctx, 0)
        count = self.counts.get((ctx, tok), 0) if total else 0
        return (count + self.delta) / (total + self.delta * self.outcome_size)

    def logprob(self, seq: Sequence[Token]) -> float:
        """Natural-log probability of ``seq`` including the EOS transition."""
        return math.fsum(math.log(self._prob(c, t)) for c, t in self.contexts(seq))

    def distribution_entropy(self, context: Sequence[Token]) -> float:
        """Shannon entropy in bits of P(. | context) over vocabulary and EOS."""
        ctx = tuple(self.map_token(t) for t in context)
        h = 0.0
        for tok in list(self.vocabulary) + [EOS]:
            p = self._prob(ctx, tok)
            h -= p * math.log2(p)
        return h


def train_lm(
    sequences: Iterable[Sequence[Token]], n: int = 4, delta: float = 0.01
) -> NGramLanguageModel:
    """Count padded n-grams over ``sequences``.

    Each sequence gets ``n - 1`` BOS pads and one EOS, so even an empty
    sequence contributes its BOS->EOS transition.
    """
    if n < 1:
        raise ValueError("n-gram order must be >= 1")
    if delta <= 0:
        raise ValueError("smoothing delta must be positive")
    k = n - 1
    counts: Counter = Counter()
    totals: Counter = Counter()
    vocab: set = set()
    nonempty = False
    for seq in sequences:
        seq = list(seq)
        nonempty = nonempty or bool(seq)
        vocab.update(seq)
        padded = [BOS] * k + seq + [EOS]
        for i in range(k, len(padded)):
            ctx = tuple(padded[i - k : i])
            counts[(ctx, padded[i])] += 1
            totals[ctx] += 1
    if not nonempty:
        raise ValueError("cannot train a language model on empty sequences only")
    vocab.add(UNK)
    return NGramLanguageModel(
        order=n,
        delta=delta,
        vocabulary=frozenset(vocab),
        counts=dict(counts),
        context_totals=dict(totals),
    )


def sequence_entropy(model: NGramLanguageModel, seq: Sequence[Token]) -> float:
    """Mean negative log2 probability per scoring position (EOS included, BOS pads not)."""
    terms = [-math.log2(model._prob(c, t)) for c, t in model.contexts(seq)]
    return math.fsum(terms) / len(terms)
