"""Sample statistics shared by the detectors: z-scores and character IDF."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class SampleStats:
    mean: float
    stddev: float
    count: int


@dataclass(frozen=True)
class IdfTable:
    """Per-character inverse document frequency over one field's texts.

    ``doc_freq`` keeps the raw membership counts so callers can explain a
    score without recomputing it.
    """

    doc_count: int
    idf_by_char: dict[str, float]
    doc_freq: dict[str, int]

    def idf(self, char: str) -> float:
        # A character never seen in the collection is as rare as it gets.
        return self.idf_by_char.get(char, math.log10(self.doc_count))


def sample_stats(values: Sequence[float]) -> SampleStats:
    """Population mean and standard deviation (divides by n)."""
    n = len(values)
    if n == 0:
        raise ValueError("sample_stats needs at least one value")
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / n
    return SampleStats(mean=mean, stddev=math.sqrt(var), count=n)


def zscores(values: Sequence[float]) -> list[float]:
    """Signed distance from the mean in standard deviations.

    A constant sample has no spread, so every z-score is 0 rather than
    undefined.
    """
    st = sample_stats(values)
    if st.stddev == 0.0:
        return [0.0] * st.count
    return [(v - st.mean) / st.stddev for v in values]


def build_idf(docs: Iterable[str]) -> IdfTable:
    """Character IDF with set semantics: a character repeated in one doc counts once."""
    doc_freq: dict[str, int] = {}
    n = 0
    for doc in docs:
        n += 1
        for ch in set(doc):
            doc_freq[ch] = doc_freq.get(ch, 0) + 1
    if n == 0:
        raise ValueError("build_idf needs at least one document")
    idf = {ch: math.log10(n / df) for ch, df in doc_freq.items()}
    return IdfTable(doc_count=n, idf_by_char=idf, doc_freq=doc_freq)
