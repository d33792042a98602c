"""Joint-sequence transliteration between tied fields.

A pair such as ``("ease", "ēz")`` is segmented into *graphones*, small
source/target chunks like ``("ea", "ē")``.  EM over every monotone
co-segmentation learns which chunks go together; a trigram model over the
Viterbi graphone sequences then scores candidate transliterations, found
by beam search.  Candidate cost is the negative natural log of the path
probability.
"""

from __future__ import annotations

import logging
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import _ext
from .corpus import TiedPair
from .ngram import BOS, EOS, UNK, NGramLanguageModel, train_lm

log = logging.getLogger(__name__)

COST_FLOOR = 1e-6


class Graphone(NamedTuple):
    source: str
    target: str


class Candidate(NamedTuple):
    text: str
    cost: float
    score: float


class DegenerateCorpusWarning(UserWarning):
    """Every second field is empty; the model can only predict deletions."""


@dataclass(frozen=True)
class TranslitConfig:
    max_source: int = 2
    max_target: int = 2
    em_iterations: int = 10
    order: int = 3
    delta: float = 0.01
    beam_width: int = 50
    nbest: int = 10
    # Graphones aligned fewer times than this are dropped, along with the
    # training sequences that use them, so corrupted pairs are not memorized.
    min_graphone_count: int = 2


@dataclass
class _Lattice:
    n_nodes: int
    src: np.ndarray
    dst: np.ndarray
    gid: np.ndarray


def _build_lattice(
    source: str, target: str, max_source: int, max_target: int, index: dict[Graphone, int]
) -> _Lattice:
    n, m = len(source), len(target)
    width = m + 1
    src, dst, gid = [], [], []
    for i in range(n + 1):
        for j in range(m + 1):
            for di in range(min(max_source, n - i) + 1):
                for dj in range(min(max_target, m - j) + 1):
                    if di == 0 and dj == 0:
                        continue
                    g = Graphone(source[i : i + di], target[j : j + dj])
                    if g not in index:
                        index[g] = len(index)
                    src.append(i * width + j)
                    dst.append((i + di) * width + j + dj)
                    gid.append(index[g])
    as_arr = lambda xs: np.asarray(xs, dtype=np.int64)  # noqa: E731
    return _Lattice((n + 1) * (m + 1), as_arr(src), as_arr(dst), as_arr(gid))


@dataclass
class AlignmentResult:
    sequences: list[list[Graphone]]
    loglik_history: list[float]
    graphone_probs: dict[Graphone, float]


def em_align(
    pairs: Sequence[tuple[str, str]],
    max_source: int = 2,
    max_target: int = 2,
    em_iterations: int = 10,
) -> AlignmentResult:
    """Unigram joint-multigram EM from a uniform start, then Viterbi decoding.

    ``loglik_history[k]`` is the corpus log-likelihood under the parameters
    entering iteration ``k``; the final entry is under the returned ones.
    """
    if not pairs:
        raise ValueError("need at least one pair to align")
    if max_source < 1 or max_target < 1:
        raise ValueError("segment size limits must be >= 1")
    index: dict[Graphone, int] = {}
    distinct: dict[tuple[str, str], int] = {}
    for p in pairs:
        distinct[p] = distinct.get(p, 0) + 1
    lattices = {p: _build_lattice(p[0], p[1], max_source, max_target, index) for p in distinct}
    n_graphones = len(index)
    logp = np.full(n_graphones, -math.log(n_graphones) if n_graphones else 0.0)

    history = []
    for it in range(em_iterations + 1):
        counts = np.zeros(n_graphones)
        total = 0.0
        for p, lat in lattices.items():
            weight = distinct[p]
            z = _ext.forward_backward(lat.n_nodes, lat.src, lat.dst, lat.gid, logp, counts, float(weight))
            if z == -math.inf:
                raise RuntimeError(f"empty alignment lattice for pair {p!r}")
            total += weight * z
        history.append(total)
        if it == em_iterations:
            break
        with np.errstate(divide="ignore"):
            logp = np.log(counts / counts.sum())
        log.debug("EM iteration %d: log-likelihood %.6f", it + 1, total)

    inventory = sorted(index, key=index.__getitem__)
    best: dict[tuple[str, str], list[Graphone]] = {}
    for p, lat in lattices.items():
        path = _ext.viterbi(lat.n_nodes, lat.src, lat.dst, lat.gid, logp)
        best[p] = [inventory[int(lat.gid[e])] for e in path]
    probs = {g: float(math.exp(logp[i])) for g, i in index.items() if logp[i] > -math.inf}
    return AlignmentResult([best[p] for p in pairs], history, probs)


def align_pairs(
    pairs: Sequence[tuple[str, str]],
    max_source: int = 2,
    max_target: int = 2,
    em_iterations: int = 10,
) -> list[list[Graphone]]:
    return em_align(pairs, max_source, max_target, em_iterations).sequences


@dataclass
class TransliterationModel:
    graphone_inventory: frozenset[Graphone]
    joint_lm: NGramLanguageModel
    max_source: int = 2
    max_target: int = 2
    beam_width: int = 50
    _packed: object = field(default=None, init=False, repr=False)
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def _pack(self):
        if self._packed is not None:
            return self._packed
        ids = {g: i for i, g in enumerate(sorted(self.graphone_inventory))}
        n = len(ids)
        unk, bos, eos = n, n + 1, n + 2
        base = n + 3
        order = self.joint_lm.order
        if base ** order >= 2**63:
            raise ValueError("graphone inventory too large to pack n-gram keys into 64 bits")
        tok_id = {UNK: unk, BOS: bos, EOS: eos, **ids}

        def ctx_key(ctx):
            key = 0
            for t in ctx:
                key = key * base + tok_id[t]
            return key

        counts = {ctx_key(c) * base + tok_id[t]: v for (c, t), v in self.joint_lm.counts.items()}
        totals = {ctx_key(c): v for c, v in self.joint_lm.context_totals.items()}
        lm = _ext.PackedLM(
            order,
            base,
            self.joint_lm.delta,
            self.joint_lm.delta * self.joint_lm.outcome_size,
            counts,
            totals,
            bos,
            eos,
        )
        by_source: dict[str, list[int]] = {}
        for g, i in ids.items():
            by_source.setdefault(g.source, []).append(i)
        targets = [g.target for g in sorted(ids, key=ids.__getitem__)]
        # The decoder must come from the same backend as the packed model.
        self._packed = (lm, by_source, targets, unk, base, _ext.beam_search)
        return self._packed

    def nbest(self, source: str, n: int = 10) -> list[Candidate]:
        if n < 1:
            raise ValueError("n must be >= 1")
        key = (source, n)
        if key not in self._cache:
            self._cache[key] = self._decode(source, n)
        return list(self._cache[key])

    def _decode(self, source: str, n: int) -> list[Candidate]:
        lm, by_source, targets, unk, base, beam_search = self._pack()
        opt_start, opt_len, opt_gid, opt_tok = [0], [], [], []
        for i in range(len(source)):
            has_single = False
            for k in range(1, self.max_source + 1):
                if i + k > len(source):
                    break
                for g in by_source.get(source[i : i + k], ()):
                    opt_len.append(k)
                    opt_gid.append(g)
                    opt_tok.append(g)
                    has_single = has_single or k == 1
            if not has_single:
                # Unseen character: copy it through, scored as UNK.
                opt_len.append(1)
                opt_gid.append(base + i)
                opt_tok.append(unk)
            opt_start.append(len(opt_len))
        ins = by_source.get("", [])
        paths = beam_search(
            lm, len(source), opt_start, opt_len, opt_gid, opt_tok, ins, ins, self.beam_width
        )
        out: list[Candidate] = []
        seen = set()
        for cost, path in paths:
            text = "".join(targets[g] if g < len(targets) else source[g - base] for g in path)
            if text in seen:
                continue
            seen.add(text)
            cost = max(cost, COST_FLOOR)
            out.append(Candidate(text, cost, 1.0 / cost))
            if len(out) == n:
                break
        return out


def _as_tuples(pairs) -> list[tuple[str, str]]:
    out = []
    for p in pairs:
        if isinstance(p, TiedPair):
            out.append((p.first.text_value, p.second.text_value))
        else:
            a, b = p
            out.append((a, b))
    return out


def _prune_rare(seqs: list[list[Graphone]], min_count: int) -> list[list[Graphone]]:
    counts = Counter(g for seq in seqs for g in seq)
    kept = [seq for seq in seqs if all(counts[g] >= min_count for g in seq)]
    if not any(kept):
        # Too little data to prune; keep everything rather than nothing.
        return seqs
    log.debug("graphone pruning kept %d of %d training sequences", len(kept), len(seqs))
    return kept


def train_translit(pairs, config: TranslitConfig | None = None) -> TransliterationModel:
    """Align ``pairs`` (TiedPairs or ``(source, target)`` tuples) and fit the joint model."""
    cfg = config or TranslitConfig()
    tuples = _as_tuples(pairs)
    if not any(a for a, _ in tuples):
        raise ValueError("transliteration training needs at least one non-empty first field")
    if not any(b for _, b in tuples):
        warnings.warn("every second field is empty", DegenerateCorpusWarning, stacklevel=2)
    seqs = align_pairs(tuples, cfg.max_source, cfg.max_target, cfg.em_iterations)
    seqs = _prune_rare(seqs, cfg.min_graphone_count)
    lm = train_lm(seqs, n=cfg.order, delta=cfg.delta)
    inventory = frozenset(g for seq in seqs for g in seq)
    return TransliterationModel(
        graphone_inventory=inventory,
        joint_lm=lm,
        max_source=cfg.max_source,
        max_target=cfg.max_target,
        beam_width=cfg.beam_width,
    )


def nbest(model: TransliterationModel, source: str, n: int = 10) -> list[Candidate]:
    return model.nbest(source, n)


def ned(a: str, b: str) -> float:
    """Levenshtein distance over the longer length; 0 for two empty strings."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return _ext.levenshtein(a, b) / longest


def expected_ned(candidates: Sequence[Candidate], observed: str) -> float:
    """Score-weighted mean NED of the candidates to the observed value."""
    if not candidates:
        raise ValueError("expected_ned needs at least one candidate")
    num = math.fsum(c.score * ned(c.text, observed) for c in candidates)
    den = math.fsum(c.score for c in candidates)
    return num / den
