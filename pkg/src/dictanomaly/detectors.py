"""The six anomaly detectors.

Single-field detectors look at every value of one tag; tied-field detectors
look at positionally matched pairs of two tags in the same entry.  Each
model (IDF table, language model, transliteration model) is fitted on the
whole population it then scores.
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, field, fields
from typing import Callable, Sequence

from .corpus import FieldInstance, TiedPair
from .ngram import sequence_entropy, tokenize, train_lm
from .stats import build_idf, sample_stats, zscores
from .translit import TranslitConfig, TransliterationModel, expected_ned, train_translit

log = logging.getLogger(__name__)

SINGLE_FIELD = ("uncommon_chars", "text_length", "word_sequence", "char_sequence")
TIED_FIELD = ("length_ratio", "transliteration")
DETECTOR_IDS = SINGLE_FIELD + TIED_FIELD


class DetectorError(RuntimeError):
    """A detector could not run on its input (e.g. untrainable corpus)."""


@dataclass(frozen=True)
class Anomaly:
    detector_id: str
    field_names: tuple[str, ...]
    entry_index: int
    occurrence_index: int
    observed_values: tuple[str, ...]
    score: float
    threshold: float
    explanation: str

    @property
    def locator(self) -> tuple[str, int, int]:
        return (self.detector_id, self.entry_index, self.occurrence_index)


@dataclass(frozen=True)
class DetectorConfig:
    idf_threshold: float = 4.0
    length_z_threshold: float = 4.0
    word_lm_order: int = 4
    word_entropy_z_threshold: float = 5.0
    char_lm_order: int = 4
    char_entropy_z_threshold: float = 5.0
    ratio_z_threshold: float = 2.0
    ratio_partition: tuple[int, ...] | None = None
    translit_z_threshold: float = 2.0
    lowercase_tied: bool = False
    lm_delta: float = 1.0
    translit: TranslitConfig = field(default_factory=TranslitConfig)

    def __post_init__(self) -> None:
        for f in fields(self):
            if f.name.endswith("_threshold") and not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be > 0")
        if self.word_lm_order < 1 or self.char_lm_order < 1:
            raise ValueError("language model orders must be >= 1")
        if self.lm_delta <= 0:
            raise ValueError("lm_delta must be > 0")
        if self.ratio_partition is not None:
            cuts = tuple(int(c) for c in self.ratio_partition)
            if list(cuts) != sorted(set(cuts)) or (cuts and cuts[0] < 1):
                raise ValueError("ratio_partition must be strictly increasing positive cuts")
            object.__setattr__(self, "ratio_partition", cuts)


def _single(detector_id: str, inst: FieldInstance, score: float, threshold: float, why: str) -> Anomaly:
    return Anomaly(
        detector_id=detector_id,
        field_names=(inst.tag_name,),
        entry_index=inst.entry_index,
        occurrence_index=inst.occurrence_index,
        observed_values=(inst.text_value,),
        score=score,
        threshold=threshold,
        explanation=why,
    )


def _tied(detector_id: str, pair: TiedPair, score: float, threshold: float, why: str) -> Anomaly:
    return Anomaly(
        detector_id=detector_id,
        field_names=(pair.first.tag_name, pair.second.tag_name),
        entry_index=pair.first.entry_index,
        occurrence_index=pair.first.occurrence_index,
        observed_values=(pair.first.text_value, pair.second.text_value),
        score=score,
        threshold=threshold,
        explanation=why,
    )


def _char_label(ch: str) -> str:
    return f"{ch!r} (U+{ord(ch):04X})"


def detect_uncommon_chars(
    instances: Sequence[FieldInstance], cfg: DetectorConfig | None = None
) -> list[Anomaly]:
    """Flag values containing a character whose IDF exceeds the threshold."""
    cfg = cfg or DetectorConfig()
    if not instances:
        return []
    table = build_idf(inst.text_value for inst in instances)
    thr = cfg.idf_threshold
    rare = {ch for ch, v in table.idf_by_char.items() if v > thr}
    out = []
    for inst in instances:
        offenders = sorted(rare.intersection(inst.text_value))
        if not offenders:
            continue
        score = max(table.idf_by_char[ch] for ch in offenders)
        listed = ", ".join(
            f"{_char_label(ch)} in {table.doc_freq[ch]} of {table.doc_count} values"
            for ch in offenders
        )
        out.append(_single("uncommon_chars", inst, score, thr, f"uncommon character(s): {listed}"))
    return out


def detect_text_length(
    instances: Sequence[FieldInstance], cfg: DetectorConfig | None = None
) -> list[Anomaly]:
    """Flag values whose length is unusually long or short (two-sided)."""
    cfg = cfg or DetectorConfig()
    if not instances:
        return []
    lengths = [len(inst.text_value) for inst in instances]
    st = sample_stats(lengths)
    thr = cfg.length_z_threshold
    out = []
    for inst, n, z in zip(instances, lengths, zscores(lengths)):
        if abs(z) > thr:
            side = "long" if z > 0 else "short"
            why = (
                f"length {n} is unusually {side}: z = {z:+.3f} "
                f"(field mean {st.mean:.3f}, sd {st.stddev:.3f})"
            )
            out.append(_single("text_length", inst, abs(z), thr, why))
    return out


def _detect_entropy(
    detector_id: str,
    mode: str,
    order: int,
    thr: float,
    instances: Sequence[FieldInstance],
    delta: float,
) -> list[Anomaly]:
    if not instances:
        return []
    seqs = [tokenize(inst.text_value, mode) for inst in instances]
    if not any(seqs):
        return []
    model = train_lm(seqs, n=order, delta=delta)
    entropies = [sequence_entropy(model, s) for s in seqs]
    st = sample_stats(entropies)
    unit = "word" if mode == "word" else "character"
    out = []
    for inst, h, z in zip(instances, entropies, zscores(entropies)):
        if z > thr:
            why = (
                f"{unit} {order}-gram entropy {h:.3f} bits/token is high: "
                f"z = {z:.3f} (field mean {st.mean:.3f}, sd {st.stddev:.3f})"
            )
            out.append(_single(detector_id, inst, z, thr, why))
    return out


def detect_word_sequence(
    instances: Sequence[FieldInstance], cfg: DetectorConfig | None = None
) -> list[Anomaly]:
    cfg = cfg or DetectorConfig()
    return _detect_entropy(
        "word_sequence", "word", cfg.word_lm_order, cfg.word_entropy_z_threshold, instances, cfg.lm_delta
    )


def detect_char_sequence(
    instances: Sequence[FieldInstance], cfg: DetectorConfig | None = None
) -> list[Anomaly]:
    cfg = cfg or DetectorConfig()
    return _detect_entropy(
        "char_sequence", "char", cfg.char_lm_order, cfg.char_entropy_z_threshold, instances, cfg.lm_delta
    )


def _partition_key(length: int, cuts: tuple[int, ...] | None) -> int:
    if not cuts:
        return 0
    # bins [1..c1], [c1+1..c2], ..., [c_last+1..)
    return bisect.bisect_left(cuts, length)


def detect_length_ratio(pairs: Sequence[TiedPair], cfg: DetectorConfig | None = None) -> list[Anomaly]:
    """Flag pairs whose first/second length ratio is unusual within its partition.

    A pair with an empty second field has no ratio and is always flagged
    with an infinite score.
    """
    cfg = cfg or DetectorConfig()
    thr = cfg.ratio_z_threshold
    out = []
    groups: dict[int, list[tuple[TiedPair, float]]] = {}
    for pair in pairs:
        a, b = len(pair.first.text_value), len(pair.second.text_value)
        if b == 0:
            out.append(_tied("length_ratio", pair, math.inf, thr, "empty second field"))
            continue
        groups.setdefault(_partition_key(a, cfg.ratio_partition), []).append((pair, a / b))
    for key in sorted(groups):
        members = groups[key]
        ratios = [r for _, r in members]
        st = sample_stats(ratios)
        where = f" in partition {key}" if cfg.ratio_partition else ""
        for (pair, r), z in zip(members, zscores(ratios)):
            if abs(z) > thr:
                side = "high" if z > 0 else "low"
                why = (
                    f"length ratio {r:.3f} ({len(pair.first.text_value)}/"
                    f"{len(pair.second.text_value)} chars) is unusually {side}{where}: "
                    f"z = {z:+.3f} (mean {st.mean:.3f}, sd {st.stddev:.3f})"
                )
                out.append(_tied("length_ratio", pair, abs(z), thr, why))
    return out


def _lowered(pair: TiedPair) -> tuple[str, str]:
    return pair.first.text_value.lower(), pair.second.text_value.lower()


def detect_transliteration(
    pairs: Sequence[TiedPair],
    cfg: DetectorConfig | None = None,
    model: TransliterationModel | None = None,
) -> list[Anomaly]:
    """Flag pairs whose second field is far from what the learned model predicts.

    ``model`` may be supplied to reuse an already trained transliteration
    model; it must have been trained on the same (normalized) pairs.
    """
    cfg = cfg or DetectorConfig()
    if not pairs:
        return []
    if cfg.lowercase_tied:
        tuples = [_lowered(p) for p in pairs]
    else:
        tuples = [(p.first.text_value, p.second.text_value) for p in pairs]
    if model is None:
        try:
            model = train_translit(tuples, cfg.translit)
        except ValueError as exc:
            raise DetectorError(f"transliteration model training failed: {exc}") from exc
    n = cfg.translit.nbest
    scored = []
    for src, observed in tuples:
        cands = model.nbest(src, n)
        scored.append((cands, expected_ned(cands, observed)))
    values = [e for _, e in scored]
    st = sample_stats(values)
    thr = cfg.translit_z_threshold
    out = []
    for pair, (cands, e), z in zip(pairs, scored, zscores(values)):
        if z > thr:
            why = (
                f"weighted mean NED {e:.3f} from {len(cands)} candidate(s) "
                f"(best {cands[0].text!r}) is high: z = {z:.3f} "
                f"(mean {st.mean:.3f}, sd {st.stddev:.3f})"
            )
            out.append(_tied("transliteration", pair, z, thr, why))
    return out


SINGLE_DETECTORS: dict[str, Callable[..., list[Anomaly]]] = {
    "uncommon_chars": detect_uncommon_chars,
    "text_length": detect_text_length,
    "word_sequence": detect_word_sequence,
    "char_sequence": detect_char_sequence,
}

TIED_DETECTORS: dict[str, Callable[..., list[Anomaly]]] = {
    "length_ratio": detect_length_ratio,
    "transliteration": detect_transliteration,
}
