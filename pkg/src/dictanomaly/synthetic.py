"""Synthetic dictionaries with known, injected corruptions.

Entries look like::

    <entry><orth>kalomi</orth><pron>kä-lō-mī</pron><pos>n.</pos><def>...</def></entry>

The pronunciation is a deterministic function of the orthography.  A
corrupted entry records which class of damage it received:

``merge_pos``   the POS field swallowed the definition text
``merge_orth``  a second headword was run into the orthography
``rare_char``   one orthography character replaced by a rare symbol
``scramble``    orthography characters shuffled
``swap``        pronunciation exchanged with another corrupted entry
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

CORRUPTION_CLASSES = ("merge_pos", "merge_orth", "rare_char", "scramble", "swap")

_ONSETS = ["b", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "sh", "ch", "th"]
_VOWELS = ["a", "e", "i", "o", "u"]
_CODAS = ["", "", "", "n", "r", "s", "l", "t"]
_PRON_MAP = {
    "a": "ä",
    "e": "ē",
    "i": "ī",
    "o": "ō",
    "u": "ū",
    "sh": "ʃ",
    "ch": "ʧ",
    "th": "θ",
    "c": "k",
}
_POS = [("n.", 35), ("adj.", 20), ("v. t.", 15), ("v. i.", 15), ("adv.", 15)]
_DEF_WORDS = (
    "a the of to in or and with for by from as that which one any kind sort act state quality "
    "small large thin long short round sharp soft hard light dark bright water stone wood plant "
    "animal bird fish tree leaf root seed fruit flower house tool vessel cloth rope wall path "
    "place region country person man woman child servant master maker seller body head hand "
    "foot eye mouth heart blood bone skin hair color sound voice song word speech name number "
    "time day night season year measure weight form shape mark sign line edge side part whole "
    "used made found known called having being like resembling relating belonging pertaining"
).split()


def _rare_pool() -> list[str]:
    # Symbols no clean entry ever uses.
    blocks = [(0x2200, 0x22FF), (0x2300, 0x23FF), (0x25A0, 0x25FF), (0x2600, 0x26FF)]
    return [chr(c) for lo, hi in blocks for c in range(lo, hi + 1) if chr(c).isprintable()]


def pronounce(orth: str) -> str:
    """Map a synthetic orthography (syllables joined by ``|``) to its pronunciation."""
    out = []
    for syl in orth.split("|"):
        i, ph = 0, []
        while i < len(syl):
            two = syl[i : i + 2]
            if two in _PRON_MAP:
                ph.append(_PRON_MAP[two])
                i += 2
            else:
                ph.append(_PRON_MAP.get(syl[i], syl[i]))
                i += 1
        out.append("".join(ph))
    return "-".join(out)


@dataclass
class SyntheticEntry:
    orth: str
    pron: str
    pos: str
    definition: str | None

    def to_xml(self) -> str:
        parts = [
            f"<orth>{escape(self.orth)}</orth>",
            f"<pron>{escape(self.pron)}</pron>",
            f"<pos>{escape(self.pos)}</pos>",
        ]
        if self.definition is not None:
            parts.append(f"<def>{escape(self.definition)}</def>")
        return "<entry>" + "".join(parts) + "</entry>"


@dataclass
class SyntheticDictionary:
    entries: list[SyntheticEntry]
    corruption: dict[int, str] = field(default_factory=dict)

    def to_xml(self) -> bytes:
        body = "\n".join("  " + e.to_xml() for e in self.entries)
        return f'<?xml version="1.0" encoding="UTF-8"?>\n<dictionary>\n{body}\n</dictionary>\n'.encode("utf-8")

    def indices(self, cls: str) -> set[int]:
        return {i for i, c in self.corruption.items() if c == cls}

    @property
    def clean_indices(self) -> set[int]:
        return set(range(len(self.entries))) - set(self.corruption)


def _word(rng: random.Random) -> str:
    n = rng.choice([2, 2, 3, 3, 3, 4])
    return "|".join(rng.choice(_ONSETS) + rng.choice(_VOWELS) + rng.choice(_CODAS) for _ in range(n))


def _definition(rng: random.Random) -> str:
    return " ".join(rng.choice(_DEF_WORDS) for _ in range(rng.randint(5, 10)))


def generate_dictionary(
    n_entries: int = 5000, corruption_rate: float = 0.05, seed: int = 0
) -> SyntheticDictionary:
    """Build a dictionary and corrupt ``corruption_rate`` of its entries.

    Corrupted entries are split evenly over :data:`CORRUPTION_CLASSES`.
    """
    rng = random.Random(seed)
    pos_vals, pos_weights = zip(*_POS)
    raw = [_word(rng) for _ in range(n_entries)]
    entries = [
        SyntheticEntry(
            orth=w.replace("|", ""),
            pron=pronounce(w),
            pos=rng.choices(pos_vals, pos_weights)[0],
            definition=_definition(rng),
        )
        for w in raw
    ]
    synth = SyntheticDictionary(entries)
    n_bad = int(round(n_entries * corruption_rate))
    if n_bad == 0:
        return synth
    chosen = rng.sample(range(n_entries), n_bad)
    per_class = n_bad // len(CORRUPTION_CLASSES)
    rare = _rare_pool()
    rng.shuffle(rare)
    for k, idx in enumerate(chosen):
        cls = CORRUPTION_CLASSES[min(k // max(per_class, 1), len(CORRUPTION_CLASSES) - 1)]
        synth.corruption[idx] = cls
    for idx in sorted(synth.corruption):
        e = entries[idx]
        cls = synth.corruption[idx]
        if cls == "merge_pos":
            e.pos = f"{e.pos} {e.definition}"
            e.definition = None
        elif cls == "merge_orth":
            e.orth = f"{e.orth} {_word(rng).replace('|', '')}"
        elif cls == "rare_char":
            j = rng.randrange(len(e.orth))
            e.orth = e.orth[:j] + rare.pop() + e.orth[j + 1 :]
        elif cls == "scramble":
            chars = list(e.orth)
            while "".join(chars) == e.orth:
                rng.shuffle(chars)
            e.orth = "".join(chars)
    swaps = sorted(synth.indices("swap"))
    rng.shuffle(swaps)
    if len(swaps) % 2:
        # An odd one out gets a random other pronunciation.
        last = swaps.pop()
        entries[last].pron = pronounce(_word(rng))
    for a, b in zip(swaps[::2], swaps[1::2]):
        entries[a].pron, entries[b].pron = entries[b].pron, entries[a].pron
    return synth
