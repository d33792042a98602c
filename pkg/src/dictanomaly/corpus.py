"""Parse XML dictionaries into entries and pull out field text collections.

Element text is the element's *own* text nodes (its ``text`` plus the
``tail`` of each child), so inline markup contributes to its own tag
rather than to the parent.  Pass ``deep_text=True`` to concatenate all
descendant text instead.
"""

from __future__ import annotations

import codecs
import html.entities
import logging
import re
import unicodedata
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Iterator

log = logging.getLogger(__name__)

_XML_PREDEFINED = {"amp", "lt", "gt", "quot", "apos"}
_ENTITY_REF = re.compile(r"&([A-Za-z][A-Za-z0-9._-]*);")
_ENTITY_DECL = re.compile(r"<!ENTITY\s+%?\s*([A-Za-z][A-Za-z0-9._-]*)")
_XML_DECL = re.compile(r"^\s*<\?xml[^>]*\?>")
_ENCODING_DECL = re.compile(rb"^\s*<\?xml[^>]*encoding\s*=\s*[\"']([A-Za-z0-9._-]+)[\"']")
_WS = re.compile(r"\s+")


class DictionaryParseError(ValueError):
    """Malformed XML input; carries the 1-based line and column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class PairSkewWarning(UserWarning):
    """Tied tags occur a different number of times within an entry."""


class EmptyCorpusWarning(UserWarning):
    """No element matched the requested entry tag."""


@dataclass(frozen=True)
class NormalizationOptions:
    lowercase: bool = False
    unicode_nfc: bool = True
    collapse_whitespace: bool = True

    def apply(self, text: str) -> str:
        if self.unicode_nfc:
            text = unicodedata.normalize("NFC", text)
        if self.collapse_whitespace:
            text = _WS.sub(" ", text).strip()
        if self.lowercase:
            text = text.lower()
        return text


@dataclass(frozen=True)
class Entry:
    entry_index: int
    element_path: str
    fields: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class Corpus:
    entries: tuple[Entry, ...]
    source_path: str = ""

    @property
    def entry_count(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class FieldInstance:
    tag_name: str
    text_value: str
    entry_index: int
    occurrence_index: int

    @property
    def locator(self) -> tuple[str, int, int]:
        return (self.tag_name, self.entry_index, self.occurrence_index)


@dataclass(frozen=True)
class TiedPair:
    first: FieldInstance
    second: FieldInstance
    pair_id: str = field(default="")

    def __post_init__(self) -> None:
        if self.first.entry_index != self.second.entry_index:
            raise ValueError("tied pair members must come from the same entry")
        if not self.pair_id:
            object.__setattr__(
                self,
                "pair_id",
                f"{self.first.entry_index}:{self.first.occurrence_index}",
            )


def _decode(xml_bytes: bytes) -> str:
    if xml_bytes.startswith(codecs.BOM_UTF8):
        return xml_bytes[len(codecs.BOM_UTF8):].decode("utf-8")
    if xml_bytes.startswith((codecs.BOM_UTF16_LE, codecs.BOM_UTF16_BE)):
        return xml_bytes.decode("utf-16")
    m = _ENCODING_DECL.match(xml_bytes)
    encoding = m.group(1).decode("ascii") if m else "utf-8"
    try:
        return xml_bytes.decode(encoding)
    except (LookupError, UnicodeDecodeError) as exc:
        raise DictionaryParseError(f"cannot decode input as {encoding}: {exc}") from exc


def _resolve_named_entities(text: str) -> str:
    """Rewrite HTML named entities as numeric references.

    Expat only knows the five predefined XML entities unless a DTD declares
    more; dictionaries routinely use ``&eacute;`` and friends without one.
    Names declared in the document's own DTD are left for expat.
    """
    declared = set(_ENTITY_DECL.findall(text))

    def repl(m: re.Match[str]) -> str:
        name = m.group(1)
        if name in _XML_PREDEFINED or name in declared:
            return m.group(0)
        chars = html.entities.html5.get(name + ";")
        if chars is None:
            return m.group(0)
        return "".join(f"&#{ord(c)};" for c in chars)

    return _ENTITY_REF.sub(repl, text)


def _own_text(elem: ET.Element) -> str:
    parts = [elem.text or ""]
    parts.extend(child.tail or "" for child in elem)
    return "".join(parts)


def _walk(elem: ET.Element, deep_text: bool) -> Iterator[tuple[str, str]]:
    for desc in elem.iter():
        if desc is elem or not isinstance(desc.tag, str):
            continue
        text = "".join(desc.itertext()) if deep_text else _own_text(desc)
        yield desc.tag, text


def parse_dictionary(
    xml_bytes: bytes,
    entry_tag: str,
    *,
    source_path: str = "",
    deep_text: bool = False,
) -> Corpus:
    """Return one :class:`Entry` per ``entry_tag`` element, in document order.

    Nested entry elements are not split out; the outermost match wins.
    """
    text = _resolve_named_entities(_decode(xml_bytes))
    # The text is re-encoded as UTF-8, so any declared encoding is now stale.
    text = _XML_DECL.sub("", text, count=1)
    parser = ET.XMLParser()
    try:
        parser.feed(text.encode("utf-8"))
        root = parser.close()
    except ET.ParseError as exc:
        line, col = exc.position
        reason = str(exc).split(":")[0]
        raise DictionaryParseError(f"malformed XML: {reason}", line, col + 1) from exc

    entries: list[Entry] = []

    def visit(elem: ET.Element, path: tuple[str, ...]) -> None:
        here = path + (elem.tag,)
        if elem.tag == entry_tag:
            entries.append(
                Entry(
                    entry_index=len(entries),
                    element_path="/".join(here),
                    fields=tuple(_walk(elem, deep_text)),
                )
            )
            return
        for child in elem:
            if isinstance(child.tag, str):
                visit(child, here)

    visit(root, ())
    if not entries:
        warnings.warn(f"no <{entry_tag}> elements found", EmptyCorpusWarning, stacklevel=2)
    log.debug("parsed %d entries from %s", len(entries), source_path or "<bytes>")
    return Corpus(entries=tuple(entries), source_path=source_path)


def _field_values(entry: Entry, tag_name: str, opts: NormalizationOptions) -> list[str]:
    return [opts.apply(text) for tag, text in entry.fields if tag == tag_name]


def extract_single_field(
    corpus: Corpus, tag_name: str, opts: NormalizationOptions | None = None
) -> list[FieldInstance]:
    opts = opts or NormalizationOptions()
    out = []
    for entry in corpus.entries:
        for k, value in enumerate(_field_values(entry, tag_name, opts)):
            out.append(FieldInstance(tag_name, value, entry.entry_index, k))
    return out


def extract_tied_pairs(
    corpus: Corpus,
    first_tag: str,
    second_tag: str,
    opts: NormalizationOptions | None = None,
) -> list[TiedPair]:
    """Pair the k-th ``first_tag`` value with the k-th ``second_tag`` value per entry.

    Surplus values on either side are skipped and tallied in a single
    :class:`PairSkewWarning`.
    """
    opts = opts or NormalizationOptions()
    pairs: list[TiedPair] = []
    skipped = 0
    skewed_entries = 0
    for entry in corpus.entries:
        firsts = _field_values(entry, first_tag, opts)
        seconds = _field_values(entry, second_tag, opts)
        if len(firsts) != len(seconds):
            skewed_entries += 1
            skipped += abs(len(firsts) - len(seconds))
        for k, (a, b) in enumerate(zip(firsts, seconds)):
            pairs.append(
                TiedPair(
                    FieldInstance(first_tag, a, entry.entry_index, k),
                    FieldInstance(second_tag, b, entry.entry_index, k),
                )
            )
    if skipped:
        warnings.warn(
            f"{first_tag}/{second_tag}: skipped {skipped} unmatched value(s) "
            f"in {skewed_entries} entr{'y' if skewed_entries == 1 else 'ies'}",
            PairSkewWarning,
            stacklevel=2,
        )
    return pairs
