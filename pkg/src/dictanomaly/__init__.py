"""Flag statistical anomalies in the text content of XML dictionaries."""

__version__ = "0.1.0"

from .corpus import (  # noqa: E402
    Corpus,
    FieldInstance,
    NormalizationOptions,
    TiedPair,
    extract_single_field,
    extract_tied_pairs,
    parse_dictionary,
)
from .detectors import Anomaly, DetectorConfig  # noqa: E402
from .report import Report, assemble_report, serialize_report  # noqa: E402

__all__ = [
    "Anomaly",
    "Corpus",
    "DetectorConfig",
    "FieldInstance",
    "NormalizationOptions",
    "Report",
    "TiedPair",
    "assemble_report",
    "extract_single_field",
    "extract_tied_pairs",
    "parse_dictionary",
    "serialize_report",
]
