"""End-to-end orchestration: ingest, detect, assemble."""

from __future__ import annotations

import logging
import os
import warnings
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import RunConfig
from .corpus import Corpus, extract_single_field, extract_tied_pairs, parse_dictionary
from .detectors import SINGLE_DETECTORS, TIED_DETECTORS, DetectorError
from .report import Report, assemble_report

log = logging.getLogger(__name__)


def _timestamp(input_path: str | None) -> str | None:
    # Deterministic by design: SOURCE_DATE_EPOCH, else the input's mtime.
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is None and input_path and Path(input_path).exists():
        epoch = Path(input_path).stat().st_mtime
    if epoch is None:
        return None
    return datetime.fromtimestamp(int(float(epoch)), tz=timezone.utc).isoformat()


def detect_corpus(corpus: Corpus, config: RunConfig) -> tuple[list[list], list[str]]:
    """Run every configured detector; returns (anomaly lists, enabled detector ids).

    Warnings raised while extracting or detecting are logged, not fatal.
    A detector that fails is logged and skipped.
    """
    cfg = config.detector_config
    results: list[list] = []
    enabled: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        for spec in config.single_fields:
            instances = extract_single_field(corpus, spec.tag, config.normalization)
            if not instances:
                log.warning("field %s: no values found", spec.tag)
            for det in spec.detectors:
                enabled.append(det)
                results.append(SINGLE_DETECTORS[det](instances, cfg))
        for spec in config.tied_fields:
            pairs = extract_tied_pairs(corpus, spec.first, spec.second, config.normalization)
            if not pairs:
                log.warning("fields %s/%s: no pairs found", spec.first, spec.second)
            for det in spec.detectors:
                enabled.append(det)
                try:
                    results.append(TIED_DETECTORS[det](pairs, cfg))
                except DetectorError as exc:
                    log.error("%s on %s/%s: %s", det, spec.first, spec.second, exc)
    for w in caught:
        log.warning("%s", w.message)
    return results, enabled


def run_detection(config: RunConfig, xml_bytes: bytes | None = None) -> Report:
    if xml_bytes is None:
        if not config.input_path:
            raise FileNotFoundError("no input path configured")
        xml_bytes = Path(config.input_path).read_bytes()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        corpus = parse_dictionary(
            xml_bytes, config.entry_tag, source_path=config.input_path or "", deep_text=config.deep_text
        )
    for w in caught:
        log.warning("%s", w.message)
    log.info("parsed %d <%s> entries", corpus.entry_count, config.entry_tag)
    results, enabled = detect_corpus(corpus, config)
    meta = {
        "input": config.input_path,
        "config_digest": config.digest(),
        "version": __version__,
        "timestamp": _timestamp(config.input_path),
    }
    return assemble_report(results, meta, detectors=enabled)
