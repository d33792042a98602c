"""Command line interface.

    dictanomaly scan --config run.yaml [--input dict.xml] [--output report.json]
    dictanomaly overlap a.json b.json --detector-a length_ratio --detector-b transliteration
    dictanomaly eval report.json labels.csv --cutoffs 1,2,3,4

Exit codes: 0 success, 1 usage/config error, 2 input/parse error.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

import click

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .corpus import DictionaryParseError
from .detectors import DETECTOR_IDS
from .pipeline import run_detection
from .report import (
    DEFAULT_OVERLAP_CUTOFFS,
    overlap_table,
    parse_report,
    precision_curve,
    ranked_pair_ids,
    read_labels,
    serialize_report,
)

log = logging.getLogger("dictanomaly")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2


def _setup_logging(quiet: bool) -> None:
    logging.basicConfig(
        level=logging.ERROR if quiet else logging.INFO,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _write_atomic(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def run(config: RunConfig) -> int:
    """Ingest, detect and write the report; returns the process exit code."""
    try:
        report = run_detection(config)
    except FileNotFoundError as exc:
        log.error("cannot read input: %s", exc)
        return EXIT_INPUT
    except DictionaryParseError as exc:
        log.error("%s: %s", config.input_path, exc)
        return EXIT_INPUT
    data = serialize_report(report, config.output_format)
    if config.output_path:
        _write_atomic(Path(config.output_path), data)
        log.info("wrote %d anomalies to %s", len(report.anomalies), config.output_path)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK


@click.group()
@click.version_option(__version__, prog_name="dictanomaly")
def cli() -> None:
    """Flag likely errors in XML dictionaries via statistical anomalies."""


@cli.command("scan")
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.option("--input", "input_path", type=click.Path(dir_okay=False, path_type=Path), help="Overrides the config input.")
@click.option("--output", "output_path", type=click.Path(dir_okay=False, path_type=Path), help="Report path (default stdout).")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default=None)
@click.option("--quiet", is_flag=True, help="Only print errors.")
def scan_command(config_path, input_path, output_path, fmt, quiet) -> None:
    """Run the configured detectors and write a ranked report."""
    _setup_logging(quiet)
    if not config_path.is_file():
        log.error("config file not found: %s", config_path)
        sys.exit(EXIT_USAGE)
    try:
        config = load_config(config_path)
    except ConfigError as exc:
        log.error("%s", exc)
        sys.exit(EXIT_USAGE)
    overrides = {}
    if input_path is not None:
        overrides["input_path"] = str(input_path)
    if output_path is not None:
        overrides["output_path"] = str(output_path)
    if fmt is not None:
        overrides["output_format"] = fmt
    config = dataclasses.replace(config, **overrides)
    if not config.input_path:
        log.error("no input: set 'input' in the config or pass --input")
        sys.exit(EXIT_USAGE)
    sys.exit(run(config))


def _load_report(path: Path):
    fmt = "csv" if path.suffix.lower() == ".csv" else "json"
    return parse_report(path.read_bytes(), fmt)


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


@cli.command("overlap")
@click.argument("report_a", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("report_b", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--detector-a", default="length_ratio", type=click.Choice(DETECTOR_IDS))
@click.option("--detector-b", default="transliteration", type=click.Choice(DETECTOR_IDS))
@click.option("--cutoffs", default=",".join(map(str, DEFAULT_OVERLAP_CUTOFFS)), show_default=True)
def overlap_command(report_a, report_b, detector_a, detector_b, cutoffs) -> None:
    """Top-k overlap between two detectors' rankings, as JSON rows."""
    try:
        a = ranked_pair_ids(_load_report(report_a), detector_a)
        b = ranked_pair_ids(_load_report(report_b), detector_b)
        rows = overlap_table(a, b, _int_list(cutoffs))
    except (ValueError, KeyError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    out = [
        {
            "cutoff": r.cutoff,
            "effective_cutoff": r.effective_cutoff,
            "common": r.common,
            "percent": r.percent,
            "clamped": r.clamped,
        }
        for r in rows
    ]
    click.echo(json.dumps({"detector_a": detector_a, "detector_b": detector_b, "rows": out}, indent=2))


@cli.command("eval")
@click.argument("report_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("labels_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--cutoffs", default="0,1,2,3,4,5,6,7,8", show_default=True)
@click.option("--detector", type=click.Choice(DETECTOR_IDS), default=None, help="Restrict to one detector.")
def eval_command(report_path, labels_path, cutoffs, detector) -> None:
    """Mean label of labeled anomalies at or above each score cutoff."""
    try:
        report = _load_report(report_path)
        labels = read_labels(labels_path.read_bytes())
        points = precision_curve(report, labels, _float_list(cutoffs), detector)
    except (ValueError, KeyError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    out = [
        {
            "score_cutoff": p.score_cutoff,
            "mean_label": None if p.mean_label is None else round(p.mean_label, 6),
            "support": p.support,
        }
        for p in points
    ]
    click.echo(json.dumps({"detector": detector, "points": out}, indent=2))


@cli.command("synth")
@click.option("--entries", default=5000, show_default=True)
@click.option("--rate", default=0.05, show_default=True, help="Fraction of corrupted entries.")
@click.option("--seed", default=0, show_default=True)
@click.option("--output", "output_path", required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.option("--truth", "truth_path", type=click.Path(dir_okay=False, path_type=Path), help="CSV of corrupted entries.")
def synth_command(entries, rate, seed, output_path, truth_path) -> None:
    """Write a synthetic dictionary with injected corruptions."""
    from .synthetic import generate_dictionary

    synth = generate_dictionary(entries, rate, seed)
    _write_atomic(output_path, synth.to_xml())
    if truth_path:
        rows = "".join(f"{i},{c}\n" for i, c in sorted(synth.corruption.items()))
        _write_atomic(truth_path, ("entry_index,corruption\n" + rows).encode("utf-8"))


def main(argv: list[str] | None = None) -> int:
    """Console entry point; returns the exit code instead of raising."""
    try:
        cli.main(args=argv, prog_name="dictanomaly", standalone_mode=False)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        # click would use 2 here; 2 is reserved for bad input data
        exc.show()
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
