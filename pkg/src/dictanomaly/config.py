"""Run configuration: which fields to check with which detectors, and how."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .corpus import NormalizationOptions
from .detectors import SINGLE_FIELD, TIED_FIELD, DetectorConfig
from .translit import TranslitConfig


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass(frozen=True)
class SingleFieldSpec:
    tag: str
    detectors: tuple[str, ...] = SINGLE_FIELD


@dataclass(frozen=True)
class TiedFieldSpec:
    first: str
    second: str
    detectors: tuple[str, ...] = TIED_FIELD


@dataclass(frozen=True)
class RunConfig:
    input_path: str | None
    entry_tag: str
    single_fields: tuple[SingleFieldSpec, ...] = ()
    tied_fields: tuple[TiedFieldSpec, ...] = ()
    detector_config: DetectorConfig = field(default_factory=DetectorConfig)
    normalization: NormalizationOptions = field(default_factory=NormalizationOptions)
    deep_text: bool = False
    output_path: str | None = None
    output_format: str = "json"

    def digest(self) -> str:
        """Hash of everything that affects detection (paths excluded)."""
        payload = {
            "entry_tag": self.entry_tag,
            "single_fields": [dataclasses.asdict(s) for s in self.single_fields],
            "tied_fields": [dataclasses.asdict(t) for t in self.tied_fields],
            "detectors": dataclasses.asdict(self.detector_config),
            "normalization": dataclasses.asdict(self.normalization),
            "deep_text": self.deep_text,
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=list)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


_TOP_KEYS = {
    "input",
    "entry_tag",
    "single_fields",
    "tied_fields",
    "detectors",
    "normalization",
    "deep_text",
    "output",
    "format",
}


def _check_keys(where: str, got: Mapping[str, Any], allowed: set[str]) -> None:
    unknown = sorted(set(got) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _field_names(cls) -> set[str]:
    return {f.name for f in dataclasses.fields(cls) if not f.name.startswith("_")}


def _detector_list(where: str, raw, allowed: tuple[str, ...], kind: str) -> tuple[str, ...]:
    if raw is None:
        return allowed
    if isinstance(raw, str):
        raw = [raw]
    out = []
    for d in raw:
        if d not in allowed:
            other = "tied-field" if kind == "single-field" else "single-field"
            hint = f" ({d} is a {other} detector)" if d in SINGLE_FIELD + TIED_FIELD else ""
            raise ConfigError(f"{where}: detector {d!r} is not valid for a {kind} spec{hint}")
        if d not in out:
            out.append(d)
    return tuple(out)


def config_from_mapping(raw: Mapping[str, Any], base_dir: Path | None = None) -> RunConfig:
    if not isinstance(raw, Mapping):
        raise ConfigError("config must be a mapping at the top level")
    _check_keys("config", raw, _TOP_KEYS)
    if "entry_tag" not in raw:
        raise ConfigError("config needs an entry_tag")

    singles = []
    for i, spec in enumerate(raw.get("single_fields") or []):
        if isinstance(spec, str):
            spec = {"tag": spec}
        _check_keys(f"single_fields[{i}]", spec, {"tag", "detectors"})
        if "tag" not in spec:
            raise ConfigError(f"single_fields[{i}] needs a tag")
        dets = _detector_list(f"single_fields[{i}]", spec.get("detectors"), SINGLE_FIELD, "single-field")
        singles.append(SingleFieldSpec(str(spec["tag"]), dets))

    tieds = []
    for i, spec in enumerate(raw.get("tied_fields") or []):
        _check_keys(f"tied_fields[{i}]", spec, {"first", "second", "detectors"})
        if "first" not in spec or "second" not in spec:
            raise ConfigError(f"tied_fields[{i}] needs first and second")
        dets = _detector_list(f"tied_fields[{i}]", spec.get("detectors"), TIED_FIELD, "tied-field")
        tieds.append(TiedFieldSpec(str(spec["first"]), str(spec["second"]), dets))

    if not singles and not tieds:
        raise ConfigError("config needs at least one single_fields or tied_fields entry")

    det_raw = dict(raw.get("detectors") or {})
    _check_keys("detectors", det_raw, _field_names(DetectorConfig))
    tl_raw = det_raw.pop("translit", None) or {}
    _check_keys("detectors.translit", tl_raw, _field_names(TranslitConfig))
    if det_raw.get("ratio_partition") is not None:
        det_raw["ratio_partition"] = tuple(det_raw["ratio_partition"])
    try:
        det = DetectorConfig(**det_raw, translit=TranslitConfig(**tl_raw))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"detectors: {exc}") from exc

    norm_raw = raw.get("normalization") or {}
    _check_keys("normalization", norm_raw, _field_names(NormalizationOptions))
    norm = NormalizationOptions(**norm_raw)

    fmt = raw.get("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError(f"format must be json or csv, not {fmt!r}")

    def resolve(p):
        if p is None:
            return None
        path = Path(p)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return str(path)

    return RunConfig(
        input_path=resolve(raw.get("input")),
        entry_tag=str(raw["entry_tag"]),
        single_fields=tuple(singles),
        tied_fields=tuple(tieds),
        detector_config=det,
        normalization=norm,
        deep_text=bool(raw.get("deep_text", False)),
        output_path=resolve(raw.get("output")),
        output_format=fmt,
    )


def load_config(path: str | Path) -> RunConfig:
    """Read a YAML (or JSON) config; relative paths resolve against its directory."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return config_from_mapping(raw, base_dir=path.parent)
