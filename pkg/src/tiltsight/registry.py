from __future__ import annotations

import json
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - Python 3.10 fallback
    import tomli as tomllib

from sympy.polys.domains.domain import Domain

from tiltsight.orbit import DEFAULT_SCAN_CAP, parse_object_names
from tiltsight.quivers import GradedQuiverPresentation, presentation_from_dict
from tiltsight.scalars import field_from_label


FORMATS = ("json", "dot", "text")
EXAMPLES_DIR = Path("data/examples")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SessionConfig:
    n: int | None = None
    d: int | None = None
    M: tuple[str, ...] = ()
    field: str = "Q"
    depth: int | None = None
    scan_window: int = DEFAULT_SCAN_CAP
    bar_length: int | None = None
    format: str = "json"
    force: bool = False
    presentation: GradedQuiverPresentation | None = None
    golden: Path | None = None

    def domain(self) -> Domain:
        try:
            return field_from_label(self.field)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def require_category(self) -> tuple[int, int]:
        if self.n is None or self.d is None:
            raise ConfigError("--n and --d are required (or a --config file that sets them)")
        if self.n < 1 or self.d < 1:
            raise ConfigError(f"need n >= 1 and d >= 1, got n={self.n}, d={self.d}")
        return self.n, self.d

    def require_summands(self) -> list[str]:
        if not self.M:
            raise ConfigError("--M is required, e.g. --M \"P(0,1)+P(2,1)\"")
        return list(self.M)

    def check(self) -> SessionConfig:
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}; expected one of {', '.join(FORMATS)}")
        if self.depth is not None and self.depth < 1:
            raise ConfigError(f"--depth must be positive, got {self.depth}")
        if self.bar_length is not None and self.bar_length < 1:
            raise ConfigError(f"--bar-length must be positive, got {self.bar_length}")
        if self.scan_window < 1:
            raise ConfigError(f"scan window must be positive, got {self.scan_window}")
        self.domain()
        return self


def _summands(value: Any) -> tuple[str, ...]:
    try:
        return tuple(parse_object_names(value))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: Path) -> SessionConfig:
    """Read a TOML session; `golden` is resolved against the file's directory."""
    try:
        payload = tomllib.loads(path.read_text(encoding="utf-8"))
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    known = {item.name for item in fields(SessionConfig)}
    unknown = sorted(set(payload) - known - {"scan-window", "bar-length"})
    if unknown:
        raise ConfigError(f"unknown config keys in {path}: {', '.join(unknown)}")
    values: dict[str, Any] = {}
    for key in ("n", "d", "depth", "field", "format", "force"):
        if key in payload:
            values[key] = payload[key]
    if "scan_window" in payload or "scan-window" in payload:
        values["scan_window"] = int(payload.get("scan_window", payload.get("scan-window")))
    if "bar_length" in payload or "bar-length" in payload:
        values["bar_length"] = int(payload.get("bar_length", payload.get("bar-length")))
    if "M" in payload:
        values["M"] = _summands(payload["M"])
    if "presentation" in payload:
        try:
            values["presentation"] = presentation_from_dict(payload["presentation"])
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad presentation in {path}: {exc}") from None
    if "golden" in payload:
        values["golden"] = (path.parent / payload["golden"]).resolve()
    return SessionConfig(**values)


def merge(config: SessionConfig, overrides: dict[str, Any]) -> SessionConfig:
    """Flags win over the file; a None flag keeps the file's value."""
    changes = {key: value for key, value in overrides.items() if value is not None}
    if "M" in changes:
        changes["M"] = _summands(changes["M"])
    if changes.get("force") is False:
        changes.pop("force")
    return replace(config, **changes).check()


def example_path(name: str, root: Path = Path(".")) -> Path:
    path = root / EXAMPLES_DIR / f"{name}.toml"
    if not path.exists():
        raise ConfigError(f"no example named {name!r} under {root / EXAMPLES_DIR}")
    return path


def load_golden(path: Path) -> dict[str, Any]:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read golden file {path}: {exc}") from None
