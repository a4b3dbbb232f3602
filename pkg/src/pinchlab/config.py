"""Run-wide bounds, read from one JSON file.

The shipped ``defaults.json`` is always loaded first.  A second file named by
``$PINCHLAB_CONFIG`` (or ``--config`` on the command line) may override any
subset of the keys; command-line flags override both.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields, replace
from importlib import resources
from pathlib import Path

ENV_VAR = "PINCHLAB_CONFIG"


@dataclass(frozen=True)
class Config:
    max_n: int
    node_budget: int
    enumeration_cap: int
    size_bound: int
    eval_bound: int
    max_size: int
    structure_bound: int
    subset_cap: int
    max_transcripts: int
    trials: int
    seed: int
    threads: int

    def override(self, **changes: int | None) -> Config:
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def as_dict(self) -> dict[str, int]:
        return asdict(self)


class ConfigError(ValueError):
    pass


def _merge(base: dict, extra: dict, origin: str) -> dict:
    known = {f.name for f in fields(Config)}
    unknown = set(extra) - known
    if unknown:
        raise ConfigError(f"{origin}: unknown keys {sorted(unknown)}")
    for k, v in extra.items():
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise ConfigError(f"{origin}: {k} must be a non-negative integer")
    return {**base, **extra}


def load_config(path: str | Path | None = None) -> Config:
    data = json.loads(resources.files("pinchlab").joinpath("defaults.json").read_text(encoding="utf-8"))
    path = path or os.environ.get(ENV_VAR)
    if path:
        try:
            extra = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(extra, dict):
            raise ConfigError(f"{path}: top level must be an object")
        data = _merge(data, extra, str(path))
    return Config(**data)
