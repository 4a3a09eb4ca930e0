"""Benchmark layer descriptions and strict JSON config loading.

A config file is a JSON array of layer objects.  Field names match
LayerConfig exactly; unknown fields are rejected so typos surface instead of
silently applying defaults.  The one extra key accepted is "comment", a
free-text string the shipped files use to record where each layer's
dimensions come from.

Depthwise layers use valid-mode geometry: (h_i - h_f) and (w_i - w_f) must be
exact multiples of the stride.  Pointwise layers are 1x1 by construction and
take stride 1 only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

LAYER_KINDS = ("dwconv", "pwconv")

_COMMON_FIELDS = {"name", "kind", "h_i", "w_i", "c_i", "stride", "comment"}
_FIELDS_BY_KIND = {
    "dwconv": _COMMON_FIELDS | {"h_f", "w_f"},
    "pwconv": _COMMON_FIELDS | {"c_o"},
}
_REQUIRED_BY_KIND = {
    "dwconv": {"name", "kind", "h_i", "w_i", "c_i", "h_f", "w_f"},
    "pwconv": {"name", "kind", "h_i", "w_i", "c_i", "c_o"},
}


class ConfigError(ValueError):
    """Malformed or geometrically invalid layer configuration."""


def _positive_int(obj: dict, key: str, minimum: int = 1) -> int:
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"field {key!r} must be an integer, got {val!r}")
    if val < minimum:
        raise ConfigError(f"field {key!r} must be >= {minimum}, got {val}")
    return val


@dataclass(frozen=True)
class LayerConfig:
    """One convolution layer to validate, measure, or benchmark."""

    name: str
    kind: str
    h_i: int
    w_i: int
    c_i: int
    stride: int = 1
    c_o: int | None = None
    h_f: int | None = None
    w_f: int | None = None
    comment: str | None = None

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise ConfigError(f"layer name must be a non-empty string, got {self.name!r}")
        if self.kind not in LAYER_KINDS:
            raise ConfigError(f"kind must be one of {LAYER_KINDS}, got {self.kind!r}")
        for key in ("h_i", "w_i", "c_i", "stride"):
            val = getattr(self, key)
            if isinstance(val, bool) or not isinstance(val, int) or val < 1:
                raise ConfigError(f"field {key!r} must be an integer >= 1, got {val!r}")
        if self.kind == "dwconv":
            if self.c_o is not None:
                raise ConfigError("field 'c_o' does not apply to dwconv layers")
            for key in ("h_f", "w_f"):
                val = getattr(self, key)
                if val is None:
                    raise ConfigError(f"dwconv layers require field {key!r}")
                if isinstance(val, bool) or not isinstance(val, int) or val < 1:
                    raise ConfigError(f"field {key!r} must be an integer >= 1, got {val!r}")
            if self.h_f > self.h_i or self.w_f > self.w_i:
                raise ConfigError(
                    f"filter {self.h_f}x{self.w_f} larger than input {self.h_i}x{self.w_i}"
                )
            if (self.h_i - self.h_f) % self.stride or (self.w_i - self.w_f) % self.stride:
                raise ConfigError(
                    f"valid-mode geometry requires (h_i - h_f) and (w_i - w_f) divisible "
                    f"by stride; got {self.h_i}x{self.w_i} input, {self.h_f}x{self.w_f} "
                    f"filter, stride {self.stride}"
                )
        else:
            if self.h_f is not None or self.w_f is not None:
                raise ConfigError("fields 'h_f'/'w_f' do not apply to pwconv layers")
            if self.c_o is None:
                raise ConfigError("pwconv layers require field 'c_o'")
            if isinstance(self.c_o, bool) or not isinstance(self.c_o, int) or self.c_o < 1:
                raise ConfigError(f"field 'c_o' must be an integer >= 1, got {self.c_o!r}")
            if self.stride != 1:
                raise ConfigError(f"pwconv layers take stride 1, got {self.stride}")
        if self.comment is not None and not isinstance(self.comment, str):
            raise ConfigError(f"field 'comment' must be a string, got {self.comment!r}")

    @property
    def h_o(self) -> int:
        if self.kind == "dwconv":
            return (self.h_i - self.h_f) // self.stride + 1
        return self.h_i

    @property
    def w_o(self) -> int:
        if self.kind == "dwconv":
            return (self.w_i - self.w_f) // self.stride + 1
        return self.w_i


def load_layer_configs(path) -> list[LayerConfig]:
    """Parse and validate a JSON config file into LayerConfig objects."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror or exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(raw, list):
        raise ConfigError(f"{path}: top level must be a JSON array of layer objects")
    layers = []
    for idx, obj in enumerate(raw):
        where = f"{path}: layers[{idx}]"
        if isinstance(obj, dict) and isinstance(obj.get("name"), str):
            where += f" ({obj['name']})"
        if not isinstance(obj, dict):
            raise ConfigError(f"{where}: each layer must be a JSON object")
        kind = obj.get("kind")
        if kind not in LAYER_KINDS:
            raise ConfigError(f"{where}: kind must be one of {LAYER_KINDS}, got {kind!r}")
        unknown = sorted(set(obj) - _FIELDS_BY_KIND[kind])
        if unknown:
            raise ConfigError(f"{where}: unknown field(s) for {kind}: {', '.join(unknown)}")
        missing = sorted(_REQUIRED_BY_KIND[kind] - set(obj))
        if missing:
            raise ConfigError(f"{where}: missing required field(s): {', '.join(missing)}")
        try:
            layers.append(LayerConfig(**obj))
        except ConfigError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    return layers
