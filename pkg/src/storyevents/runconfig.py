"""Flat key = value run configuration with include support.

Files look like:

    include base.cfg
    model = prompt
    learning_rate = 4e-5
    epochs = 20

Later assignments win (so includes act as defaults). Every hyperparameter
defaults to the published training value; unknown keys are errors. Values are
coerced using the target dataclass's field types.
"""
from __future__ import annotations

import os
import types
import typing
from dataclasses import fields

from .errors import ConfigError
from .prompting.config import PromptModelConfig
from .tagging.config import TaggerConfig

#: Keys handled by the command driver rather than a model config.
GENERAL_KEYS = {
    "model",  # prompt | tagger
    "backbone",  # toy | hf:<model-id>
    "data",  # corpus directory or .jsonl
    "splits_dir",  # manifests directory (defaults to <data>/splits)
    "out",
    "seed",
    "toy",
    "synthetic_data",
    "baseline_model",
    "sample_sizes",
    "score_threshold",
    "embedding_file",
}


def parse_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    _read_into(path, values, seen=set())
    return values


def _read_into(path: str, values: dict[str, str], seen: set[str]) -> None:
    real = os.path.realpath(path)
    if real in seen:
        raise ConfigError(f"config include cycle at {path}")
    seen.add(real)
    with open(path, encoding="utf-8") as handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("include "):
                target = line[len("include "):].strip()
                if not os.path.isabs(target):
                    target = os.path.join(os.path.dirname(path), target)
                _read_into(target, values, seen)
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{line_number}: expected key = value, got {raw!r}")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()


def apply_overrides(values: dict[str, str], overrides: list[str]) -> dict[str, str]:
    out = dict(values)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _coerce(raw: str, target_type) -> object:
    origin = typing.get_origin(target_type)
    if origin in (typing.Union, types.UnionType):
        members = [m for m in typing.get_args(target_type) if m is not type(None)]
        if raw.lower() in ("none", ""):
            return None
        return _coerce(raw, members[0])
    if target_type is bool:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"cannot parse boolean from {raw!r}")
    if target_type is int:
        return int(raw)
    if target_type is float:
        return float(raw)
    if target_type is str:
        return raw
    if origin is tuple:
        item_type = typing.get_args(target_type)[0]
        return tuple(_coerce(part.strip(), item_type) for part in raw.split(",") if part.strip())
    raise ConfigError(f"unsupported config field type {target_type}")


def build_dataclass(cls, values: dict[str, str]):
    """Instantiate ``cls`` from the string map, consuming only its own keys."""
    hints = typing.get_type_hints(cls)
    kwargs = {}
    for f in fields(cls):
        if f.name in values:
            kwargs[f.name] = _coerce(values[f.name], hints[f.name])
    return cls(**kwargs)


def split_general(values: dict[str, str], model_cls) -> tuple[dict[str, str], dict[str, str]]:
    """Separate driver keys from model-config keys; reject anything unknown."""
    model_keys = {f.name for f in fields(model_cls)}
    general: dict[str, str] = {}
    model: dict[str, str] = {}
    for key, value in values.items():
        if key in GENERAL_KEYS:
            general[key] = value
        elif key in model_keys:
            model[key] = value
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return general, model


def model_class_for(kind: str):
    if kind == "prompt":
        return PromptModelConfig
    if kind == "tagger":
        return TaggerConfig
    raise ConfigError(f"model must be prompt or tagger, got {kind!r}")


def echo_config(values: dict[str, str], path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for key in sorted(values):
            handle.write(f"{key} = {values[key]}\n")
