"""Run configuration: defaults, file loading, validation and overrides.

A run is configured by a nested key-value document (YAML or JSON on disk).
Unknown keys are rejected so typos fail loudly; CLI overrides use dotted
paths (``loss.tau=0.4``). The fully resolved document is echoed next to
every output for provenance.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError


class _Leaf:
    """Schema leaf: a default plus the accepted types."""

    def __init__(self, default, types=None, optional=False):
        self.default = default
        self.optional = optional or default is None
        if types is None:
            types = (type(default),)
        self.types = types if isinstance(types, tuple) else (types,)

    def check(self, path: str, value):
        if value is None:
            if self.optional:
                return None
            raise ConfigError(f"{path}: may not be null")
        if float in self.types and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if isinstance(value, bool) and bool not in self.types:
            raise ConfigError(f"{path}: expected {self.types}, got bool")
        if not isinstance(value, self.types):
            raise ConfigError(
                f"{path}: expected {[t.__name__ for t in self.types]}, "
                f"got {type(value).__name__} ({value!r})"
            )
        return value


SCHEMA: dict[str, Any] = {
    "dataset": {
        "path": _Leaf(None, types=str),
    },
    "augment": {
        "view1": {"edge_drop": _Leaf(0.2, float), "feature_mask": _Leaf(0.3, float)},
        "view2": {"edge_drop": _Leaf(0.4, float), "feature_mask": _Leaf(0.4, float)},
    },
    "encoder": {
        "hidden": _Leaf([128, 128], list),
        "contrast_dim": _Leaf(128, int),
        "activation": _Leaf("relu", str),
    },
    "loss": {
        "tau": _Leaf(0.5, float),
        "lambda": _Leaf(None, types=list),
        "mode": _Leaf("mux", str),
        "omega_floor": _Leaf(None, types=float),
    },
    "pae": {
        "backend": _Leaf("node2vec", str),
        "dim": _Leaf(128, int),
        "table": _Leaf("auto", str),
        "memory_budget": _Leaf(1 << 30, int),
        "cache": _Leaf(None, types=str),
        "node2vec": {
            "walks_per_node": _Leaf(10, int),
            "walk_length": _Leaf(80, int),
            "window": _Leaf(10, int),
            "p": _Leaf(1.0, float),
            "q": _Leaf(1.0, float),
            "negatives": _Leaf(5, int),
            "epochs": _Leaf(5, int),
            "batch_pairs": _Leaf(16384, int),
        },
        "vgae": {
            "hidden": _Leaf(64, int),
            "latent": _Leaf(32, int),
            "epochs": _Leaf(300, int),
            "lr": _Leaf(0.01, float),
        },
    },
    "train": {
        "epochs": _Leaf(200, int),
        "lr": _Leaf(5e-4, float),
        "weight_decay": _Leaf(1e-5, float),
        "beta1": _Leaf(0.9, float),
        "beta2": _Leaf(0.999, float),
        "eps": _Leaf(1e-8, float),
        "seed": _Leaf(0, int),
        "checkpoint_every": _Leaf(0, int),
    },
    "eval": {
        "seeds": _Leaf([0, 1, 2, 3, 4], list),
        "split": {
            "train": _Leaf(0.1, float),
            "val": _Leaf(0.1, float),
            "test": _Leaf(0.8, float),
        },
        "l2": _Leaf(1.0, float),
        "normalize_embeddings": _Leaf(True, bool),
    },
    "analysis": {
        "bins": _Leaf(60, int),
        "sample_count": _Leaf(200_000, int),
    },
}


def default_config() -> dict:
    def build(node):
        if isinstance(node, _Leaf):
            return node.default
        return {k: build(v) for k, v in node.items()}

    return build(SCHEMA)


def _merge(schema, overrides, path=""):
    if isinstance(schema, _Leaf):
        return schema.check(path, overrides)
    if not isinstance(overrides, dict):
        raise ConfigError(f"{path or 'config'}: expected a mapping, got {overrides!r}")
    out = {}
    for key, sub in schema.items():
        child = f"{path}.{key}" if path else key
        if key in overrides:
            out[key] = _merge(sub, overrides[key], child)
        else:
            out[key] = _merge(sub, sub.default, child) if isinstance(sub, _Leaf) else _merge(sub, {}, child)
    unknown = set(overrides) - set(schema)
    if unknown:
        where = path or "top level"
        raise ConfigError(f"unknown config key(s) at {where}: {sorted(unknown)}")
    return out


def resolve_config(document: dict | None) -> dict:
    """Merge a (possibly partial) document onto the defaults, validating
    every key and value type."""
    return _merge(SCHEMA, document or {})


def load_config(path: str | Path) -> dict:
    """Read and resolve a YAML/JSON config file."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        doc = yaml.safe_load(p.read_text())
    except yaml.YAMLError as e:
        raise ConfigError(f"{p}: {e}") from e
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError(f"{p}: top level must be a mapping")
    return resolve_config(doc)


def apply_overrides(cfg: dict, assignments: list[str]) -> dict:
    """Apply ``section.key=value`` overrides; values parse as YAML scalars."""
    doc = json.loads(json.dumps(cfg))  # deep copy
    for item in assignments:
        if "=" not in item:
            raise ConfigError(f"override {item!r} must look like key.path=value")
        dotted, raw = item.split("=", 1)
        keys = dotted.strip().split(".")
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as e:
            raise ConfigError(f"override {item!r}: {e}") from e
        node = doc
        for key in keys[:-1]:
            if not isinstance(node.get(key), dict):
                raise ConfigError(f"override {item!r}: no section {key!r}")
            node = node[key]
        node[keys[-1]] = value
    return resolve_config(doc)


def write_echo(cfg: dict, path: str | Path) -> None:
    """Persist the fully resolved config next to a run's outputs."""
    Path(path).write_text(json.dumps(cfg, indent=2, sort_keys=True) + "\n")
