"""Experiment configuration: schema validation and content hashing."""

from __future__ import annotations

import hashlib
import json
import os

from .errors import FileMissing, ParseError, SchemaViolation
from .raag import DefiningGraph, defining_graph_from_json

BUILTIN_GRAPHS = {
    "F2": {"generators": ["a", "b"], "edges": []},
    "Z2": {"generators": ["a", "b"], "edges": [["a", "b"]]},
    "C5": {
        "generators": [f"v{i}" for i in range(5)],
        "edges": [[f"v{i}", f"v{(i + 1) % 5}"] for i in range(5)],
    },
}

# key -> (type or tuple of types, required, default)
SCHEMAS = {
    "walk": {
        "group": ((str, dict), True, None),
        "measure": ((str, dict), False, "srw"),
        "seed": (int, True, None),
        "n": (int, True, None),
        "trials": (int, True, None),
        "radius": (int, False, 8),
        "window": (int, False, 24),
        "out": (str, False, None),
    },
    "clt": {
        "group": ((str, dict), True, None),
        "measure": ((str, dict), False, "srw"),
        "seed": (int, True, None),
        "n": (int, True, None),
        "trials": (int, True, None),
        "radius": (int, False, 8),
        "window": (int, False, 24),
        "psi_horizon": (int, False, 300),
        "psi_trials": (int, False, 600),
        "psi_pool": (int, False, 192),
        "variance_oracle": ((int, float), False, None),
        "expect_positive": (bool, False, True),
        "s_growth_trials": (int, False, None),
        "out": (str, False, None),
        "figures": (bool, False, True),
    },
    "complex-gen": {
        "family": (dict, True, None),
        "budget": (int, False, 4096),
        "out": (str, False, None),
    },
    "complex-verify": {
        "path": (str, True, None),
        "box_mode": (str, False, "auto"),
        "box_quadruples": (int, False, 100_000),
        "projection_trials": (int, False, 200),
        "seed": (int, False, 0),
        "out": (str, False, None),
    },
    "raag-check": {
        "group": ((str, dict), True, None),
        "seed": (int, False, 0),
        "instances": (int, False, 200),
        "radius": (int, False, 8),
        "out": (str, False, None),
    },
    "lemmas": {
        "families": (list, False, None),
        "seed": (int, False, 0),
        "box_quadruples": (int, False, 100_000),
        "projection_trials": (int, False, 200),
        "chain_trials": (int, False, 100),
        "out": (str, False, None),
    },
    "s-growth": {
        "groups": (list, False, None),
        "seed": (int, True, None),
        "n": (int, True, None),
        "trials": (int, True, None),
        "radius": (int, False, 8),
        "window": (int, False, 24),
        "out": (str, False, None),
    },
}


def validate_config(kind, raw):
    """Check a raw dict against the schema for ``kind``; unknown keys are
    rejected, defaults are filled in."""
    try:
        schema = SCHEMAS[kind]
    except KeyError:
        raise SchemaViolation(f"unknown config kind {kind!r}", key="kind")
    if not isinstance(raw, dict):
        raise SchemaViolation("config must be a JSON object", key=None)
    for key in raw:
        if key not in schema and key != "kind":
            raise SchemaViolation(f"unknown key {key!r} for {kind} config", key=key)
    out = {"kind": kind}
    for key, (types, required, default) in schema.items():
        if key in raw:
            value = raw[key]
            if isinstance(value, bool) and not (types is bool or (isinstance(types, tuple) and bool in types)):
                raise SchemaViolation(f"key {key!r} has wrong type", key=key)
            if not isinstance(value, types):
                raise SchemaViolation(f"key {key!r} has wrong type", key=key)
            out[key] = value
        elif required:
            raise SchemaViolation(f"missing required key {key!r}", key=key)
        else:
            out[key] = default
    return out


def load_config(path, kind=None):
    """Load and validate a config file; the kind comes from the file's
    own "kind" key unless forced by the caller."""
    if not os.path.exists(path):
        raise FileMissing(f"config file {path} does not exist")
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"config file {path} is not valid JSON: {exc}")
    if kind is None:
        kind = raw.get("kind")
        if kind is None:
            raise SchemaViolation("config needs a 'kind' key", key="kind")
    raw = {k: v for k, v in raw.items() if k != "kind"}
    return validate_config(kind, raw)


def resolve_group(spec) -> DefiningGraph:
    """A builtin name ("F2", "Z2", "C5"), a defining-graph JSON dict, or a
    path to one."""
    if isinstance(spec, DefiningGraph):
        return spec
    if isinstance(spec, str):
        if spec in BUILTIN_GRAPHS:
            return defining_graph_from_json(BUILTIN_GRAPHS[spec])
        if os.path.exists(spec):
            with open(spec) as fh:
                return defining_graph_from_json(json.load(fh))
        raise SchemaViolation(f"unknown group {spec!r}", key="group")
    if isinstance(spec, dict):
        return defining_graph_from_json(spec)
    raise SchemaViolation("group must be a name, path, or JSON object", key="group")


def config_hash(config):
    """Content digest over the canonical JSON form."""
    from .reports import canonical_json

    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


def output_dir(config):
    """--out / config out, overridden by MEDIANWALK_OUT."""
    env = os.environ.get("MEDIANWALK_OUT")
    if env:
        return env
    return config.get("out") or "medianwalk-out"
