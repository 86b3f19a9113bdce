"""Byte-stable result emission and the append-only run registry.

Result files (JSON and CSV) must be reproducible byte-for-byte from the
same config hash, so everything is serialized through one canonical
writer: keys sorted, floats at 12 significant digits, newline-terminated.
Manifests carry timestamps and live in a separate JSONL registry.
"""

from __future__ import annotations

import datetime
import os
from dataclasses import dataclass, field

from .errors import IntegrityFailure


def _fmt_float(x):
    if x != x or x in (float("inf"), float("-inf")):
        raise IntegrityFailure(f"non-finite value {x!r} in a report")
    return format(x, ".12g")


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, fixed float formatting."""
    out = []
    _write(obj, out)
    return "".join(out)


def _write(obj, out):
    import json as _json

    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(_json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_fmt_float(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise IntegrityFailure("report keys must be strings")
            if i:
                out.append(",")
            out.append(_json.dumps(key))
            out.append(":")
            _write(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _write(item, out)
        out.append("]")
    else:
        try:
            _write(obj.to_json(), out)
        except AttributeError:
            raise IntegrityFailure(f"cannot serialize {type(obj).__name__}")


def emit_json(doc, path):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        fh.write(canonical_json(doc))
        fh.write("\n")
    return path


WALK_CSV_COLUMNS = ("trial", "n", "d", "s_lower", "clt_stat")


def emit_walk_csv(run, clt_samples, path):
    """One row per trial: (trial, n, d, s_lower, clt_stat)."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    s_lower = run.s_lower
    with open(path, "w") as fh:
        fh.write(",".join(WALK_CSV_COLUMNS) + "\n")
        for t in range(run.trials):
            s_val = "" if s_lower is None or int(s_lower[t]) < 0 else str(int(s_lower[t]))
            row = [
                str(t),
                str(run.n),
                str(int(run.distances[t, run.n])),
                s_val,
                _fmt_float(float(clt_samples[t])),
            ]
            fh.write(",".join(row) + "\n")
    return path


def emit(report, path, format):
    """Spec-level emission entry point; byte-stable per format."""
    if format == "json":
        doc = report.to_json() if hasattr(report, "to_json") else report
        return emit_json(doc, path)
    if format == "csv":
        run, samples = report
        return emit_walk_csv(run, samples, path)
    raise IntegrityFailure(f"unknown emission format {format!r}")


@dataclass
class RunManifest:
    config_hash: str
    seed: int | None
    build: str
    started: str
    finished: str = ""
    outcome: str = "running"
    artifacts: list = field(default_factory=list)

    def to_json(self):
        return {
            "config_hash": self.config_hash,
            "seed": self.seed,
            "build": self.build,
            "started": self.started,
            "finished": self.finished,
            "outcome": self.outcome,
            "artifacts": list(self.artifacts),
        }


def utcnow():
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def start_manifest(config_hash_, seed):
    from . import __version__

    return RunManifest(
        config_hash=config_hash_,
        seed=seed,
        build=f"medianwalk-{__version__}",
        started=utcnow(),
    )


def append_manifest(manifest: RunManifest, registry_path):
    os.makedirs(os.path.dirname(os.path.abspath(registry_path)), exist_ok=True)
    with open(registry_path, "a") as fh:
        fh.write(canonical_json(manifest.to_json()))
        fh.write("\n")
    return registry_path
