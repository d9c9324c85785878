"""JSON report envelope shared by every CLI command."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__

SCHEMA_PATH = Path(__file__).with_name("schema") / "report.schema.json"


def jsonable(obj):
    """Recursively convert numpy scalars/arrays, tuples, sets and dataclasses to plain JSON values."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(jsonable(v) for v in obj)
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return str(obj)


@dataclass
class ReportEnvelope:
    command: str
    ring: str
    bounds: dict = field(default_factory=dict)
    seed: int | None = None
    verdicts: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    timing: float = 0.0
    version: str = __version__

    def as_dict(self) -> dict:
        return jsonable(dataclasses.asdict(self))

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.as_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ReportEnvelope":
        names = {f.name for f in dataclasses.fields(cls)}
        extra = set(data) - names
        if extra:
            raise ValueError(f"unknown report fields: {sorted(extra)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "ReportEnvelope":
        return cls.from_dict(json.loads(text))


def load_schema() -> dict:
    return json.loads(SCHEMA_PATH.read_text())


def cache_key(command: str, ring: str, bounds: dict, seed) -> str:
    blob = json.dumps([__version__, command, ring, jsonable(bounds), seed], sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


class ResultCache:
    """Content-addressed report files; purely advisory."""

    def __init__(self, root: str | os.PathLike | None = None):
        if root is None:
            root = os.environ.get("RINGLAB_CACHE_DIR") or Path.home() / ".cache" / "ringlab"
        self.root = Path(root)

    def path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> ReportEnvelope | None:
        p = self.path(key)
        try:
            return ReportEnvelope.from_json(p.read_text())
        except (OSError, ValueError, TypeError):
            return None

    def put(self, key: str, report: ReportEnvelope) -> Path | None:
        p = self.path(key)
        try:
            p.parent.mkdir(parents=True, exist_ok=True)
            tmp = p.with_suffix(".tmp")
            tmp.write_text(report.to_json())
            tmp.replace(p)
        except OSError:
            return None
        return p
