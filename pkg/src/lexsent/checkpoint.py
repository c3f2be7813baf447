"""Checkpoint manifests: named fp64 parameter arrays plus metadata.

The manifest is JSON: a format-version field, one entry per parameter
with (name, shape, row-major values), and an optional ``meta`` object
for whatever the caller needs to rebuild the model (config, vocab).
Python's float repr round-trips every finite double, so save->load is
bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import CheckpointError
from .tensor import Parameter

FORMAT_VERSION = 1


def save_checkpoint(path, params: list[Parameter], meta: dict | None = None) -> None:
    names = [p.name for p in params]
    if len(set(names)) != len(names):
        raise CheckpointError("duplicate parameter names in checkpoint")
    manifest = {
        "format_version": FORMAT_VERSION,
        "params": [
            {"name": p.name, "shape": list(p.shape), "values": p.data.reshape(-1).tolist()}
            for p in params
        ],
        "meta": meta or {},
    }
    Path(path).write_text(json.dumps(manifest), encoding="utf-8")


def load_checkpoint(path) -> tuple[dict[str, np.ndarray], dict]:
    p = Path(path)
    if not p.exists():
        raise CheckpointError(f"checkpoint not found: {path}")
    try:
        manifest = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise CheckpointError(f"unreadable checkpoint {path}: {e}") from e
    if manifest.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(
            f"unsupported checkpoint format {manifest.get('format_version')!r}")
    arrays = {}
    for entry in manifest["params"]:
        arr = np.array(entry["values"], dtype=np.float64).reshape(entry["shape"])
        arrays[entry["name"]] = arr
    return arrays, manifest.get("meta", {})


def restore(params: list[Parameter], arrays: dict[str, np.ndarray]) -> None:
    """Copy loaded arrays into matching parameters; any mismatch is fatal."""
    for p in params:
        if p.name not in arrays:
            raise CheckpointError(f"checkpoint is missing parameter {p.name!r}")
        arr = arrays[p.name]
        if tuple(arr.shape) != p.shape:
            raise CheckpointError(
                f"shape mismatch for {p.name!r}: checkpoint {arr.shape}, model {p.shape}")
        p.data = arr.copy()
        p.zero_grad()
