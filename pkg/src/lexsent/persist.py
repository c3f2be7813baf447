"""Model and distilled-feature persistence.

Models serialize as checkpoint manifests whose ``meta`` carries the
training config plus whatever the constructor needs back (vocabulary,
widths).  Distilled clause features go to line-delimited JSON so the
second training stage never re-runs level 1.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .checkpoint import load_checkpoint, restore, save_checkpoint
from .errors import CheckpointError, DataError
from .lexicon import Lexicons
from .network import (DistilledClause, DistilledSentence, Level1Model,
                      Level2Model, TrainConfig)


def save_level1(path, model: Level1Model) -> None:
    meta = {"level": "level1", "config": model.config.to_dict(),
            "vocab": model.vocab}
    save_checkpoint(path, model.parameters(), meta)


def load_level1(path) -> Level1Model:
    arrays, meta = load_checkpoint(path)
    if meta.get("level") != "level1":
        raise CheckpointError(f"{path} is not a level-1 checkpoint")
    cfg = TrainConfig.from_dict(meta["config"])
    model = Level1Model(meta["vocab"], cfg, np.random.default_rng(0))
    restore(model.parameters(), arrays)
    return model


def save_bundle(path, level1: Level1Model, level2: Level2Model) -> None:
    meta = {"level": "bundle", "config": level2.config.to_dict(),
            "level1_config": level1.config.to_dict(), "vocab": level1.vocab,
            "gamma_width": level2.gamma_width,
            "conj_count": len(level2.conj_family.categories) if level2.conj_family else 0}
    params = level1.parameters() + level2.parameters()
    save_checkpoint(path, params, meta)


def load_bundle(path, lexicons: Lexicons) -> tuple[Level1Model, Level2Model, TrainConfig]:
    arrays, meta = load_checkpoint(path)
    if meta.get("level") != "bundle":
        raise CheckpointError(f"{path} is not a bundle checkpoint")
    cfg = TrainConfig.from_dict(meta["config"])
    l1_cfg = TrainConfig.from_dict(meta.get("level1_config", meta["config"]))
    conj_count = meta["conj_count"]
    if cfg.use_conjunction and conj_count != len(lexicons.conjunctions):
        raise CheckpointError(
            f"conjunction lexicon size {len(lexicons.conjunctions)} does not "
            f"match checkpoint ({conj_count})")
    level1 = Level1Model(meta["vocab"], l1_cfg, np.random.default_rng(0))
    level2 = Level2Model(meta["gamma_width"], max(conj_count, 1), cfg,
                         np.random.default_rng(0))
    restore(level1.parameters() + level2.parameters(), arrays)
    return level1, level2, cfg


def save_distilled(path, sentences: list[DistilledSentence]) -> None:
    lines = []
    for s in sentences:
        lines.append(json.dumps({
            "id": s.id, "label": s.label,
            "clauses": [{"y": cl.y.tolist(), "gamma": cl.gamma.tolist(),
                         "conj_start": cl.conj_start, "conj_end": cl.conj_end,
                         "text": cl.text} for cl in s.clauses],
        }, ensure_ascii=False, sort_keys=True))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_distilled(path) -> list[DistilledSentence]:
    p = Path(path)
    if not p.exists():
        raise DataError(f"distilled features not found: {path}")
    out = []
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            clauses = [DistilledClause(
                y=np.array(c["y"], dtype=np.float64),
                gamma=np.array(c["gamma"], dtype=np.float64),
                conj_start=int(c["conj_start"]), conj_end=int(c["conj_end"]),
                text=c.get("text", "")) for c in obj["clauses"]]
            out.append(DistilledSentence(obj["id"], obj["label"], clauses))
        except (KeyError, ValueError, TypeError) as e:
            raise DataError(f"{path}:{lineno}: bad distilled record ({e})") from e
    if not out:
        raise DataError(f"no distilled sentences in {path}")
    return out
