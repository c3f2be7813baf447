"""Text ingestion: clause splitting, label aggregation, tokenization,
and line-delimited corpus loading.

A corpus file holds one JSON object per line.  Stage-1 records carry a
single clause ``label``; stage-2 records carry ``annotator_scores``
drawn from {1, 0.5, 0} that are averaged and thresholded into the three
classes.  Records may also carry pre-segmented ``tokens``, per-word
``pos`` tags, and an explicit ``split`` assignment.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError

LABELS = ("positive", "neutral", "negative")
LABEL_SCORES = {"positive": 1.0, "neutral": 0.5, "negative": 0.0}

CLAUSE_DELIMITERS = "，。！？；,.!?;"


def split_clauses(text: str, delimiters: str = CLAUSE_DELIMITERS) -> list[str]:
    """Split text into clauses at punctuation, delimiter kept on the
    preceding clause.

    A clause closes at a delimiter only once it holds actual content, so
    runs of delimiters stay attached to the clause before them.
    """
    if not text.strip():
        raise DataError("cannot split an empty text")

    def has_content(chars):
        return any(not (c.isspace() or c in delimiters) for c in chars)

    clauses = []
    current = []
    for ch in text:
        current.append(ch)
        if ch in delimiters and has_content(current):
            clauses.append("".join(current).strip())
            current = []
    tail = "".join(current).strip()
    if tail:
        if has_content(tail):
            clauses.append(tail)
        elif clauses:
            clauses[-1] += tail
    if not clauses:
        raise DataError("text contains only delimiters and whitespace")
    return clauses


def aggregate_labels(scores: list[float]) -> tuple[str, float]:
    """Average annotator scores and threshold into a class.

    Positive for a mean in [0.6, 1], negative for [0, 0.4], neutral in
    between; only the scores 1, 0.5, and 0 are legal.
    """
    if not scores:
        raise DataError("no annotator scores to aggregate")
    for s in scores:
        if float(s) not in (1.0, 0.5, 0.0):
            raise DataError(f"annotator score {s!r} not in {{1, 0.5, 0}}")
    mean = float(np.mean([float(s) for s in scores]))
    if 0.6 <= mean <= 1.0:
        return "positive", mean
    if 0.0 <= mean <= 0.4:
        return "negative", mean
    return "neutral", mean


def _has_cjk(text: str) -> bool:
    return any(unicodedata.category(ch) == "Lo" and ord(ch) > 0x2E7F for ch in text)


def tokenize(text: str, mode: str, segmentation: list[str] | None = None) -> list[str]:
    """Character or word tokens.

    Character mode yields one token per Unicode scalar, punctuation
    included (whitespace dropped).  Word mode uses the supplied
    segmentation, else splits on whitespace; text that has neither
    (e.g. unsegmented Chinese) is a configuration error.
    """
    if mode == "char":
        return [ch for ch in text if not ch.isspace()]
    if mode != "word":
        raise ConfigError(f"unknown tokenize mode {mode!r}")
    if segmentation is not None:
        return list(segmentation)
    parts = text.split()
    if len(parts) <= 1 and _has_cjk(text) and len(text.strip()) > 1:
        raise ConfigError("word mode needs a segmentation for unsegmented text")
    return parts


@dataclass
class RawSample:
    """One corpus record: a labeled clause (stage 1) or a sentence with
    multiple annotator scores (stage 2)."""
    id: str
    text: str
    tokens: list[str] | None = None
    pos: list[str] | None = None
    label: str | None = None
    annotator_scores: list[float] | None = None
    split: str | None = None

    @property
    def stage(self) -> int:
        return 1 if self.label is not None else 2

    def resolved_label(self) -> str:
        if self.label is not None:
            return self.label
        return aggregate_labels(self.annotator_scores)[0]


def _parse_record(line: str, lineno: int) -> RawSample:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise DataError(f"line {lineno}: invalid record ({e.msg})") from e
    if not isinstance(obj, dict) or "text" not in obj:
        raise DataError(f"line {lineno}: record must be an object with a 'text' field")
    label = obj.get("label")
    scores = obj.get("annotator_scores")
    if (label is None) == (scores is None):
        raise DataError(
            f"line {lineno}: need exactly one of 'label' or 'annotator_scores'")
    if label is not None and label not in LABELS:
        raise DataError(f"line {lineno}: unknown label {label!r}")
    if scores is not None:
        if not isinstance(scores, list) or not scores:
            raise DataError(f"line {lineno}: annotator_scores must be a nonempty list")
        try:
            aggregate_labels(scores)
        except DataError as e:
            raise DataError(f"line {lineno}: {e}") from e
    split = obj.get("split")
    if split is not None and split not in ("train", "test"):
        raise DataError(f"line {lineno}: split must be 'train' or 'test'")
    return RawSample(
        id=str(obj.get("id", lineno)),
        text=obj["text"],
        tokens=obj.get("tokens"),
        pos=obj.get("pos"),
        label=label,
        annotator_scores=scores,
        split=split,
    )


@dataclass
class Dataset:
    """Loaded samples plus a fixed train/test assignment.

    Views: "R" is the stage-2 (raw sentence) samples, "C" the stage-1
    clause samples, and "R+C" their concatenation.
    """
    samples: list[RawSample]
    seed: int
    test_fraction: float
    _test_ids: set[str] = field(default_factory=set)

    def __post_init__(self):
        rng = np.random.default_rng(self.seed)
        for stage in (1, 2):
            pending = [s for s in self.samples if s.stage == stage and s.split is None]
            order = rng.permutation(len(pending))
            n_test = int(round(self.test_fraction * len(pending)))
            for rank, idx in enumerate(order):
                pending[idx].split = "test" if rank < n_test else "train"
        self._test_ids = {s.id for s in self.samples if s.split == "test"}

    def view(self, kind: str) -> list[RawSample]:
        if kind == "R":
            return [s for s in self.samples if s.stage == 2]
        if kind == "C":
            return [s for s in self.samples if s.stage == 1]
        if kind == "R+C":
            return self.view("R") + self.view("C")
        raise ConfigError(f"unknown view {kind!r} (expected R, C, or R+C)")

    def train(self, kind: str) -> list[RawSample]:
        return [s for s in self.view(kind) if s.split == "train"]

    def test(self, kind: str) -> list[RawSample]:
        return [s for s in self.view(kind) if s.split == "test"]

    def class_counts(self) -> dict[str, dict[str, int]]:
        """Per-class raw/clause counts, in the usual corpus-table layout."""
        out = {"raw": {c: 0 for c in LABELS}, "clauses": {c: 0 for c in LABELS}}
        for s in self.samples:
            key = "clauses" if s.stage == 1 else "raw"
            out[key][s.resolved_label()] += 1
        return out


def load_dataset(path, seed: int = 0, test_fraction: float = 0.2) -> Dataset:
    p = Path(path)
    if not p.exists():
        raise DataError(f"corpus file not found: {path}")
    samples = []
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        samples.append(_parse_record(line, lineno))
    if not samples:
        raise DataError(f"empty dataset: {path}")
    ids = [s.id for s in samples]
    if len(set(ids)) != len(ids):
        raise DataError(f"duplicate sample ids in {path}")
    return Dataset(samples, seed=seed, test_fraction=test_fraction)
