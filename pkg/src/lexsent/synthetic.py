"""Synthetic corpora for end-to-end exercises and the demo pipeline.

Two generators: a flat clause corpus (three separable classes over a
50-word vocabulary) and a two-level corpus of "A , but B ." sentences
whose label is the class of the post-conjunction clause.  Both come with
matching dictionaries.  Sentiment-bearing test words are drawn from a
held-out slice of the dictionaries, so classifying the test split
correctly requires the dictionary channel, not token memorization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import RawSample, aggregate_labels
from .lexicon import (ConjunctionLexicon, KeyWordLexicon, Lexicons, PosLexicon)

CONJUNCTIONS = ["but", "and", "however", "although"]
SCORE_PATTERNS = {
    "positive": [[1, 1, 1, 1, 1], [1, 1, 1, 1, 0.5], [1, 1, 1, 0.5, 0.5],
                 [1, 1, 1, 1, 0]],
    "negative": [[0, 0, 0, 0, 0], [0, 0, 0, 0, 0.5], [0, 0, 0, 0.5, 0.5],
                 [0, 0, 0, 0, 1]],
    "neutral": [[0.5, 0.5, 0.5, 0.5, 0.5], [1, 0.5, 0.5, 0.5, 0],
                [1, 1, 0.5, 0, 0], [0.5, 0.5, 0.5, 1, 0]],
}


def _words(prefix: str, count: int) -> list[str]:
    return [f"{prefix}{i:02d}" for i in range(count)]


@dataclass
class WordPools:
    pos_train: list[str]
    pos_test: list[str]
    neg_train: list[str]
    neg_test: list[str]
    fillers: list[str]

    def keyword_pool(self, cls: str, split: str) -> list[str]:
        if cls == "positive":
            return self.pos_train if split == "train" else self.pos_test
        if cls == "negative":
            return self.neg_train if split == "train" else self.neg_test
        return []


def make_pools(n_polar: int = 30, n_held_out: int = 10,
               n_fillers: int = 20) -> WordPools:
    pos = _words("nice", n_polar)
    neg = _words("awful", n_polar)
    cut = n_polar - n_held_out
    return WordPools(pos[:cut], pos[cut:], neg[:cut], neg[cut:],
                     _words("thing", n_fillers))


def make_lexicons(pools: WordPools) -> Lexicons:
    keywords = KeyWordLexicon()
    for w in pools.pos_train + pools.pos_test:
        keywords.add(w, "Pos")
    for w in pools.neg_train + pools.neg_test:
        keywords.add(w, "Neg")
    keywords.add("not", "Pri")
    keywords.add("if", "Sup")
    keywords.add("why", "Int")
    pos = PosLexicon()
    for w in pools.pos_train + pools.pos_test + pools.neg_train + pools.neg_test:
        pos.add(w, "adjective")
    for w in pools.fillers:
        pos.add(w, "noun")
    for w in CONJUNCTIONS:
        pos.add(w, "accessory")
    return Lexicons(keywords, pos, ConjunctionLexicon(CONJUNCTIONS))


def _clause_words(cls: str, split: str, pools: WordPools,
                  rng: np.random.Generator, lead: str | None = None) -> list[str]:
    words = [str(w) for w in rng.choice(pools.fillers, size=int(rng.integers(1, 4)))]
    kw_pool = pools.keyword_pool(cls, split)
    if kw_pool:
        words += [str(w) for w in rng.choice(kw_pool, size=int(rng.integers(1, 3)))]
    rng.shuffle(words)
    if lead:
        words = [lead] + words
    return words


def make_clause_corpus(seed: int = 0, per_class: int = 10,
                       pools: WordPools | None = None
                       ) -> tuple[list[RawSample], Lexicons]:
    """Flat labeled clauses, classes cycled so every dictionary word in
    the train pools gets used."""
    pools = pools or make_pools(n_polar=8, n_held_out=0, n_fillers=30)
    rng = np.random.default_rng(seed)
    lexicons = make_lexicons(pools)
    samples = []
    i = 0
    for cls in ("positive", "neutral", "negative"):
        kw_pool = pools.keyword_pool(cls, "train")
        for j in range(per_class):
            fillers = [pools.fillers[(i * 3 + k) % len(pools.fillers)]
                       for k in range(int(rng.integers(2, 4)))]
            words = fillers + ([kw_pool[j % len(kw_pool)]] if kw_pool else [])
            rng.shuffle(words)
            if rng.random() < 0.4:
                words = [CONJUNCTIONS[i % 2]] + words
            words.append("." if i % 2 == 0 else ",")
            samples.append(RawSample(id=f"c{i:03d}", text=" ".join(words), label=cls))
            i += 1
    return samples, lexicons


def make_clause_samples(n_per_class: int, split: str, pools: WordPools,
                        rng: np.random.Generator, id_prefix: str) -> list[RawSample]:
    samples = []
    i = 0
    for cls in ("positive", "neutral", "negative"):
        for _ in range(n_per_class):
            lead = CONJUNCTIONS[int(rng.integers(0, 2))] if rng.random() < 0.4 else None
            words = _clause_words(cls, split, pools, rng, lead)
            words.append("." if rng.random() < 0.5 else ",")
            samples.append(RawSample(id=f"{id_prefix}{i:04d}",
                                     text=" ".join(words), label=cls, split=split))
            i += 1
    return samples


def make_sentence_samples(n: int, split: str, pools: WordPools,
                          rng: np.random.Generator, id_prefix: str) -> list[RawSample]:
    """Two-clause "A , but B ." sentences; the B clause fixes the label
    via a multi-annotator score pattern."""
    classes = ("positive", "neutral", "negative")
    samples = []
    for i in range(n):
        a_cls = classes[int(rng.integers(0, 3))]
        b_cls = classes[i % 3]
        a = _clause_words(a_cls, split, pools, rng)
        b = _clause_words(b_cls, split, pools, rng, lead="but")
        text = " ".join(a) + " , " + " ".join(b) + " ."
        patterns = SCORE_PATTERNS[b_cls]
        scores = [float(s) for s in patterns[int(rng.integers(0, len(patterns)))]]
        assert aggregate_labels(scores)[0] == b_cls
        samples.append(RawSample(id=f"{id_prefix}{i:04d}", text=text,
                                 annotator_scores=scores, split=split))
    return samples


@dataclass
class TwoLevelCorpus:
    t1: list[RawSample]
    t2_train: list[RawSample]
    t2_test: list[RawSample]
    lexicons: Lexicons
    pools: WordPools


def make_two_level_corpus(seed: int = 0, n_train: int = 300, n_test: int = 100,
                          t1_per_class: int = 100) -> TwoLevelCorpus:
    pools = make_pools()
    rng = np.random.default_rng(seed)
    t1 = make_clause_samples(t1_per_class, "train", pools, rng, "t1-")
    t2_train = make_sentence_samples(n_train, "train", pools, rng, "t2-tr-")
    t2_test = make_sentence_samples(n_test, "test", pools, rng, "t2-te-")
    return TwoLevelCorpus(t1, t2_train, t2_test, make_lexicons(pools), pools)


# -- file output -------------------------------------------------------------

def sample_record(s: RawSample) -> dict:
    rec: dict = {"id": s.id, "text": s.text}
    if s.tokens is not None:
        rec["tokens"] = s.tokens
    if s.pos is not None:
        rec["pos"] = s.pos
    if s.label is not None:
        rec["label"] = s.label
    if s.annotator_scores is not None:
        rec["annotator_scores"] = s.annotator_scores
    if s.split is not None:
        rec["split"] = s.split
    return rec


def write_corpus(samples: list[RawSample], path) -> None:
    lines = [json.dumps(sample_record(s), ensure_ascii=False, sort_keys=True)
             for s in samples]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_dictionaries(lexicons: Lexicons, dicts_dir) -> None:
    d = Path(dicts_dir)
    d.mkdir(parents=True, exist_ok=True)
    kw_lines = []
    for cat in ("Pos", "Neg", "Pri", "Sup", "Int"):
        kw_lines += [f"{w}\t{cat}" for w in lexicons.keywords.words(cat)]
    (d / "keywords.tsv").write_text("\n".join(kw_lines) + "\n", encoding="utf-8")
    pos_lines = [f"{w}\t{t}" for w, t in sorted(lexicons.pos._map.items())]
    (d / "pos.tsv").write_text("\n".join(pos_lines) + "\n", encoding="utf-8")
    (d / "conjunctions.txt").write_text(
        "\n".join(lexicons.conjunctions.words) + "\n", encoding="utf-8")


def generate(out_dir, seed: int = 0, n_train: int = 300, n_test: int = 100,
             t1_per_class: int = 100) -> dict:
    """Write t1.jsonl, t2.jsonl and dicts/ under ``out_dir``; returns the
    paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus = make_two_level_corpus(seed, n_train, n_test, t1_per_class)
    write_corpus(corpus.t1, out / "t1.jsonl")
    write_corpus(corpus.t2_train + corpus.t2_test, out / "t2.jsonl")
    write_dictionaries(corpus.lexicons, out / "dicts")
    return {"t1": str(out / "t1.jsonl"), "t2": str(out / "t2.jsonl"),
            "dicts": str(out / "dicts")}
