import json

import numpy as np
import pytest

from lexsent.corpus import (aggregate_labels, load_dataset, split_clauses,
                            tokenize)
from lexsent.errors import ConfigError, DataError


class TestSplitClauses:
    def test_two_clause_sentence(self):
        text = "The quality of the phone is good, but the appearance is just so-so."
        assert split_clauses(text) == [
            "The quality of the phone is good,",
            "but the appearance is just so-so.",
        ]

    def test_no_delimiters_single_clause(self):
        assert split_clauses("just fine") == ["just fine"]

    def test_mixed_width_delimiters(self):
        assert split_clauses("a，b。c") == ["a，", "b。", "c"]

    def test_three_clause_example(self):
        text = "The service is poor. The taste is good, but the rest is not so bad."
        clauses = split_clauses(text)
        assert len(clauses) == 3
        assert clauses[0] == "The service is poor."

    def test_reconstruction(self):
        rng = np.random.default_rng(0)
        pieces = ["abc", "de f", "xy"]
        delims = "，。!？;"
        for _ in range(30):
            text = "".join(p + delims[int(rng.integers(0, len(delims)))]
                           for p in pieces)
            assert "".join(split_clauses(text)) == text

    def test_empty_text(self):
        with pytest.raises(DataError):
            split_clauses("   ")
        with pytest.raises(DataError):
            split_clauses("。，")


class TestAggregateLabels:
    def test_worked_positive(self):
        label, mean = aggregate_labels([1, 1, 1, 0.5, 1])
        assert (label, mean) == ("positive", 0.9)

    def test_worked_negative(self):
        label, mean = aggregate_labels([0, 0, 0.5, 0, 0])
        assert (label, mean) == ("negative", 0.1)

    def test_worked_neutral(self):
        label, mean = aggregate_labels([1, 0, 0.5, 0.5, 0.5])
        assert (label, mean) == ("neutral", 0.5)

    def test_boundaries_inclusive(self):
        assert aggregate_labels([1, 0.5, 0.5, 0.5, 0.5])[0] == "positive"  # 0.6
        assert aggregate_labels([0, 0.5, 0.5, 0.5, 0.5])[0] == "negative"  # 0.4

    def test_class_is_pure_function_of_mean(self):
        rng = np.random.default_rng(1)
        for _ in range(300):
            scores = list(rng.choice([1.0, 0.5, 0.0], size=int(rng.integers(1, 9))))
            label, mean = aggregate_labels(scores)
            if 0.6 <= mean <= 1.0:
                assert label == "positive"
            elif 0.0 <= mean <= 0.4:
                assert label == "negative"
            else:
                assert label == "neutral"
            # permutation invariance
            assert aggregate_labels(scores[::-1]) == (label, mean)

    def test_invalid_score(self):
        with pytest.raises(DataError):
            aggregate_labels([1, 0.7])
        with pytest.raises(DataError):
            aggregate_labels([])


class TestTokenize:
    def test_char_mode_counts(self):
        assert tokenize("五个字符啊", "char") == list("五个字符啊")

    def test_word_mode_whitespace(self):
        assert tokenize("it is good", "word") == ["it", "is", "good"]

    def test_char_mode_keeps_punctuation(self):
        assert tokenize("好。", "char") == ["好", "。"]

    def test_char_mode_drops_whitespace(self):
        assert tokenize("a b", "char") == ["a", "b"]

    def test_word_mode_uses_segmentation(self):
        assert tokenize("质量好", "word", segmentation=["质量", "好"]) == ["质量", "好"]

    def test_word_mode_unsegmented_cjk_is_config_error(self):
        with pytest.raises(ConfigError):
            tokenize("质量很好", "word")

    def test_unknown_mode(self):
        with pytest.raises(ConfigError):
            tokenize("x", "syllable")


def _write_corpus(path, records):
    path.write_text("\n".join(json.dumps(r, ensure_ascii=False) for r in records),
                    encoding="utf-8")


class TestLoadDataset:
    def test_views_and_aggregation(self, tmp_path):
        f = tmp_path / "c.jsonl"
        _write_corpus(f, [
            {"id": "c1", "text": "good stuff .", "label": "positive"},
            {"id": "c2", "text": "bad stuff .", "label": "negative"},
            {"id": "r1", "text": "good , but bad .",
             "annotator_scores": [1, 1, 1, 0.5, 1]},
        ])
        ds = load_dataset(f, seed=0)
        assert len(ds.view("C")) == 2
        assert len(ds.view("R")) == 1
        assert len(ds.view("R+C")) == 3
        assert ds.view("R")[0].resolved_label() == "positive"
        counts = ds.class_counts()
        assert counts["raw"]["positive"] == 1
        assert counts["clauses"]["negative"] == 1

    def test_split_deterministic_given_seed(self, tmp_path):
        f = tmp_path / "c.jsonl"
        _write_corpus(f, [{"id": f"c{i}", "text": "x", "label": "neutral"}
                          for i in range(20)])
        a = {s.id for s in load_dataset(f, seed=7).test("C")}
        b = {s.id for s in load_dataset(f, seed=7).test("C")}
        c = {s.id for s in load_dataset(f, seed=8).test("C")}
        assert a == b
        assert len(a) == 4  # 20% of 20
        assert a != c or True  # different seeds usually differ; equality not fatal

    def test_explicit_split_respected(self, tmp_path):
        f = tmp_path / "c.jsonl"
        _write_corpus(f, [
            {"id": "a", "text": "x", "label": "neutral", "split": "test"},
            {"id": "b", "text": "y", "label": "neutral", "split": "train"},
        ])
        ds = load_dataset(f, seed=0)
        assert [s.id for s in ds.test("C")] == ["a"]
        assert [s.id for s in ds.train("C")] == ["b"]

    def test_splits_disjoint(self, tmp_path):
        f = tmp_path / "c.jsonl"
        _write_corpus(f, [{"id": f"s{i}", "text": "x", "label": "neutral"}
                          for i in range(10)])
        ds = load_dataset(f, seed=0)
        assert not ({s.id for s in ds.train("C")} & {s.id for s in ds.test("C")})

    def test_malformed_record_names_line(self, tmp_path):
        f = tmp_path / "c.jsonl"
        f.write_text('{"id": "a", "text": "x", "label": "neutral"}\nnot json\n',
                     encoding="utf-8")
        with pytest.raises(DataError, match="line 2"):
            load_dataset(f)

    def test_label_and_scores_mutually_exclusive(self, tmp_path):
        f = tmp_path / "c.jsonl"
        _write_corpus(f, [{"id": "a", "text": "x", "label": "neutral",
                           "annotator_scores": [1]}])
        with pytest.raises(DataError, match="line 1"):
            load_dataset(f)

    def test_bad_annotator_score(self, tmp_path):
        f = tmp_path / "c.jsonl"
        _write_corpus(f, [{"id": "a", "text": "x", "annotator_scores": [0.3]}])
        with pytest.raises(DataError):
            load_dataset(f)

    def test_empty_file(self, tmp_path):
        f = tmp_path / "c.jsonl"
        f.write_text("", encoding="utf-8")
        with pytest.raises(DataError, match="empty"):
            load_dataset(f)

    def test_missing_file(self):
        with pytest.raises(DataError):
            load_dataset("/nonexistent.jsonl")

    def test_duplicate_ids(self, tmp_path):
        f = tmp_path / "c.jsonl"
        _write_corpus(f, [{"id": "a", "text": "x", "label": "neutral"},
                          {"id": "a", "text": "y", "label": "neutral"}])
        with pytest.raises(DataError, match="duplicate"):
            load_dataset(f)

    def test_rc_view_has_no_duplicates(self, tmp_path):
        f = tmp_path / "c.jsonl"
        _write_corpus(f, [
            {"id": "c1", "text": "x", "label": "neutral"},
            {"id": "r1", "text": "y", "annotator_scores": [0.5]},
        ])
        ds = load_dataset(f, seed=0)
        rc = ds.view("R+C")
        assert len(rc) == len({s.id for s in rc}) == 2
