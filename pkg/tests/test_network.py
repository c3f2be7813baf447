import dataclasses

import numpy as np
import numpy.testing as npt
import pytest

from lexsent.corpus import LABELS, RawSample
from lexsent.errors import ConfigError, DataError, DivergenceError, ShapeError
from lexsent.network import (DistilledClause, Level1Model, Level2Model,
                             TrainConfig, annotate_sample, build_vocab,
                             confusion_matrix, distill_clauses,
                             evaluate_level1, evaluate_two_level, predict,
                             train_level1, train_level2)
from lexsent.recurrent import attention_plain, bilstm
from lexsent.synthetic import make_two_level_corpus
from lexsent.tensor import concat, matmul, row, softmax

TINY = dict(embedding_dim=10, n=2, hidden1=8, hidden2=6, epochs=8,
            batch_size=16, mode="word")


def tiny_config(**kw):
    merged = {**TINY, **kw}
    return TrainConfig(**merged)


@pytest.fixture(scope="module")
def corpus():
    return make_two_level_corpus(seed=5, n_train=45, n_test=15, t1_per_class=15)


@pytest.fixture(scope="module")
def trained(corpus):
    cfg = tiny_config(seed=3, epochs=80, batch_size=8, early_stop_train_acc=0.99)
    level1, hist1 = train_level1(corpus.t1, cfg, corpus.lexicons)
    distilled = distill_clauses(corpus.t2_train, level1, corpus.lexicons, cfg)
    cfg2 = dataclasses.replace(cfg, epochs=30)
    level2, hist2 = train_level2(distilled, cfg2, corpus.lexicons)
    return dict(cfg=cfg2, level1=level1, level2=level2, distilled=distilled,
                hist1=hist1, hist2=hist2)


class TestLevel1Forward:
    def test_fresh_model_is_exactly_uniform(self, corpus):
        cfg = tiny_config(seed=0)
        vocab = build_vocab(corpus.t1, corpus.lexicons, cfg)
        model = Level1Model(vocab, cfg, np.random.default_rng(0))
        anns = annotate_sample(corpus.t1[0], corpus.lexicons, cfg)
        out = model.forward(anns)
        npt.assert_array_equal(out.y.data, np.full(3, 1 / 3))

    def test_deterministic(self, corpus):
        cfg = tiny_config(seed=0)
        vocab = build_vocab(corpus.t1, corpus.lexicons, cfg)
        model = Level1Model(vocab, cfg, np.random.default_rng(0))
        anns = annotate_sample(corpus.t1[1], corpus.lexicons, cfg)
        a, b = model.forward(anns), model.forward(anns)
        npt.assert_array_equal(a.y.data, b.y.data)
        npt.assert_array_equal(a.gamma.data, b.gamma.data)

    def test_empty_clause_rejected(self, corpus):
        cfg = tiny_config(seed=0)
        vocab = build_vocab(corpus.t1, corpus.lexicons, cfg)
        model = Level1Model(vocab, cfg, np.random.default_rng(0))
        with pytest.raises(ShapeError):
            model.forward([])

    def test_feature_widths(self, corpus):
        cfg = tiny_config(seed=0)
        vocab = build_vocab(corpus.t1, corpus.lexicons, cfg)
        model = Level1Model(vocab, cfg, np.random.default_rng(0))
        assert model.input_dim == cfg.embedding_dim + 6 * cfg.n + 8 * cfg.n
        anns = annotate_sample(corpus.t1[0], corpus.lexicons, cfg)
        out = model.forward(anns)
        assert out.gamma.size == 2 * cfg.hidden1
        assert out.y.size == 3

    def test_reduces_to_plain_bilstm_when_lexicons_disabled(self, corpus):
        cfg = tiny_config(seed=0, use_keyword=False, use_pos=False)
        vocab = build_vocab(corpus.t1, corpus.lexicons, cfg)
        model = Level1Model(vocab, cfg, np.random.default_rng(7))
        anns = annotate_sample(corpus.t1[2], corpus.lexicons, cfg)
        out = model.forward(anns)
        # reference path assembled from the raw ops, no lexicon code
        xs = [row(model.embedding, model.token_index(a.surface)) for a in anns]
        hs = bilstm(xs, model.fwd, model.bwd, cfg.cell_config()).concat
        gamma, alpha = attention_plain(hs, model.attn_w)
        logits = matmul(model.out_w, gamma) + model.out_b
        npt.assert_array_equal(out.gamma.data, gamma.data)
        npt.assert_array_equal(out.y.data, softmax(logits).data)
        npt.assert_array_equal(out.alpha.data, alpha.data)

    def test_sum_pooling_variant(self, corpus):
        cfg = tiny_config(seed=0, pooling="sum")
        vocab = build_vocab(corpus.t1, corpus.lexicons, cfg)
        model = Level1Model(vocab, cfg, np.random.default_rng(0))
        anns = annotate_sample(corpus.t1[0], corpus.lexicons, cfg)
        out = model.forward(anns)
        assert out.alpha is None
        assert out.gamma.size == 2 * cfg.hidden1


class TestTrainLevel1:
    def test_zero_lr_leaves_parameters_unchanged(self, corpus):
        cfg = tiny_config(seed=1, lr=0.0, epochs=3)
        model, hist = train_level1(corpus.t1[:9], cfg, corpus.lexicons)
        fresh = Level1Model(model.vocab, cfg, np.random.default_rng(cfg.seed))
        for a, b in zip(model.parameters(), fresh.parameters()):
            npt.assert_array_equal(a.data, b.data)
        assert len(hist) == 3

    def test_loss_decreases_on_learnable_task(self, trained):
        losses = [h["loss"] for h in trained["hist1"]]
        assert losses[-1] < losses[0]

    def test_overfits_single_example(self, corpus):
        cfg = tiny_config(seed=2, epochs=500, batch_size=1)
        model, hist = train_level1(corpus.t1[:1], cfg, corpus.lexicons)
        assert hist[-1]["loss"] < 0.01

    def test_seed_reproducibility(self, corpus):
        cfg = tiny_config(seed=9, epochs=3)
        _, h1 = train_level1(corpus.t1[:12], cfg, corpus.lexicons)
        _, h2 = train_level1(corpus.t1[:12], cfg, corpus.lexicons)
        assert h1 == h2  # bit-identical loss history

    def test_divergence_error_names_epoch(self, corpus):
        cfg = tiny_config(seed=0, optimizer="sgd", lr=1e100, epochs=8)
        mixed = [corpus.t1[0], corpus.t1[20], corpus.t1[40]]
        with pytest.raises(DivergenceError, match="epoch"):
            train_level1(mixed, cfg, corpus.lexicons)

    def test_empty_training_set(self, corpus):
        with pytest.raises(DataError):
            train_level1([], tiny_config(), corpus.lexicons)


class TestDistill:
    def test_three_clause_sentence_gives_three_features(self, corpus, trained):
        s = RawSample(id="x", text="thing00 , but nice03 thing01 , awful02 .",
                      annotator_scores=[1.0])
        (d,) = distill_clauses([s], trained["level1"], corpus.lexicons,
                               trained["cfg"])
        assert len(d.clauses) == 3
        for cl in d.clauses:
            assert cl.y.shape == (3,)
            assert abs(cl.y.sum() - 1.0) < 1e-9
            assert cl.gamma.shape == (2 * trained["cfg"].hidden1,)

    def test_conjunction_ids_recorded(self, corpus, trained):
        s = RawSample(id="x", text="thing00 nice01 , but thing02 .",
                      annotator_scores=[1.0])
        (d,) = distill_clauses([s], trained["level1"], corpus.lexicons,
                               trained["cfg"])
        assert d.clauses[0].conj_start == -1
        assert d.clauses[1].conj_start == corpus.lexicons.conjunctions.index("but")

    def test_deterministic(self, corpus, trained):
        a = distill_clauses(corpus.t2_train[:4], trained["level1"],
                            corpus.lexicons, trained["cfg"])
        b = distill_clauses(corpus.t2_train[:4], trained["level1"],
                            corpus.lexicons, trained["cfg"])
        for s1, s2 in zip(a, b):
            for c1, c2 in zip(s1.clauses, s2.clauses):
                npt.assert_array_equal(c1.y, c2.y)
                npt.assert_array_equal(c1.gamma, c2.gamma)

    def test_width_constant_across_corpus(self, trained):
        widths = {cl.gamma.size for s in trained["distilled"] for cl in s.clauses}
        assert len(widths) == 1

    def test_empty_sentence_names_sample(self, corpus, trained):
        s = RawSample(id="bad-one", text="   ", annotator_scores=[1.0])
        with pytest.raises(DataError, match="bad-one"):
            distill_clauses([s], trained["level1"], corpus.lexicons, trained["cfg"])


class TestTrainLevel2:
    def test_level1_frozen_during_level2(self, corpus, trained):
        before = [p.data.copy() for p in trained["level1"].parameters()]
        cfg2 = dataclasses.replace(trained["cfg"], epochs=2)
        train_level2(trained["distilled"], cfg2, corpus.lexicons)
        for old, p in zip(before, trained["level1"].parameters()):
            npt.assert_array_equal(old, p.data)

    def test_zero_lr(self, corpus, trained):
        cfg = dataclasses.replace(trained["cfg"], lr=0.0, epochs=2, seed=4)
        model, _ = train_level2(trained["distilled"], cfg, corpus.lexicons)
        fresh = Level2Model(model.gamma_width, len(corpus.lexicons.conjunctions),
                            cfg, np.random.default_rng(cfg.seed + 1))
        for a, b in zip(model.parameters(), fresh.parameters()):
            npt.assert_array_equal(a.data, b.data)

    def test_seed_reproducibility(self, corpus, trained):
        cfg = dataclasses.replace(trained["cfg"], epochs=2)
        _, h1 = train_level2(trained["distilled"][:8], cfg, corpus.lexicons)
        _, h2 = train_level2(trained["distilled"][:8], cfg, corpus.lexicons)
        assert h1 == h2

    def test_inconsistent_widths_rejected(self, corpus):
        from lexsent.network import DistilledSentence
        sents = [DistilledSentence("a", "neutral",
                                   [DistilledClause(np.ones(3) / 3, np.zeros(4), -1, -1)]),
                 DistilledSentence("b", "neutral",
                                   [DistilledClause(np.ones(3) / 3, np.zeros(6), -1, -1)])]
        with pytest.raises(DataError):
            train_level2(sents, tiny_config(), corpus.lexicons)


class TestLevel2Forward:
    def test_single_clause_sentence(self, trained):
        d = trained["distilled"][0]
        out = trained["level2"].forward(d.clauses[:1])
        assert abs(out.probs.data.sum() - 1.0) < 1e-9
        npt.assert_array_equal(out.beta.data, [1.0])

    def test_probabilities_sum_to_one(self, trained):
        for s in trained["distilled"][:10]:
            out = trained["level2"].forward(s.clauses)
            assert abs(out.probs.data.sum() - 1.0) < 1e-9

    def test_clause_order_matters(self, trained):
        two = next(s for s in trained["distilled"] if len(s.clauses) == 2)
        fwd = trained["level2"].forward(two.clauses).probs.data
        rev = trained["level2"].forward(two.clauses[::-1]).probs.data
        assert not np.allclose(fwd, rev)

    def test_collapse_score_width(self, corpus, trained):
        cfg = dataclasses.replace(trained["cfg"], collapse_score=True, epochs=1)
        model, _ = train_level2(trained["distilled"][:5], cfg, corpus.lexicons)
        assert model.y_width == 1
        out = model.forward(trained["distilled"][0].clauses)
        assert abs(out.probs.data.sum() - 1.0) < 1e-9

    def test_conjunction_widths(self, corpus, trained):
        model = trained["level2"]
        k = len(corpus.lexicons.conjunctions)
        assert model.input_dim == model.gamma_width + 3 + 2 * k

    def test_no_conjunction_variant(self, corpus, trained):
        cfg = dataclasses.replace(trained["cfg"], use_conjunction=False, epochs=1)
        model, _ = train_level2(trained["distilled"][:5], cfg, corpus.lexicons)
        assert model.input_dim == model.gamma_width + 3
        out = model.forward(trained["distilled"][0].clauses)
        assert abs(out.probs.data.sum() - 1.0) < 1e-9


class TestPredict:
    def test_prediction_shape(self, corpus, trained):
        out = predict("thing00 nice01 , but awful03 thing02 .",
                      trained["level1"], trained["level2"], corpus.lexicons,
                      trained["cfg"])
        assert out["label"] in LABELS
        assert len(out["clauses"]) == 2
        assert len(out["attention"]) == 2
        assert abs(sum(out["attention"]) - 1.0) < 1e-9
        assert all(len(y) == 3 for y in out["clause_scores"])

    def test_deterministic(self, corpus, trained):
        args = ("thing00 , but nice01 .", trained["level1"], trained["level2"],
                corpus.lexicons, trained["cfg"])
        assert predict(*args) == predict(*args)

    def test_empty_text_rejected(self, corpus, trained):
        with pytest.raises(DataError):
            predict("   ", trained["level1"], trained["level2"],
                    corpus.lexicons, trained["cfg"])


class TestEvaluate:
    def test_confusion_and_accuracy(self):
        m = confusion_matrix([(0, 0), (1, 1), (2, 2), (0, 2)])
        assert m.sum() == 4 and np.trace(m) == 3
        assert m[0, 2] == 1

    def test_perfect_predictor_scores_one(self):
        m = confusion_matrix([(i, i) for i in (0, 1, 2)] * 5)
        assert np.trace(m) / m.sum() == 1.0

    def test_constant_predictor_on_balanced_set(self):
        m = confusion_matrix([(i, 0) for i in (0, 1, 2)] * 5)
        assert np.trace(m) / m.sum() == pytest.approx(1 / 3)

    def test_two_level_eval_runs(self, corpus, trained):
        acc, conf = evaluate_two_level(corpus.t2_test, trained["level1"],
                                       trained["level2"], corpus.lexicons,
                                       trained["cfg"])
        assert 0.0 <= acc <= 1.0
        assert conf.sum() == len(corpus.t2_test)

    def test_level1_eval_runs(self, corpus, trained):
        acc, conf = evaluate_level1(corpus.t1, trained["level1"],
                                    corpus.lexicons, trained["cfg"])
        assert acc > 0.5  # trained to (near) convergence on its own data
        assert conf.sum() == len(corpus.t1)


class TestTrainConfig:
    def test_validation(self):
        with pytest.raises(ConfigError):
            TrainConfig(embedding_dim=0)
        with pytest.raises(ConfigError):
            TrainConfig(lr=-1.0)
        with pytest.raises(ConfigError):
            TrainConfig(mode="sentence")
        with pytest.raises(ConfigError):
            TrainConfig(pooling="max")

    def test_round_trip(self):
        cfg = TrainConfig(embedding_dim=10, seed=3)
        assert TrainConfig.from_dict(cfg.to_dict()) == cfg

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            TrainConfig.from_dict({"learning_rate": 0.1})
