"""The two-level classifier and its staged training procedure.

Level 1 classifies clauses: token embeddings concatenated with rho-hot
key-word and POS vectors feed a bi-LSTM whose attention scores also read
the lexicon vectors.  Level 2 classifies sentences: each clause
contributes its level-1 dense feature and score plus the conjunction
embeddings of its first and last words, and a clause-level bi-LSTM with
conjunction-aware attention produces the final distribution.

Training is strictly staged: level 1 is trained and frozen, its outputs
are distilled over the sentence corpus, then level 2 is trained on the
distilled features alone.

A model is owned by one training loop at a time; inference and
distillation never mutate parameters and may fan out over sentences.
Gradient accumulation runs in fixed sample order, so a seed pins every
reported number bit-for-bit.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Sequence

import numpy as np

from .corpus import LABELS, RawSample, split_clauses, tokenize
from .encoding import RhoHotFamily
from .errors import ConfigError, DataError, DivergenceError, NumericError, ShapeError
from .lexicon import (Lexicons, TokenAnnotation, attach_lexicon, keyword_embed,
                      make_keyword_family, make_pos_family, pos_embed)
from .optim import make_optimizer
from .recurrent import (CellConfig, LstmParams, attention_conj, attention_lex,
                        attention_lex_pos, attention_plain, bilstm, sum_pool)
from .tensor import (Parameter, Tensor, add_n, concat, cross_entropy, dot,
                     element, matmul, mean_n, row, softmax, stack_scalars)

UNK = "<unk>"


@dataclass
class TrainConfig:
    """Knobs for both training stages; the seed fixes every random draw."""
    embedding_dim: int = 200
    n: int = 11
    hidden1: int = 128
    hidden2: int = 64
    optimizer: str = "adam"
    lr: float = 1e-3
    epochs: int = 30
    batch_size: int = 32
    seed: int = 0
    mode: str = "char"
    pooling: str = "attention"
    use_keyword: bool = True
    use_pos: bool = True
    use_conjunction: bool = True
    conj_in_input: bool = True
    collapse_score: bool = False
    literal_cell: bool = False
    tanh_candidate: bool = False
    rho_init: float = 0.5
    early_stop_train_acc: float | None = None

    def __post_init__(self):
        for name in ("embedding_dim", "n", "hidden1", "hidden2", "epochs",
                     "batch_size"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.lr < 0:
            raise ConfigError("lr must be >= 0 (0 disables updates)")
        if self.mode not in ("char", "word"):
            raise ConfigError(f"mode must be char or word, got {self.mode!r}")
        if self.pooling not in ("attention", "sum"):
            raise ConfigError(f"pooling must be attention or sum, got {self.pooling!r}")

    def cell_config(self) -> CellConfig:
        return CellConfig(self.literal_cell, self.tanh_candidate)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class Level1Output:
    y: Tensor
    gamma: Tensor
    logits: Tensor
    alpha: Tensor | None


@dataclass
class DistilledClause:
    """Frozen level-1 outputs plus the conjunction identity of the
    clause's first and last containing words (-1 when absent)."""
    y: np.ndarray
    gamma: np.ndarray
    conj_start: int
    conj_end: int
    text: str = ""


@dataclass
class DistilledSentence:
    id: str
    label: str
    clauses: list[DistilledClause]


class Level1Model:
    """Clause classifier: embeddings + bi-LSTM + lexicon-aware attention."""

    def __init__(self, vocab: dict[str, int], config: TrainConfig,
                 rng: np.random.Generator):
        if UNK not in vocab:
            raise ConfigError(f"vocabulary must contain {UNK!r}")
        self.vocab = dict(vocab)
        self.config = config
        e, h = config.embedding_dim, config.hidden1
        self.embedding = Parameter("level1.embedding",
                                   rng.normal(0.0, 0.1, (len(vocab), e)))
        self.kw_family = (make_keyword_family(config.n, config.rho_init)
                          if config.use_keyword else None)
        self.pos_family = (make_pos_family(config.n, config.rho_init)
                           if config.use_pos else None)
        extras = sum(f.width for f in (self.kw_family, self.pos_family) if f)
        self.input_dim = e + extras
        self.fwd = LstmParams("level1.fwd", self.input_dim, h, rng)
        self.bwd = LstmParams("level1.bwd", self.input_dim, h, rng)
        self.attn_w = None
        self.attn_b = None
        if config.pooling == "attention":
            self.attn_w = Parameter("level1.attn.w",
                                    rng.uniform(-0.08, 0.08, 2 * h + extras))
            if extras:
                self.attn_b = Parameter("level1.attn.b", 0.0)
        self.out_w = Parameter("level1.out.W", np.zeros((len(LABELS), 2 * h)))
        self.out_b = Parameter("level1.out.b", np.zeros(len(LABELS)))

    def parameters(self) -> list[Parameter]:
        params = [self.embedding]
        for fam in (self.kw_family, self.pos_family):
            if fam:
                params.append(fam.rho)
        params += self.fwd.parameters() + self.bwd.parameters()
        for p in (self.attn_w, self.attn_b):
            if p is not None:
                params.append(p)
        params += [self.out_w, self.out_b]
        return params

    def token_index(self, token: str) -> int:
        return self.vocab.get(token, self.vocab[UNK])

    def forward(self, annotations: Sequence[TokenAnnotation]) -> Level1Output:
        if not annotations:
            raise ShapeError("level-1 forward on an empty clause")
        cfg = self.config
        xs, lexs, etas = [], [], []
        for ann in annotations:
            parts = [row(self.embedding, self.token_index(ann.surface))]
            l = keyword_embed(ann, self.kw_family) if self.kw_family else None
            eta = pos_embed(ann, self.pos_family) if self.pos_family else None
            parts += [v for v in (l, eta) if v is not None]
            xs.append(concat(parts) if len(parts) > 1 else parts[0])
            lexs.append(l)
            etas.append(eta)
        out = bilstm(xs, self.fwd, self.bwd, cfg.cell_config())
        hs = out.concat
        alpha = None
        if cfg.pooling == "sum":
            gamma = sum_pool(hs)
        elif self.kw_family and self.pos_family:
            gamma, alpha = attention_lex_pos(hs, lexs, etas, self.attn_w, self.attn_b)
        elif self.kw_family:
            gamma, alpha = attention_lex(hs, lexs, self.attn_w, self.attn_b)
        elif self.pos_family:
            gamma, alpha = attention_lex(hs, etas, self.attn_w, self.attn_b)
        else:
            gamma, alpha = attention_plain(hs, self.attn_w)
        logits = matmul(self.out_w, gamma) + self.out_b
        return Level1Output(softmax(logits), gamma, logits, alpha)


@dataclass
class Level2Output:
    probs: Tensor
    logits: Tensor
    beta: Tensor


class Level2Model:
    """Sentence classifier over frozen per-clause features."""

    def __init__(self, gamma_width: int, conj_count: int, config: TrainConfig,
                 rng: np.random.Generator):
        self.config = config
        self.gamma_width = gamma_width
        h = config.hidden2
        self.y_width = 1 if config.collapse_score else len(LABELS)
        self.conj_family = None
        conj_width = 0
        if config.use_conjunction:
            if conj_count < 1:
                raise ConfigError("conjunction lexicon is empty")
            self.conj_family = RhoHotFamily("conjunction",
                                            [str(i) for i in range(conj_count)],
                                            n=1, rho_init=config.rho_init)
            conj_width = self.conj_family.width
        self.conj_width = conj_width
        self.input_dim = gamma_width + self.y_width
        if config.conj_in_input and conj_width:
            self.input_dim += 2 * conj_width
        self.fwd = LstmParams("level2.fwd", self.input_dim, h, rng)
        self.bwd = LstmParams("level2.bwd", self.input_dim, h, rng)
        attn_width = self.y_width + 2 * h + 2 * conj_width
        self.attn_w = Parameter("level2.attn.w", rng.uniform(-0.08, 0.08, attn_width))
        self.attn_b = Parameter("level2.attn.b", 0.0)
        self.out_w = Parameter("level2.out.W", np.zeros((len(LABELS), 2 * h + self.y_width)))
        self.out_b = Parameter("level2.out.b", np.zeros(len(LABELS)))

    def parameters(self) -> list[Parameter]:
        params = []
        if self.conj_family:
            params.append(self.conj_family.rho)
        params += self.fwd.parameters() + self.bwd.parameters()
        params += [self.attn_w, self.attn_b, self.out_w, self.out_b]
        return params

    def _score_feature(self, y: np.ndarray) -> Tensor:
        if self.config.collapse_score:
            # expectation under the class scores {1, 0.5, 0}
            return Tensor([1.0 * y[0] + 0.5 * y[1] + 0.0 * y[2]])
        return Tensor(y)

    def _conj(self, index: int) -> Tensor:
        if index < 0:
            return self.conj_family.encode_absent()
        return self.conj_family.encode(index)

    def forward(self, clauses: Sequence[DistilledClause]) -> Level2Output:
        if not clauses:
            raise ShapeError("level-2 forward on an empty sentence")
        for cl in clauses:
            if cl.gamma.size != self.gamma_width:
                raise ShapeError(
                    f"clause feature width {cl.gamma.size} != {self.gamma_width}")
        ys = [self._score_feature(cl.y) for cl in clauses]
        if self.conj_family:
            ws = [self._conj(cl.conj_start) for cl in clauses]
            we = [self._conj(cl.conj_end) for cl in clauses]
        xs = []
        for t, cl in enumerate(clauses):
            parts = [Tensor(cl.gamma), ys[t]]
            if self.conj_family and self.config.conj_in_input:
                parts += [ws[t], we[t]]
            xs.append(concat(parts))
        out = bilstm(xs, self.fwd, self.bwd, self.config.cell_config())
        hs = out.concat
        if self.conj_family:
            gamma2, beta = attention_conj(ys, hs, ws, we, self.attn_w, self.attn_b)
        else:
            scores = [dot(self.attn_w, concat([y, h])) + self.attn_b
                      for y, h in zip(ys, hs)]
            beta = softmax(stack_scalars(scores))
            gamma2 = add_n([element(beta, t) * concat([h, y])
                            for t, (h, y) in enumerate(zip(hs, ys))])
        logits = matmul(self.out_w, gamma2) + self.out_b
        return Level2Output(softmax(logits), logits, beta)


# -- data preparation ------------------------------------------------------

def annotate_sample(sample: RawSample, lexicons: Lexicons,
                    config: TrainConfig) -> list[TokenAnnotation]:
    """Tokenize a record and attach word-level lexicon annotations."""
    tokens = tokenize(sample.text, config.mode,
                      segmentation=sample.tokens if config.mode == "word" else None)
    segmentation = sample.tokens if config.mode == "char" else None
    return attach_lexicon(tokens, segmentation, lexicons, config.mode,
                          pos_tags=sample.pos)


def _clause_token_counts(clauses: list[str], tokens: list[str], mode: str) -> list[int]:
    """How many tokens of the full-text tokenization each clause owns."""
    if mode == "char":
        return [sum(1 for ch in cl if not ch.isspace()) for cl in clauses]
    counts = []
    ti = 0
    for cl in clauses:
        need = len("".join(cl.split()))
        got = 0
        start = ti
        while ti < len(tokens) and got < need:
            got += len("".join(tokens[ti].split()))
            ti += 1
        counts.append(ti - start)
    if ti < len(tokens):
        counts[-1] += len(tokens) - ti
    return counts


def split_annotations_by_clause(sample: RawSample, lexicons: Lexicons,
                                config: TrainConfig
                                ) -> tuple[list[str], list[list[TokenAnnotation]]]:
    clauses = split_clauses(sample.text)
    annotations = annotate_sample(sample, lexicons, config)
    counts = _clause_token_counts(clauses, [a.surface for a in annotations],
                                  config.mode)
    out = []
    pos = 0
    for cl, cnt in zip(clauses, counts):
        if cnt == 0:
            raise DataError(f"clause {cl!r} has no tokens")
        out.append(annotations[pos:pos + cnt])
        pos += cnt
    return clauses, out


def build_vocab(samples: Sequence[RawSample], lexicons: Lexicons,
                config: TrainConfig) -> dict[str, int]:
    seen = set()
    for s in samples:
        seen.update(a.surface for a in annotate_sample(s, lexicons, config))
    vocab = {UNK: 0}
    for tok in sorted(seen):
        vocab[tok] = len(vocab)
    return vocab


# -- training ----------------------------------------------------------------

def _label_index(label: str) -> int:
    return LABELS.index(label)


def _train(forward_loss, n_samples: int, params: list[Parameter],
           config: TrainConfig, rng: np.random.Generator,
           accuracy_fn) -> list[dict]:
    """Shared minibatch loop.

    ``forward_loss(indices)`` returns (loss Tensor, n correct) for a
    batch; ``accuracy_fn()`` recomputes exact accuracy on the current
    parameters and is only consulted to confirm an early stop.
    """
    optimizer = make_optimizer(config.optimizer, config.lr) if config.lr > 0 else None
    history = []
    onfly_acc = 0.0
    for epoch in range(1, config.epochs + 1):
        target = config.early_stop_train_acc
        if target is not None and onfly_acc >= target and accuracy_fn() >= target:
            break
        order = rng.permutation(n_samples)
        total_loss = 0.0
        total_correct = 0
        try:
            # overflow surfaces as NumericError from the tape; the numpy
            # warnings on the way there are just noise
            with np.errstate(over="ignore", invalid="ignore"):
                for start in range(0, n_samples, config.batch_size):
                    batch = order[start:start + config.batch_size]
                    loss, correct = forward_loss(batch)
                    total_loss += loss.item() * len(batch)
                    total_correct += correct
                    if optimizer is not None:
                        for p in params:
                            p.zero_grad()
                        loss.backward()
                        optimizer.step(params)
        except NumericError as e:
            raise DivergenceError(f"non-finite loss at epoch {epoch}: {e}") from e
        onfly_acc = total_correct / n_samples
        history.append({"epoch": epoch, "loss": total_loss / n_samples,
                        "accuracy": onfly_acc})
    return history


def train_level1(samples: Sequence[RawSample], config: TrainConfig,
                 lexicons: Lexicons) -> tuple[Level1Model, list[dict]]:
    """Algorithm stage one: fit the clause classifier on stage-1 data."""
    samples = list(samples)
    if not samples:
        raise DataError("no training samples for level 1")
    for s in samples:
        if s.resolved_label() not in LABELS:
            raise DataError(f"sample {s.id}: unknown label")
    vocab = build_vocab(samples, lexicons, config)
    rng = np.random.default_rng(config.seed)
    model = Level1Model(vocab, config, rng)
    annotated = [(annotate_sample(s, lexicons, config),
                  _label_index(s.resolved_label())) for s in samples]
    params = model.parameters()

    def forward_loss(batch):
        losses = []
        correct = 0
        for i in batch:
            anns, label = annotated[i]
            out = model.forward(anns)
            losses.append(cross_entropy(out.logits, label))
            correct += int(np.argmax(out.y.data) == label)
        return mean_n(losses), correct

    def accuracy_fn():
        return sum(int(np.argmax(model.forward(a).y.data) == lab)
                   for a, lab in annotated) / len(annotated)

    history = _train(forward_loss, len(annotated), params, config, rng, accuracy_fn)
    return model, history


def distill_clauses(samples: Sequence[RawSample], level1: Level1Model,
                    lexicons: Lexicons, config: TrainConfig
                    ) -> list[DistilledSentence]:
    """Run the frozen level-1 model over every clause of the stage-2
    samples and record (score, dense feature, conjunction ids)."""
    out = []
    for s in samples:
        try:
            clauses, per_clause = split_annotations_by_clause(s, lexicons, config)
        except DataError as e:
            raise DataError(f"sample {s.id}: {e}") from e
        distilled = []
        for text, anns in zip(clauses, per_clause):
            o = level1.forward(anns)
            first, last = anns[0].word, anns[-1].word
            cs = lexicons.conjunctions.index(first)
            ce = lexicons.conjunctions.index(last)
            distilled.append(DistilledClause(
                y=np.array(o.y.data), gamma=np.array(o.gamma.data),
                conj_start=-1 if cs is None else cs,
                conj_end=-1 if ce is None else ce,
                text=text))
        out.append(DistilledSentence(s.id, s.resolved_label(), distilled))
    return out


def train_level2(distilled: Sequence[DistilledSentence], config: TrainConfig,
                 lexicons: Lexicons) -> tuple[Level2Model, list[dict]]:
    """Algorithm stage two: fit the sentence classifier on distilled
    clause features; level-1 parameters are not touched."""
    distilled = list(distilled)
    if not distilled:
        raise DataError("no distilled sentences for level 2")
    widths = {cl.gamma.size for s in distilled for cl in s.clauses}
    if len(widths) != 1:
        raise DataError(f"inconsistent clause feature widths: {sorted(widths)}")
    rng = np.random.default_rng(config.seed + 1)
    model = Level2Model(widths.pop(), len(lexicons.conjunctions), config, rng)
    labeled = [(s.clauses, _label_index(s.label)) for s in distilled]
    params = model.parameters()

    def forward_loss(batch):
        losses = []
        correct = 0
        for i in batch:
            clauses, label = labeled[i]
            out = model.forward(clauses)
            losses.append(cross_entropy(out.logits, label))
            correct += int(np.argmax(out.probs.data) == label)
        return mean_n(losses), correct

    def accuracy_fn():
        return sum(int(np.argmax(model.forward(c).probs.data) == lab)
                   for c, lab in labeled) / len(labeled)

    history = _train(forward_loss, len(labeled), params, config, rng, accuracy_fn)
    return model, history


# -- inference ----------------------------------------------------------------

def predict(text: str, level1: Level1Model, level2: Level2Model,
            lexicons: Lexicons, config: TrainConfig) -> dict:
    """Classify a text: split into clauses, run both levels, and return
    the label with per-clause scores and attention weights."""
    if not text or not text.strip():
        raise DataError("cannot predict on empty text")
    sample = RawSample(id="query", text=text, label="neutral")
    distilled = distill_clauses([sample], level1, lexicons, config)[0]
    out = level2.forward(distilled.clauses)
    probs = out.probs.data
    return {
        "label": LABELS[int(np.argmax(probs))],
        "probabilities": {lab: float(p) for lab, p in zip(LABELS, probs)},
        "clauses": [cl.text for cl in distilled.clauses],
        "clause_scores": [cl.y.tolist() for cl in distilled.clauses],
        "attention": out.beta.data.tolist(),
    }


def confusion_matrix(pairs: list[tuple[int, int]]) -> np.ndarray:
    m = np.zeros((len(LABELS), len(LABELS)), dtype=np.int64)
    for true, pred in pairs:
        m[true, pred] += 1
    return m


def evaluate_level1(samples: Sequence[RawSample], model: Level1Model,
                    lexicons: Lexicons, config: TrainConfig
                    ) -> tuple[float, np.ndarray]:
    pairs = []
    for s in samples:
        anns = annotate_sample(s, lexicons, config)
        pred = int(np.argmax(model.forward(anns).y.data))
        pairs.append((_label_index(s.resolved_label()), pred))
    m = confusion_matrix(pairs)
    return float(np.trace(m) / max(1, m.sum())), m


def evaluate_two_level(samples: Sequence[RawSample], level1: Level1Model,
                       level2: Level2Model, lexicons: Lexicons,
                       config: TrainConfig) -> tuple[float, np.ndarray]:
    pairs = []
    for s in samples:
        distilled = distill_clauses([s], level1, lexicons, config)[0]
        pred = int(np.argmax(level2.forward(distilled.clauses).probs.data))
        pairs.append((_label_index(s.resolved_label()), pred))
    m = confusion_matrix(pairs)
    return float(np.trace(m) / max(1, m.sum())), m
