"""The finite-difference suite: one entry per differentiable operation.

Each builder returns (loss_fn, params) at a requested size; the runner
compares tape gradients against central differences over a grid of
seeds and sizes and reports the worst relative error per operation.
Gradients are checked into inputs as well as weights, and through the
rho scales of all three lexicon families.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .encoding import RhoHotFamily, rho_hot
from .gradcheck import finite_diff_grad, relative_error
from .lexicon import TokenAnnotation
from .network import (DistilledClause, Level1Model, Level2Model, TrainConfig,
                      UNK)
from .recurrent import (CellConfig, LstmParams, attention_conj, attention_lex,
                        attention_lex_pos, attention_plain, bilstm, lstm_cell,
                        sum_pool)
from .tensor import (Tensor, affine, concat, cross_entropy, dot, mean_n, row,
                     sigmoid, softmax, tanh)

TOLERANCE = 1e-4


def _leaf(rng, shape):
    return Tensor(rng.normal(size=shape) * 0.5, requires_grad=True)


def _build_sigmoid(rng, size):
    n = (2, 5, 9)[size]
    x = _leaf(rng, n)
    r = Tensor(rng.normal(size=n))
    return lambda: dot(sigmoid(x), r), [x]


def _build_tanh(rng, size):
    n = (2, 5, 9)[size]
    x = _leaf(rng, n)
    r = Tensor(rng.normal(size=n))
    return lambda: dot(tanh(x), r), [x]


def _build_softmax(rng, size):
    n = (2, 4, 7)[size]
    x = _leaf(rng, n)
    r = Tensor(rng.normal(size=n))
    return lambda: dot(softmax(x), r), [x]


def _build_affine(rng, size):
    m, n = ((2, 3), (4, 2), (3, 5))[size]
    w, x, b = _leaf(rng, (m, n)), _leaf(rng, n), _leaf(rng, m)
    r = Tensor(rng.normal(size=m))
    return lambda: dot(affine(w, x, b), r), [w, x, b]


def _build_rho_hot(rng, size):
    count, n = ((2, 1), (3, 2), (4, 3))[size]
    fam = RhoHotFamily("f", [str(i) for i in range(count)], n=n,
                       rho_init=float(rng.normal()))
    k = int(rng.integers(0, count))
    r = Tensor(rng.normal(size=count * n))
    return lambda: dot(rho_hot(fam, k), r), [fam.rho]


def _build_embedding_row(rng, size):
    v, e = ((3, 2), (4, 3), (5, 2))[size]
    table = _leaf(rng, (v, e))
    i = int(rng.integers(0, v))
    r = Tensor(rng.normal(size=e))
    return lambda: dot(row(table, i), r), [table]


def _cell_builder(cfg):
    def build(rng, size):
        input_dim, hidden = ((2, 3), (3, 2), (4, 4))[size]
        p = LstmParams("cell", input_dim, hidden, rng)
        x = _leaf(rng, input_dim)
        h_prev, c_prev = _leaf(rng, hidden), _leaf(rng, hidden)
        d_prev = _leaf(rng, hidden)
        r = Tensor(rng.normal(size=hidden))

        def loss():
            h, c = lstm_cell(x, h_prev, c_prev, p, cfg, d_prev=d_prev)
            return dot(h, r) + dot(c, r)

        return loss, p.parameters() + [x, h_prev, c_prev, d_prev]
    return build


def _build_bilstm(rng, size):
    input_dim, hidden, t = ((2, 2, 2), (3, 2, 3), (2, 3, 4))[size]
    fwd = LstmParams("fwd", input_dim, hidden, rng)
    bwd = LstmParams("bwd", input_dim, hidden, rng)
    xs = [_leaf(rng, input_dim) for _ in range(t)]
    r = Tensor(rng.normal(size=2 * hidden))
    return (lambda: dot(sum_pool(bilstm(xs, fwd, bwd).concat), r),
            fwd.parameters() + bwd.parameters() + xs)


def _build_sum_pool(rng, size):
    n, t = ((2, 2), (3, 3), (4, 5))[size]
    hs = [_leaf(rng, n) for _ in range(t)]
    r = Tensor(rng.normal(size=n))
    return lambda: dot(sum_pool(hs), r), hs


def _build_attention_plain(rng, size):
    n, t = ((2, 2), (3, 3), (4, 4))[size]
    hs = [_leaf(rng, n) for _ in range(t)]
    w = _leaf(rng, n)
    r = Tensor(rng.normal(size=n))
    return lambda: dot(attention_plain(hs, w)[0], r), hs + [w]


def _lex_family(rng, count, n):
    return RhoHotFamily("lex", [str(i) for i in range(count)], n=n,
                        rho_init=float(rng.uniform(0.2, 0.9)))


def _build_attention_lex(rng, size):
    n, t, k, dup = ((2, 2, 2, 1), (3, 3, 3, 2), (2, 4, 2, 2))[size]
    hs = [_leaf(rng, n) for _ in range(t)]
    fam = _lex_family(rng, k, dup)
    ks = [int(rng.integers(0, k)) for _ in range(t)]
    w = _leaf(rng, n + k * dup)
    b = _leaf(rng, ())
    r = Tensor(rng.normal(size=n))

    def loss():
        ls = [fam.encode(i) for i in ks]
        return dot(attention_lex(hs, ls, w, b)[0], r)

    return loss, hs + [w, b, fam.rho]


def _build_attention_lex_pos(rng, size):
    n, t = ((2, 2), (3, 3), (2, 4))[size]
    hs = [_leaf(rng, n) for _ in range(t)]
    kw = _lex_family(rng, 3, 1)
    pos = _lex_family(rng, 2, 2)
    kks = [int(rng.integers(0, 3)) for _ in range(t)]
    pks = [int(rng.integers(0, 2)) for _ in range(t)]
    w = _leaf(rng, n + kw.width + pos.width)
    b = _leaf(rng, ())
    r = Tensor(rng.normal(size=n))

    def loss():
        ls = [kw.encode(i) for i in kks]
        etas = [pos.encode(i) for i in pks]
        return dot(attention_lex_pos(hs, ls, etas, w, b)[0], r)

    return loss, hs + [w, b, kw.rho, pos.rho]


def _build_attention_conj(rng, size):
    yw, hw, t = ((3, 2, 2), (3, 3, 3), (1, 2, 4))[size]
    fam = _lex_family(rng, 3, 1)
    ys = [_leaf(rng, yw) for _ in range(t)]
    hs = [_leaf(rng, hw) for _ in range(t)]
    idx = [int(rng.integers(-1, 3)) for _ in range(t)]
    w = _leaf(rng, yw + hw + 2 * fam.width)
    b = _leaf(rng, ())
    r = Tensor(rng.normal(size=hw + yw))

    def conj(i):
        return fam.encode_absent() if i < 0 else fam.encode(i)

    def loss():
        ws = [conj(i) for i in idx]
        we = [conj((i + 1) % 3) for i in idx]
        return dot(attention_conj(ys, hs, ws, we, w, b)[0], r)

    return loss, ys + hs + [w, b, fam.rho]


_KW_CATS = ("Pos", "Neg", "Pri", "Oth")
_POS_TAGS = ("noun", "adjective", "others")


def _build_level1_loss(rng, size):
    e, h, n, t = ((2, 2, 1, 2), (2, 2, 1, 3), (3, 2, 2, 1))[size]
    cfg = TrainConfig(embedding_dim=e, n=n, hidden1=h, hidden2=2, seed=0,
                      mode="word", epochs=1, batch_size=1)
    vocab = {UNK: 0, "a": 1, "b": 2, "c": 3}
    model = Level1Model(vocab, cfg, rng)
    surfaces = [str(rng.choice(["a", "b", "c"])) for _ in range(t)]
    clauses = []
    for lab in (0, 2):
        anns = [TokenAnnotation(s, s, str(rng.choice(_KW_CATS)),
                                str(rng.choice(_POS_TAGS))) for s in surfaces]
        clauses.append((anns, lab))
    # zero-initialized output layers have zero gradient into everything
    # below them at the starting point, so perturb them
    model.out_w.data += rng.normal(size=model.out_w.shape) * 0.3
    model.out_b.data += rng.normal(size=model.out_b.shape) * 0.1

    def loss():
        return mean_n([cross_entropy(model.forward(anns).logits, lab)
                       for anns, lab in clauses])

    return loss, model.parameters()


def _build_level2_loss(rng, size):
    gw, h2, t = ((3, 2, 2), (2, 2, 3), (4, 2, 1))[size]
    cfg = TrainConfig(embedding_dim=2, n=1, hidden1=2, hidden2=h2, seed=0,
                      mode="word", epochs=1, batch_size=1,
                      collapse_score=(size == 2))
    model = Level2Model(gamma_width=gw, conj_count=3, config=cfg, rng=rng)
    sentences = []
    for lab in (0, 1):
        clauses = []
        for _ in range(t):
            y = rng.dirichlet(np.ones(3))
            clauses.append(DistilledClause(
                y=y, gamma=rng.normal(size=gw) * 0.5,
                conj_start=int(rng.integers(-1, 3)),
                conj_end=int(rng.integers(-1, 3))))
        sentences.append((clauses, lab))
    model.out_w.data += rng.normal(size=model.out_w.shape) * 0.3
    model.out_b.data += rng.normal(size=model.out_b.shape) * 0.1

    def loss():
        return mean_n([cross_entropy(model.forward(cls).logits, lab)
                       for cls, lab in sentences])

    return loss, model.parameters()


BUILDERS = {
    "sigmoid": _build_sigmoid,
    "tanh": _build_tanh,
    "softmax": _build_softmax,
    "affine": _build_affine,
    "rho_hot": _build_rho_hot,
    "embedding_row": _build_embedding_row,
    "lstm_cell": _cell_builder(CellConfig()),
    "lstm_cell_literal": _cell_builder(CellConfig(literal_cell=True)),
    "lstm_cell_tanh_candidate": _cell_builder(CellConfig(tanh_candidate=True)),
    "bilstm": _build_bilstm,
    "sum_pool": _build_sum_pool,
    "attention_plain": _build_attention_plain,
    "attention_lex": _build_attention_lex,
    "attention_lex_pos": _build_attention_lex_pos,
    "attention_conj": _build_attention_conj,
    "level1_loss": _build_level1_loss,
    "level2_loss": _build_level2_loss,
}


@dataclass
class OpReport:
    name: str
    max_rel_err: float
    cases: int
    tolerance: float = TOLERANCE
    worst_case: tuple = field(default=())

    @property
    def passed(self) -> bool:
        return self.max_rel_err < self.tolerance


def check_op(name: str, seeds: int = 5, sizes: int = 3, eps: float = 1e-5,
             corrupt: bool = False) -> OpReport:
    build = BUILDERS[name]
    worst = 0.0
    worst_case = ()
    cases = 0
    for seed in range(seeds):
        for size in range(sizes):
            rng = np.random.default_rng(1000 * seed + size)
            loss_fn, params = build(rng, size)
            for p in params:
                p.zero_grad()
            value = loss_fn()
            value.backward()
            analytic = [np.array(p.grad) if p.grad is not None
                        else np.zeros_like(p.data) for p in params]
            if corrupt:
                analytic[0] = analytic[0] + 0.5
            numeric = finite_diff_grad(lambda: loss_fn().item(), params, eps)
            err = max(relative_error(a, g) for a, g in zip(analytic, numeric))
            if err > worst:
                worst, worst_case = err, (seed, size)
            cases += 1
    return OpReport(name, worst, cases, worst_case=worst_case)


def run_suite(seeds: int = 5, sizes: int = 3, eps: float = 1e-5,
              ops: list[str] | None = None,
              corrupt: str | None = None) -> list[OpReport]:
    names = ops or list(BUILDERS)
    return [check_op(n, seeds, sizes, eps, corrupt=(n == corrupt)) for n in names]
