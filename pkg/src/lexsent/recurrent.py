"""LSTM cell, bi-LSTM, and the pooling/attention variants.

The cell follows the gated form in which the input, forget, and
candidate gates read the concatenation [c_prev, h_prev, x] while the
output gate reads the freshly computed cell state [c_t, h_prev, x].
Two fidelity switches exist: ``literal_cell`` feeds the previous
*candidate* (not the previous cell state) through the forget gate, and
``tanh_candidate`` swaps the candidate's sigmoid for tanh.

Attention scoring produces one scalar per position (the softmax runs
across positions), optionally reading lexicon vectors alongside the
hidden state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError
from .tensor import (Parameter, Tensor, add_n, concat, dot, element, sigmoid,
                     softmax, stack_scalars, tanh)


@dataclass
class CellConfig:
    literal_cell: bool = False
    tanh_candidate: bool = False


class LstmParams:
    """Weights of one direction: four gate matrices over the
    concatenated [state, h_prev, x] input, plus biases."""

    GATES = ("i", "f", "o", "d")

    def __init__(self, prefix: str, input_dim: int, hidden: int,
                 rng: np.random.Generator, init_scale: float = 0.08):
        self.input_dim = input_dim
        self.hidden = hidden
        width = 2 * hidden + input_dim
        self.w = {}
        self.b = {}
        for gate in self.GATES:
            self.w[gate] = Parameter(f"{prefix}.W_{gate}",
                                     rng.uniform(-init_scale, init_scale, (hidden, width)))
            self.b[gate] = Parameter(f"{prefix}.b_{gate}", np.zeros(hidden))

    def parameters(self) -> list[Parameter]:
        return [self.w[g] for g in self.GATES] + [self.b[g] for g in self.GATES]

    def initial_state(self) -> tuple[Tensor, Tensor, Tensor]:
        z = np.zeros(self.hidden)
        return Tensor(z), Tensor(z), Tensor(z)


def _gate(params: LstmParams, name: str, state: Tensor, h_prev: Tensor,
          x: Tensor) -> Tensor:
    return (params.w[name] @ concat([state, h_prev, x])) + params.b[name]


def _cell(x: Tensor, h_prev: Tensor, c_prev: Tensor, d_prev: Tensor,
          params: LstmParams, cfg: CellConfig) -> tuple[Tensor, Tensor, Tensor]:
    if x.data.ndim != 1 or x.data.size != params.input_dim:
        raise ShapeError(f"cell input width {x.shape} != {params.input_dim}")
    i = sigmoid(_gate(params, "i", c_prev, h_prev, x))
    f = sigmoid(_gate(params, "f", c_prev, h_prev, x))
    pre_d = _gate(params, "d", c_prev, h_prev, x)
    d = tanh(pre_d) if cfg.tanh_candidate else sigmoid(pre_d)
    carry = d_prev if cfg.literal_cell else c_prev
    c = i * d + f * carry
    o = sigmoid(_gate(params, "o", c, h_prev, x))
    h = o * tanh(c)
    return h, c, d


def lstm_cell(x: Tensor, h_prev: Tensor, c_prev: Tensor, params: LstmParams,
              cfg: CellConfig | None = None,
              d_prev: Tensor | None = None) -> tuple[Tensor, Tensor]:
    """One step; returns (h_t, c_t).

    ``d_prev`` matters only under ``literal_cell`` and defaults to
    zeros, matching the start-of-sequence state.
    """
    cfg = cfg or CellConfig()
    if d_prev is None:
        d_prev = params.initial_state()[2]
    h, c, _ = _cell(x, h_prev, c_prev, d_prev, params, cfg)
    return h, c


def lstm_run(xs: list[Tensor], params: LstmParams,
             cfg: CellConfig | None = None, reverse: bool = False) -> list[Tensor]:
    """Run the cell over a sequence; output is in input order."""
    cfg = cfg or CellConfig()
    if not xs:
        raise ShapeError("lstm_run on an empty sequence")
    h, c, d = params.initial_state()
    hs = []
    order = reversed(xs) if reverse else xs
    for x in order:
        h, c, d = _cell(x, h, c, d, params, cfg)
        hs.append(h)
    if reverse:
        hs.reverse()
    return hs


@dataclass
class BiLstmOutput:
    forward: list[Tensor]
    backward: list[Tensor]
    concat: list[Tensor] = field(default_factory=list)

    def __post_init__(self):
        if not self.concat:
            self.concat = [concat([f, b]) for f, b in zip(self.forward, self.backward)]


def bilstm(xs: list[Tensor], fwd: LstmParams, bwd: LstmParams,
           cfg: CellConfig | None = None) -> BiLstmOutput:
    """Forward pass left-to-right, backward right-to-left, concatenated
    per position."""
    if not xs:
        raise ShapeError("bilstm on an empty sequence")
    return BiLstmOutput(forward=lstm_run(xs, fwd, cfg),
                        backward=lstm_run(xs, bwd, cfg, reverse=True))


def sum_pool(hs: list[Tensor]) -> Tensor:
    """Elementwise sum of hidden states over positions."""
    if not hs:
        raise ShapeError("sum_pool on an empty sequence")
    return add_n(hs)


def _soft_combine(scores: list[Tensor], values: list[Tensor]) -> tuple[Tensor, Tensor]:
    alpha = softmax(stack_scalars(scores))
    gamma = add_n([element(alpha, t) * v for t, v in enumerate(values)])
    return gamma, alpha


def attention_plain(hs: list[Tensor], w: Tensor) -> tuple[Tensor, Tensor]:
    """Scores are w.h_t; returns (gamma, attention weights)."""
    if not hs:
        raise ShapeError("attention over an empty sequence")
    scores = [dot(w, h) for h in hs]
    return _soft_combine(scores, hs)


def attention_lex(hs: list[Tensor], ls: list[Tensor], w: Tensor,
                  b: Tensor) -> tuple[Tensor, Tensor]:
    """Scores read [h_t; l_t]; the combination stays over h_t only."""
    if len(ls) != len(hs):
        raise ShapeError(f"{len(hs)} hidden states but {len(ls)} lexicon vectors")
    scores = [dot(w, concat([h, l])) + b for h, l in zip(hs, ls)]
    return _soft_combine(scores, hs)


def attention_lex_pos(hs: list[Tensor], ls: list[Tensor], etas: list[Tensor],
                      w: Tensor, b: Tensor) -> tuple[Tensor, Tensor]:
    """Scores read [h_t; l_t; eta_t] (key-word and POS vectors)."""
    if len(ls) != len(hs) or len(etas) != len(hs):
        raise ShapeError("per-position streams differ in length")
    scores = [dot(w, concat([h, l, e])) + b for h, l, e in zip(hs, ls, etas)]
    return _soft_combine(scores, hs)


def attention_conj(ys: list[Tensor], hs2: list[Tensor], ws: list[Tensor],
                   we: list[Tensor], w: Tensor, b: Tensor) -> tuple[Tensor, Tensor]:
    """Clause-level attention: scores read [y_t; h_t; conj_start; conj_end]
    and the combination is over [h_t; y_t]."""
    n = len(ys)
    if not (len(hs2) == len(ws) == len(we) == n):
        raise ShapeError("per-clause streams differ in length")
    if n == 0:
        raise ShapeError("attention over an empty sequence")
    scores = [dot(w, concat([y, h, s, e])) + b
              for y, h, s, e in zip(ys, hs2, ws, we)]
    values = [concat([h, y]) for h, y in zip(hs2, ys)]
    return _soft_combine(scores, values)
