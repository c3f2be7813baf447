"""Dense float64 tensors with reverse-mode automatic differentiation.

Every operation appends a node to an implicit tape; calling
:meth:`Tensor.backward` on a scalar result walks the tape once and
accumulates gradients into every reachable tensor created with
``requires_grad=True``.  All arrays are float64 and row-major.  A NaN or
Inf in any result raises :class:`NumericError` at the op that produced
it instead of propagating silently.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import NumericError, ShapeError


class Tensor:
    """A float64 array plus the bookkeeping for reverse-mode gradients.

    ``data`` is the value, ``grad`` the accumulated gradient (allocated
    lazily, always the same shape as ``data``).  Tensors are value-like:
    ops never mutate their operands, so a tensor can be reused freely in
    several expressions and its gradient contributions accumulate.
    """

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        arr = np.array(data, dtype=np.float64, order="C", copy=True)
        if not np.all(np.isfinite(arr)):
            raise NumericError("tensor contains NaN or Inf")
        self.data = arr
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = ()
        self._backward = None

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def __repr__(self):
        return f"Tensor(shape={self.shape}, data={self.data!r})"

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() on tensor of shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def _accumulate(self, g) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def zero_grad(self) -> None:
        self.grad = None

    # -- tape ----------------------------------------------------------

    def backward(self) -> None:
        """Backpropagate from this scalar through the tape."""
        if self.data.size != 1:
            raise ShapeError("backward() requires a scalar tensor")
        topo: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in visited:
                    stack.append((p, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node.requires_grad and node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # -- elementwise arithmetic ----------------------------------------

    def __add__(self, other):
        if not isinstance(other, Tensor):
            out = _make(self.data + float(other), (self,), self.requires_grad)
            out._backward = lambda g: self._accumulate(g)
            return out
        a, b = self, other
        ga, gb = _broadcast_pair(a, b, "add")
        out = _make(a.data + b.data, (a, b), a.requires_grad or b.requires_grad)

        def back(g):
            a._accumulate(ga(g))
            b._accumulate(gb(g))
        out._backward = back
        return out

    __radd__ = __add__

    def __neg__(self):
        out = _make(-self.data, (self,), self.requires_grad)
        out._backward = lambda g: self._accumulate(-g)
        return out

    def __sub__(self, other):
        if not isinstance(other, Tensor):
            return self + (-float(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + float(other)

    def __mul__(self, other):
        if not isinstance(other, Tensor):
            c = float(other)
            out = _make(self.data * c, (self,), self.requires_grad)
            out._backward = lambda g: self._accumulate(g * c)
            return out
        a, b = self, other
        ga, gb = _broadcast_pair(a, b, "mul")
        out = _make(a.data * b.data, (a, b), a.requires_grad or b.requires_grad)

        def back(g):
            a._accumulate(ga(g * b.data))
            b._accumulate(gb(g * a.data))
        out._backward = back
        return out

    __rmul__ = __mul__

    def __matmul__(self, other):
        return matmul(self, other)

    # -- reductions ------------------------------------------------------

    def sum(self):
        out = _make(np.asarray(self.data.sum()), (self,), self.requires_grad)
        out._backward = lambda g: self._accumulate(np.full_like(self.data, float(g)))
        return out

    def exp(self):
        out = _make(np.exp(self.data), (self,), self.requires_grad)
        out._backward = lambda g: self._accumulate(g * out.data)
        return out

    def log(self):
        if np.any(self.data <= 0.0):
            raise NumericError("log of non-positive value")
        out = _make(np.log(self.data), (self,), self.requires_grad)
        out._backward = lambda g: self._accumulate(g / self.data)
        return out


def _make(arr: np.ndarray, parents: tuple, requires_grad: bool) -> Tensor:
    """Adopt a freshly computed float64 array as a tape node.

    The finiteness check goes through ``sum()``: NaN poisons the sum and
    any Inf saturates it, so one reduction catches both.  (A sum that
    overflows to Inf from huge finite values also trips the check, which
    is the right call anyway at that magnitude.)
    """
    if not math.isfinite(arr.sum()):
        raise NumericError("tensor contains NaN or Inf")
    t = Tensor.__new__(Tensor)
    t.data = arr
    t.grad = None
    t.requires_grad = requires_grad
    t._parents = parents
    t._backward = None
    return t


def _broadcast_pair(a: Tensor, b: Tensor, opname: str):
    """Gradient reducers for same-shape or scalar-vs-array operands."""
    if a.shape == b.shape:
        return (lambda g: g), (lambda g: g)
    if a.data.size == 1:
        return (lambda g: np.sum(g).reshape(a.shape)), (lambda g: g)
    if b.data.size == 1:
        return (lambda g: g), (lambda g: np.sum(g).reshape(b.shape))
    raise ShapeError(f"{opname}: shapes {a.shape} and {b.shape} do not broadcast")


# -- constructors -------------------------------------------------------

def constant(data) -> Tensor:
    return Tensor(data)


def zeros(shape) -> Tensor:
    return Tensor(np.zeros(shape))


class Parameter(Tensor):
    """A named leaf tensor that optimizers update in place.

    Names must be unique within a model; the checkpoint manifest and the
    optimizer moment buffers are both keyed by them.
    """

    __slots__ = ("name",)

    def __init__(self, name: str, data):
        super().__init__(data, requires_grad=True)
        self.name = name

    def __repr__(self):
        return f"Parameter({self.name!r}, shape={self.shape})"


# -- core ops ------------------------------------------------------------

def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product: 2D @ 2D or 2D @ 1D."""
    if a.data.ndim != 2 or b.data.ndim not in (1, 2):
        raise ShapeError(f"matmul: unsupported ranks {a.data.ndim} @ {b.data.ndim}")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: inner dims {a.shape} @ {b.shape}")
    out = _make(a.data @ b.data, (a, b), a.requires_grad or b.requires_grad)

    def back(g):
        if b.data.ndim == 1:
            a._accumulate(np.outer(g, b.data))
            b._accumulate(a.data.T @ g)
        else:
            a._accumulate(g @ b.data.T)
            b._accumulate(a.data.T @ g)
    out._backward = back
    return out


def dot(a: Tensor, b: Tensor) -> Tensor:
    """Inner product of two vectors, returning a scalar tensor."""
    if a.data.ndim != 1 or b.data.ndim != 1 or a.shape != b.shape:
        raise ShapeError(f"dot: shapes {a.shape} and {b.shape}")
    out = _make(np.asarray(np.dot(a.data, b.data)), (a, b),
                a.requires_grad or b.requires_grad)

    def back(g):
        a._accumulate(g * b.data)
        b._accumulate(g * a.data)
    out._backward = back
    return out


def concat(parts: Sequence[Tensor]) -> Tensor:
    """Concatenate 1D tensors into one vector."""
    parts = list(parts)
    if not parts:
        raise ShapeError("concat of zero tensors")
    for p in parts:
        if p.data.ndim != 1:
            raise ShapeError("concat expects 1D tensors")
    out = _make(np.concatenate([p.data for p in parts]), tuple(parts),
                any(p.requires_grad for p in parts))
    offsets = np.cumsum([0] + [p.data.size for p in parts])

    def back(g):
        for p, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
            p._accumulate(g[lo:hi])
    out._backward = back
    return out


def element(x: Tensor, i: int) -> Tensor:
    """Pick element ``i`` of a vector as a scalar tensor."""
    if x.data.ndim != 1:
        raise ShapeError("element expects a 1D tensor")
    if not 0 <= i < x.data.size:
        raise IndexError(f"element {i} out of range for length {x.data.size}")
    out = _make(np.asarray(x.data[i]), (x,), x.requires_grad)

    def back(g):
        gx = np.zeros_like(x.data)
        gx[i] = float(g)
        x._accumulate(gx)
    out._backward = back
    return out


def row(m: Tensor, i: int) -> Tensor:
    """Pick row ``i`` of a matrix (embedding-table lookup)."""
    if m.data.ndim != 2:
        raise ShapeError("row expects a 2D tensor")
    if not 0 <= i < m.shape[0]:
        raise IndexError(f"row {i} out of range for {m.shape[0]} rows")
    out = _make(m.data[i].copy(), (m,), m.requires_grad)

    def back(g):
        if m.grad is None:
            m.grad = np.zeros_like(m.data)
        m.grad[i] += g
    out._backward = back
    return out


def stack_scalars(parts: Sequence[Tensor]) -> Tensor:
    """Collect scalar tensors into one vector (for per-position scores)."""
    parts = list(parts)
    if not parts:
        raise ShapeError("stack_scalars of zero tensors")
    for p in parts:
        if p.data.size != 1:
            raise ShapeError("stack_scalars expects scalar tensors")
    out = _make(np.array([float(p.data) for p in parts]), tuple(parts),
                any(p.requires_grad for p in parts))

    def back(g):
        for i, p in enumerate(parts):
            p._accumulate(np.full_like(p.data, g[i]))
    out._backward = back
    return out


def sigmoid(x: Tensor) -> Tensor:
    """Elementwise logistic function, stable on both tails."""
    d = x.data
    e = np.exp(-np.abs(d))
    y = np.where(d >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    out = _make(y, (x,), x.requires_grad)
    out._backward = lambda g: x._accumulate(g * out.data * (1.0 - out.data))
    return out


def tanh(x: Tensor) -> Tensor:
    out = _make(np.tanh(x.data), (x,), x.requires_grad)
    out._backward = lambda g: x._accumulate(g * (1.0 - out.data ** 2))
    return out


def activation(kind: str, x: Tensor) -> Tensor:
    """Dispatch on activation name: ``sigmoid`` or ``tanh``."""
    if kind == "sigmoid":
        return sigmoid(x)
    if kind == "tanh":
        return tanh(x)
    raise ValueError(f"unknown activation {kind!r}")


def softmax(x: Tensor) -> Tensor:
    """Stable softmax of a vector: shifts by max before exponentiating."""
    if x.data.ndim != 1 or x.data.size == 0:
        raise ShapeError("softmax expects a nonempty 1D tensor")
    e = np.exp(x.data - x.data.max())
    out = _make(e / e.sum(), (x,), x.requires_grad)

    def back(g):
        x._accumulate(out.data * (g - np.dot(g, out.data)))
    out._backward = back
    return out


def affine(w: Tensor, x: Tensor, b: Tensor) -> Tensor:
    """``w @ x + b`` with the usual inner-dimension check."""
    return matmul(w, x) + b


def logsumexp(x: Tensor) -> Tensor:
    """log(sum(exp(x))) of a vector, shifted by max for stability.

    The shift is a detached constant; the gradient is exact anyway
    because logsumexp(x) = m + log(sum(exp(x - m))) for any fixed m.
    """
    if x.data.ndim != 1 or x.data.size == 0:
        raise ShapeError("logsumexp expects a nonempty 1D tensor")
    m = float(x.data.max())
    return (x + (-m)).exp().sum().log() + m


def cross_entropy(logits: Tensor, label: int) -> Tensor:
    """Negative log-likelihood of ``label`` under softmax(logits)."""
    return logsumexp(logits) - element(logits, label)


def add_n(parts: Iterable[Tensor]) -> Tensor:
    """Sum a sequence of same-shape tensors in fixed (given) order."""
    parts = list(parts)
    if not parts:
        raise ShapeError("add_n of zero tensors")
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    return total


def mean_n(parts: Iterable[Tensor]) -> Tensor:
    parts = list(parts)
    return add_n(parts) * (1.0 / len(parts))
