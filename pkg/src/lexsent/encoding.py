"""One-hot and rho-hot categorical encoding.

Rho-hot encoding generalizes one-hot in two directions: the active
entry is a learnable scale ``rho`` instead of a fixed 1, and it is
duplicated ``n`` times, so category ``k`` of ``K`` occupies the
contiguous block ``[k*n, (k+1)*n)`` of a length ``K*n`` vector.  With
``rho=1`` and ``n=1`` it is exactly one-hot.
"""

from __future__ import annotations

import numpy as np

from .tensor import Parameter, Tensor


def one_hot(k: int, count: int) -> Tensor:
    """Length-``count`` vector with a 1 at index ``k``."""
    if not 0 <= k < count:
        raise IndexError(f"category {k} out of range for {count} categories")
    v = np.zeros(count)
    v[k] = 1.0
    return Tensor(v)


class RhoHotFamily:
    """A categorical vocabulary with one shared learnable scale.

    Each family (key words, POS, conjunctions) owns its own ``rho``
    parameter; encoding is pure given (rho, n, K) and differentiable in
    rho with d(encoded)/d(rho) equal to the 0/1 support mask.
    """

    def __init__(self, name: str, categories, n: int = 1, rho_init: float = 0.5):
        categories = list(categories)
        if not categories:
            raise ValueError("a rho-hot family needs at least one category")
        if n < 1:
            raise ValueError(f"duplication factor n must be >= 1, got {n}")
        self.name = name
        self.categories = categories
        self.n = int(n)
        self.rho = Parameter(f"{name}.rho", float(rho_init))
        self._index = {c: i for i, c in enumerate(categories)}

    @property
    def count(self) -> int:
        return len(self.categories)

    @property
    def width(self) -> int:
        return self.count * self.n

    def index(self, category: str) -> int:
        return self._index[category]

    def encode(self, k: int) -> Tensor:
        """Rho-hot vector for category index ``k``."""
        if not 0 <= k < self.count:
            raise IndexError(f"category {k} out of range for {self.count} categories")
        mask = np.zeros(self.width)
        mask[k * self.n:(k + 1) * self.n] = 1.0
        return self.rho * Tensor(mask)

    def encode_absent(self) -> Tensor:
        """All-zero vector for callers whose domain defines an absent case."""
        return Tensor(np.zeros(self.width))


def rho_hot(family: RhoHotFamily, k: int) -> Tensor:
    return family.encode(k)
