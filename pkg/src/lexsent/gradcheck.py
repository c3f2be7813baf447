"""Central finite differences as an independent gradient oracle.

``finite_diff_grad`` perturbs each scalar parameter in place and
re-evaluates the loss, so it is exact machinery-free arithmetic: the
only thing it shares with the tape is the forward computation itself.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, OracleError
from .tensor import Tensor


def finite_diff_grad(loss_fn: Callable[[], float], params: Sequence[Tensor],
                     eps: float = 1e-5) -> list[np.ndarray]:
    """Estimate d(loss)/d(param) by central differences.

    ``loss_fn`` takes no arguments and must re-evaluate the loss from
    the parameters' current values.  It is called twice up front; a
    mismatch means a non-deterministic loss and raises ``OracleError``.
    """
    if not 1e-7 <= eps <= 1e-3:
        raise ConfigError(f"eps must lie in [1e-7, 1e-3], got {eps}")
    first, second = float(loss_fn()), float(loss_fn())
    if first != second:
        raise OracleError(f"loss is not deterministic: {first!r} != {second!r}")
    grads = []
    for p in params:
        g = np.zeros_like(p.data)
        flat = p.data.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            saved = flat[i]
            flat[i] = saved + eps
            plus = float(loss_fn())
            flat[i] = saved - eps
            minus = float(loss_fn())
            flat[i] = saved
            gflat[i] = (plus - minus) / (2.0 * eps)
        grads.append(g)
    return grads


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Norm-based relative error, zero when both gradients vanish.

    Central differences at eps=1e-5 cannot resolve gradients below the
    fp64 roundoff scale (~1e-11), so norms under 1e-8 on both sides
    count as a matching zero (e.g. an attention bias, whose true
    gradient is exactly zero by softmax shift invariance).
    """
    a = np.asarray(analytic, dtype=np.float64).reshape(-1)
    n = np.asarray(numeric, dtype=np.float64).reshape(-1)
    denom = max(np.linalg.norm(a), np.linalg.norm(n))
    if denom < 1e-8:
        return 0.0
    return float(np.linalg.norm(a - n) / denom)


def check_gradients(loss_fn: Callable[[], Tensor], params: Sequence[Tensor],
                    eps: float = 1e-5) -> float:
    """Max relative error between tape gradients and finite differences.

    ``loss_fn`` returns a scalar Tensor built from ``params``; the tape
    side runs backward once, the oracle side re-evaluates the forward
    value under perturbation.
    """
    for p in params:
        p.zero_grad()
    loss = loss_fn()
    loss.backward()
    analytic = [np.array(p.grad) if p.grad is not None else np.zeros_like(p.data)
                for p in params]
    numeric = finite_diff_grad(lambda: loss_fn().item(), params, eps)
    return max(relative_error(a, n) for a, n in zip(analytic, numeric))
