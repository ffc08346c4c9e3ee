"""Adam with lazy row updates for embedding tables."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class AdamState:
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    lr: float = 0.001,
    sparse: dict[str, np.ndarray | None] | None = None,
) -> None:
    """One bias-corrected Adam update, in place.

    Tensors named in ``sparse`` are updated row-wise: only the rows listed
    (or, when the value is ``None``, the rows with any nonzero gradient)
    are touched, and the moments of every other row are left as they are.
    Moments are kept in float64 whatever the parameter dtype.
    """
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise FloatingPointError(f"non-finite gradient in {name!r}")
    sparse = sparse or {}
    state.t += 1
    bc1 = 1.0 - state.beta1 ** state.t
    bc2 = 1.0 - state.beta2 ** state.t
    for name, g in grads.items():
        p = params[name]
        if name not in state.m:
            state.m[name] = np.zeros(p.shape, dtype=np.float64)
            state.v[name] = np.zeros(p.shape, dtype=np.float64)
        m, v = state.m[name], state.v[name]
        if name in sparse:
            rows = sparse[name]
            if rows is None:
                rows = np.flatnonzero(np.any(g.reshape(len(g), -1) != 0, axis=1))
            if len(rows) == 0:
                continue
            gr = np.asarray(g[rows], dtype=np.float64)
            m[rows] = state.beta1 * m[rows] + (1.0 - state.beta1) * gr
            v[rows] = state.beta2 * v[rows] + (1.0 - state.beta2) * gr * gr
            step = lr * (m[rows] / bc1) / (np.sqrt(v[rows] / bc2) + state.eps)
            p[rows] = p[rows] - step
        else:
            m *= state.beta1
            m += (1.0 - state.beta1) * g
            v *= state.beta2
            v += (1.0 - state.beta2) * (g * g)
            step = lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
            p -= step.astype(p.dtype, copy=False)
