"""
SGD with inverse-time learning-rate decay, and an Adam-style optimizer.

Both update the parameter arrays in place and refuse non-finite gradients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np


class TrainingDivergedError(RuntimeError):
    """Training produced NaN/Inf. ``snapshot`` holds the last good parameters, if known."""

    def __init__(self, message: str, step: int, snapshot: Optional[Dict[str, np.ndarray]] = None):
        super().__init__(message)
        self.step = step
        self.snapshot = snapshot


def _check_gradients(grads: Dict[str, np.ndarray], step: int) -> None:
    for name, grad in grads.items():
        if not np.all(np.isfinite(grad)):
            finite = np.abs(grad[np.isfinite(grad)])
            largest = float(finite.max()) if finite.size else 0.0
            raise TrainingDivergedError(
                f"non-finite gradient for '{name}' at step {step} (largest finite |g| = {largest:.3e})",
                step=step,
            )


def decayed_lr(lr: float, decay: float, step: int) -> float:
    """``lr / (1 + decay * step)``."""
    return lr / (1.0 + decay * step)


def clip_by_global_norm(grads: Dict[str, np.ndarray], max_norm: float) -> float:
    """Scale all gradients in place so their joint L2 norm is at most ``max_norm``; returns the norm."""
    norm = float(np.sqrt(sum(float(np.sum(np.square(g, dtype=np.float64))) for g in grads.values())))
    if max_norm > 0 and norm > max_norm:
        scale = max_norm / (norm + 1e-12)
        for g in grads.values():
            g *= scale
    return norm


def sgd_step(
    params: Dict[str, np.ndarray],
    grads: Dict[str, np.ndarray],
    lr: float,
    decay: float = 0.0,
    step: int = 0,
    momentum: float = 0.0,
    velocity: Optional[Dict[str, np.ndarray]] = None,
) -> Dict[str, np.ndarray]:
    """
    ``p <- p - lr_t * g`` with ``lr_t = lr / (1 + decay * step)``.

    With ``momentum > 0`` the update uses a velocity buffer
    ``v <- momentum * v - lr_t * g; p <- p + v`` kept in ``velocity``.
    """
    if lr <= 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    _check_gradients(grads, step)
    lr_t = decayed_lr(lr, decay, step)
    for name, p in params.items():
        g = grads[name]
        if momentum > 0.0:
            if velocity is None:
                raise ValueError("momentum needs a velocity buffer")
            v = velocity.setdefault(name, np.zeros_like(p))
            v *= momentum
            v -= lr_t * g
            p += v
        else:
            p -= (lr_t * g).astype(p.dtype)
    return params


@dataclass
class AdamState:
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(
    params: Dict[str, np.ndarray],
    grads: Dict[str, np.ndarray],
    state: AdamState,
    lr: float = 0.001,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-7,
) -> Dict[str, np.ndarray]:
    """First/second-moment update with bias correction."""
    if lr <= 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    _check_gradients(grads, state.step)
    state.step += 1
    t = state.step
    correction1 = 1.0 - beta1 ** t
    correction2 = 1.0 - beta2 ** t
    for name, p in params.items():
        g = grads[name]
        m = state.m.setdefault(name, np.zeros_like(p))
        v = state.v.setdefault(name, np.zeros_like(p))
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * np.square(g)
        m_hat = m / correction1
        v_hat = v / correction2
        p -= (lr * m_hat / (np.sqrt(v_hat) + eps)).astype(p.dtype)
    return params
