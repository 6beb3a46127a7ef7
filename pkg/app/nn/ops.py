"""
Functional forward/backward kernels on NHWC numpy arrays.

Every ``*_forward`` returns ``(out, cache)`` and the matching ``*_backward``
takes ``(dout, cache)``. The kernels are dtype-agnostic: float32 in
training and inference, float64 when checking gradients.
"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np


class ShapeError(ValueError):
    """Operand shapes do not agree."""


class NonFiniteError(FloatingPointError):
    """A tensor picked up NaN or Inf."""


def assert_finite(name: str, *arrays: np.ndarray) -> None:
    for array in arrays:
        if not np.all(np.isfinite(array)):
            bad = int(np.size(array) - np.count_nonzero(np.isfinite(array)))
            raise NonFiniteError(f"{name}: {bad} non-finite value(s) in tensor of shape {np.shape(array)}")


def _same_padding(size: int, kernel: int, stride: int) -> Tuple[int, int, int]:
    out = -(-size // stride)
    total = max((out - 1) * stride + kernel - size, 0)
    return out, total // 2, total - total // 2


def _plan(size: int, kernel: int, stride: int, padding: str) -> Tuple[int, int, int]:
    if padding == "same":
        return _same_padding(size, kernel, stride)
    if padding == "valid":
        if size < kernel:
            raise ShapeError(f"valid padding needs input >= kernel, got {size} < {kernel}")
        return (size - kernel) // stride + 1, 0, 0
    raise ValueError(f"Unknown padding '{padding}' (expected 'same' or 'valid')")


def conv2d_forward(
    x: np.ndarray,
    w: np.ndarray,
    b: np.ndarray,
    stride: int = 1,
    padding: str = "same",
):
    """Cross-correlation of ``x`` (N,H,W,Cin) with ``w`` (k,k,Cin,Cout)."""
    if x.ndim != 4 or w.ndim != 4 or x.shape[3] != w.shape[2]:
        raise ShapeError(f"conv2d channel mismatch: input {x.shape} vs weights {w.shape}")
    if b.shape != (w.shape[3],):
        raise ShapeError(f"conv2d bias {b.shape} does not match weights {w.shape}")

    n, h, wd, _ = x.shape
    k = w.shape[0]
    oh, top, bottom = _plan(h, k, stride, padding)
    ow, left, right = _plan(wd, w.shape[1], stride, padding)
    xp = np.pad(x, ((0, 0), (top, bottom), (left, right), (0, 0)))

    out = np.zeros((n, oh, ow, w.shape[3]), dtype=np.result_type(x, w))
    for di in range(k):
        for dj in range(w.shape[1]):
            patch = xp[:, di:di + stride * (oh - 1) + 1:stride, dj:dj + stride * (ow - 1) + 1:stride, :]
            out += patch @ w[di, dj]
    out += b
    cache = (xp, w, stride, (top, left), x.shape, (oh, ow))
    return out, cache


def conv2d_backward(dout: np.ndarray, cache):
    xp, w, stride, (top, left), x_shape, (oh, ow) = cache
    cin, cout = w.shape[2], w.shape[3]
    dxp = np.zeros_like(xp)
    dw = np.zeros_like(w)
    flat_dout = dout.reshape(-1, cout)
    for di in range(w.shape[0]):
        for dj in range(w.shape[1]):
            rows = slice(di, di + stride * (oh - 1) + 1, stride)
            cols = slice(dj, dj + stride * (ow - 1) + 1, stride)
            patch = xp[:, rows, cols, :]
            dw[di, dj] = patch.reshape(-1, cin).T @ flat_dout
            dxp[:, rows, cols, :] += dout @ w[di, dj].T
    db = dout.sum(axis=(0, 1, 2))
    dx = dxp[:, top:top + x_shape[1], left:left + x_shape[2], :]
    return dx, dw, db


def maxpool_forward(x: np.ndarray, kernel: int = 3, stride: int = 2, padding: str = "same"):
    """Per-channel windowed max; ties go to the first position in row-major scan order."""
    if x.ndim != 4:
        raise ShapeError(f"maxpool expects NHWC input, got shape {x.shape}")
    n, h, wd, c = x.shape
    oh, top, bottom = _plan(h, kernel, stride, padding)
    ow, left, right = _plan(wd, kernel, stride, padding)
    xp = np.pad(x, ((0, 0), (top, bottom), (left, right), (0, 0)), constant_values=-np.inf)

    windows = np.stack(
        [
            xp[:, di:di + stride * (oh - 1) + 1:stride, dj:dj + stride * (ow - 1) + 1:stride, :]
            for di in range(kernel)
            for dj in range(kernel)
        ]
    )
    arg = windows.argmax(axis=0)
    out = np.take_along_axis(windows, arg[None], axis=0)[0]
    cache = (arg, xp.shape, kernel, stride, (top, left), x.shape, (oh, ow))
    return out, cache


def maxpool_backward(dout: np.ndarray, cache):
    arg, xp_shape, kernel, stride, (top, left), x_shape, (oh, ow) = cache
    dxp = np.zeros(xp_shape, dtype=dout.dtype)
    for idx in range(kernel * kernel):
        di, dj = divmod(idx, kernel)
        rows = slice(di, di + stride * (oh - 1) + 1, stride)
        cols = slice(dj, dj + stride * (ow - 1) + 1, stride)
        dxp[:, rows, cols, :] += np.where(arg == idx, dout, 0)
    return dxp[:, top:top + x_shape[1], left:left + x_shape[2], :]


def dense_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray):
    if x.ndim != 2 or x.shape[1] != w.shape[0] or b.shape != (w.shape[1],):
        raise ShapeError(f"dense shape mismatch: input {x.shape} vs weights {w.shape}, bias {b.shape}")
    return x @ w + b, (x, w)


def dense_backward(dout: np.ndarray, cache):
    x, w = cache
    return dout @ w.T, x.T @ dout, dout.sum(axis=0)


def relu_forward(x: np.ndarray):
    return np.maximum(x, 0), x


def relu_backward(dout: np.ndarray, cache):
    return dout * (cache > 0)


def sigmoid(x: np.ndarray) -> np.ndarray:
    # Split by sign so exp never overflows.
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = x - x.max(axis=axis, keepdims=True)
    ex = np.exp(shifted)
    return ex / ex.sum(axis=axis, keepdims=True)


def softmax_forward(x: np.ndarray):
    out = softmax(x)
    return out, out


def softmax_backward(dout: np.ndarray, cache):
    p = cache
    return p * (dout - (dout * p).sum(axis=-1, keepdims=True))


def log_softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = x - x.max(axis=axis, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=axis, keepdims=True))


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray):
    """Mean cross-entropy over rows; returns ``(loss, dlogits)``."""
    n = logits.shape[0]
    logp = log_softmax(logits)
    loss = -logp[np.arange(n), labels].mean()
    dlogits = np.exp(logp)
    dlogits[np.arange(n), labels] -= 1.0
    return float(loss), dlogits / n


def dropout_forward(
    x: np.ndarray,
    rate: float,
    rng: Optional[np.random.Generator] = None,
    training: bool = False,
):
    """Inverted dropout: survivors are scaled by ``1/(1-rate)`` while training."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return x, None
    if rng is None:
        raise ValueError("dropout in training mode needs a seeded generator")
    mask = (rng.random(x.shape) >= rate).astype(x.dtype) / (1.0 - rate)
    return x * mask, mask


def dropout_backward(dout: np.ndarray, cache):
    return dout if cache is None else dout * cache


def channel_concat_forward(a: np.ndarray, b: np.ndarray):
    if a.shape[:-1] != b.shape[:-1]:
        raise ShapeError(f"channel concat needs equal batch/spatial dims: {a.shape} vs {b.shape}")
    return np.concatenate([a, b], axis=-1), a.shape[-1]


def channel_concat_backward(dout: np.ndarray, cache):
    split = cache
    return dout[..., :split], dout[..., split:]
