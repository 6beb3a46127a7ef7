"""
Layer objects wrapping the functional kernels in ``ops``.

A layer owns its parameters and the gradients from its last backward
pass. Forward caches whatever backward needs, so a layer instance handles
one forward/backward pair at a time (training is single-writer).
"""

from __future__ import annotations

from typing import Dict, Optional

import numpy as np

from app.nn import ops


def kaiming_normal(rng: np.random.Generator, shape, fan_in: int, dtype=np.float32) -> np.ndarray:
    return (rng.standard_normal(shape) * np.sqrt(2.0 / fan_in)).astype(dtype)


class Layer:
    """Base contract: ``forward``/``backward`` plus named parameters and gradients."""

    def __init__(self):
        self.params: Dict[str, np.ndarray] = {}
        self.grads: Dict[str, np.ndarray] = {}

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dout: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sublayers(self) -> Dict[str, "Layer"]:
        return {}

    def named_parameters(self, prefix: str = "") -> Dict[str, np.ndarray]:
        named = {f"{prefix}{k}": v for k, v in self.params.items()}
        for name, layer in self.sublayers().items():
            named.update(layer.named_parameters(f"{prefix}{name}."))
        return named

    def named_gradients(self, prefix: str = "") -> Dict[str, np.ndarray]:
        named = {f"{prefix}{k}": v for k, v in self.grads.items()}
        for name, layer in self.sublayers().items():
            named.update(layer.named_gradients(f"{prefix}{name}."))
        return named

    def astype(self, dtype) -> "Layer":
        for key, value in self.params.items():
            self.params[key] = value.astype(dtype)
        for layer in self.sublayers().values():
            layer.astype(dtype)
        return self


class Conv2D(Layer):
    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel_size: int,
        stride: int = 1,
        padding: str = "same",
        rng: Optional[np.random.Generator] = None,
        init_std: Optional[float] = None,
    ):
        super().__init__()
        rng = rng or np.random.default_rng(0)
        shape = (kernel_size, kernel_size, in_channels, out_channels)
        if init_std is None:
            w = kaiming_normal(rng, shape, kernel_size * kernel_size * in_channels)
        else:
            w = (rng.standard_normal(shape) * init_std).astype(np.float32)
        self.params = {"w": w, "b": np.zeros(out_channels, dtype=np.float32)}
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.stride = stride
        self.padding = padding
        self._cache = None

    def forward(self, x, training=False):
        out, self._cache = ops.conv2d_forward(x, self.params["w"], self.params["b"], self.stride, self.padding)
        return out

    def backward(self, dout):
        dx, dw, db = ops.conv2d_backward(dout, self._cache)
        self.grads = {"w": dw, "b": db}
        return dx


class MaxPool2D(Layer):
    def __init__(self, kernel_size: int = 3, stride: int = 2, padding: str = "same"):
        super().__init__()
        self.kernel_size = kernel_size
        self.stride = stride
        self.padding = padding
        self._cache = None

    def forward(self, x, training=False):
        out, self._cache = ops.maxpool_forward(x, self.kernel_size, self.stride, self.padding)
        return out

    def backward(self, dout):
        return ops.maxpool_backward(dout, self._cache)


class Dense(Layer):
    def __init__(self, in_features: int, out_features: int, rng: Optional[np.random.Generator] = None):
        super().__init__()
        rng = rng or np.random.default_rng(0)
        self.params = {
            "w": kaiming_normal(rng, (in_features, out_features), in_features),
            "b": np.zeros(out_features, dtype=np.float32),
        }
        self.in_features = in_features
        self.out_features = out_features
        self._cache = None

    def forward(self, x, training=False):
        out, self._cache = ops.dense_forward(x, self.params["w"], self.params["b"])
        return out

    def backward(self, dout):
        dx, dw, db = ops.dense_backward(dout, self._cache)
        self.grads = {"w": dw, "b": db}
        return dx


class ReLU(Layer):
    def __init__(self):
        super().__init__()
        self.last_input: Optional[np.ndarray] = None

    def forward(self, x, training=False):
        out, self.last_input = ops.relu_forward(x)
        return out

    def backward(self, dout):
        return ops.relu_backward(dout, self.last_input)


class Softmax(Layer):
    def __init__(self):
        super().__init__()
        self._cache = None

    def forward(self, x, training=False):
        out, self._cache = ops.softmax_forward(x)
        return out

    def backward(self, dout):
        return ops.softmax_backward(dout, self._cache)


class Dropout(Layer):
    def __init__(self, rate: float, seed: int = 0):
        super().__init__()
        if not 0.0 <= rate < 1.0:
            raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
        self.rate = rate
        self.rng = np.random.default_rng(seed)
        self._mask = None

    def reseed(self, seed: int) -> None:
        self.rng = np.random.default_rng(seed)

    def forward(self, x, training=False):
        out, self._mask = ops.dropout_forward(x, self.rate, self.rng, training)
        return out

    def backward(self, dout):
        return ops.dropout_backward(dout, self._mask)


class Fire(Layer):
    """
    Squeeze 1x1 conv -> ReLU, then parallel expand 1x1 and expand 3x3 convs,
    each followed by ReLU, concatenated along channels (1x1 branch first).
    """

    def __init__(
        self,
        in_channels: int,
        s1x1: int,
        e1x1: int,
        e3x3: int,
        rng: Optional[np.random.Generator] = None,
    ):
        super().__init__()
        if in_channels < 1:
            raise ValueError(f"fire layer needs at least one input channel, got {in_channels}")
        rng = rng or np.random.default_rng(0)
        self.in_channels = in_channels
        self.s1x1, self.e1x1, self.e3x3 = s1x1, e1x1, e3x3
        self.squeeze = Conv2D(in_channels, s1x1, 1, rng=rng)
        self.squeeze_relu = ReLU()
        self.expand1x1 = Conv2D(s1x1, e1x1, 1, rng=rng)
        self.expand1x1_relu = ReLU()
        self.expand3x3 = Conv2D(s1x1, e3x3, 3, rng=rng)
        self.expand3x3_relu = ReLU()

    @property
    def out_channels(self) -> int:
        return self.e1x1 + self.e3x3

    def sublayers(self):
        return {"squeeze": self.squeeze, "expand1x1": self.expand1x1, "expand3x3": self.expand3x3}

    def relus(self):
        return (self.squeeze_relu, self.expand1x1_relu, self.expand3x3_relu)

    def forward(self, x, training=False):
        s = self.squeeze_relu.forward(self.squeeze.forward(x))
        a = self.expand1x1_relu.forward(self.expand1x1.forward(s))
        b = self.expand3x3_relu.forward(self.expand3x3.forward(s))
        out, _ = ops.channel_concat_forward(a, b)
        return out

    def backward(self, dout):
        da, db = ops.channel_concat_backward(dout, self.e1x1)
        ds = self.expand1x1.backward(self.expand1x1_relu.backward(da))
        ds = ds + self.expand3x3.backward(self.expand3x3_relu.backward(db))
        return self.squeeze.backward(self.squeeze_relu.backward(ds))
