"""Network containers shared by the detector and the language classifier."""

from __future__ import annotations

from typing import Any, Dict, List, Protocol, Tuple

import numpy as np

from app.nn import ops
from app.nn.layers import Layer, Softmax


class Network(Protocol):
    """What training, serialization and inference need from a model."""

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray: ...

    def backward(self, dout: np.ndarray) -> np.ndarray: ...

    def parameters(self) -> Dict[str, np.ndarray]: ...

    def gradients(self) -> Dict[str, np.ndarray]: ...

    def descriptor(self) -> Dict[str, Any]: ...


class Sequential:
    """A plain chain of named layers."""

    def __init__(self, layers: List[Tuple[str, Layer]], descriptor: Dict[str, Any]):
        names = [name for name, _ in layers]
        if len(set(names)) != len(names):
            raise ValueError(f"Layer names must be unique: {names}")
        self.layers = layers
        self._descriptor = descriptor

    def forward(self, x, training=False):
        for _, layer in self.layers:
            x = layer.forward(x, training)
        ops.assert_finite("forward output", x)
        return x

    def backward(self, dout):
        for _, layer in reversed(self.layers):
            dout = layer.backward(dout)
        ops.assert_finite("input gradient", dout)
        return dout

    def _logit_layers(self):
        if self.layers and isinstance(self.layers[-1][1], Softmax):
            return self.layers[:-1]
        return self.layers

    def forward_logits(self, x, training=False):
        """Forward pass that stops before a trailing softmax (fused cross-entropy)."""
        for _, layer in self._logit_layers():
            x = layer.forward(x, training)
        ops.assert_finite("logits", x)
        return x

    def backward_logits(self, dlogits):
        for _, layer in reversed(self._logit_layers()):
            dlogits = layer.backward(dlogits)
        ops.assert_finite("input gradient", dlogits)
        return dlogits

    def parameters(self):
        named = {}
        for name, layer in self.layers:
            named.update(layer.named_parameters(f"{name}."))
        return named

    def gradients(self):
        named = {}
        for name, layer in self.layers:
            named.update(layer.named_gradients(f"{name}."))
        return named

    def descriptor(self):
        return dict(self._descriptor)

    def astype(self, dtype) -> "Sequential":
        for _, layer in self.layers:
            layer.astype(dtype)
        return self


def parameter_count(network: Network) -> int:
    return int(sum(p.size for p in network.parameters().values()))
