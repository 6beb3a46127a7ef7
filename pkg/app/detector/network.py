"""
Diacritic detector: a SqueezeNet-style trunk with a ConvDet head.

    conv1 -> fire2, fire3 -> pool1 -> fire4, fire5 -> pool2
          -> concat(pool_skip(pool1 output), pool2 output)
          -> fire6 .. fire10 -> dropout -> convdet

``pool_skip`` brings the first fire set (stride 2) to the stride of the
second (stride 4) so the two can be concatenated along channels.

``architecture="squeezedet"`` builds the stock SqueezeDet network instead
(stride-2 conv1, pooling straight after it, fire2 .. fire11, output stride
16). It is only there to be compared against.
"""

from __future__ import annotations

from typing import Any, Dict, List, Tuple

import numpy as np

from app.detector.config import DetectorConfig
from app.nn import ops
from app.nn.layers import Conv2D, Dropout, Fire, Layer, MaxPool2D, ReLU
from app.nn.serialization import register_architecture

# (squeeze, expand 1x1, expand 3x3) at full width
FIRE_SPECS: Dict[str, Tuple[int, int, int]] = {
    "fire2": (16, 64, 64),
    "fire3": (16, 64, 64),
    "fire4": (32, 128, 128),
    "fire5": (32, 128, 128),
    "fire6": (48, 192, 192),
    "fire7": (48, 192, 192),
    "fire8": (96, 384, 384),
    "fire9": (96, 384, 384),
    "fire10": (96, 384, 384),
}
BASELINE_FIRE_SPECS: Dict[str, Tuple[int, int, int]] = {
    "fire2": (16, 64, 64),
    "fire3": (16, 64, 64),
    "fire4": (32, 128, 128),
    "fire5": (32, 128, 128),
    "fire6": (48, 192, 192),
    "fire7": (48, 192, 192),
    "fire8": (64, 256, 256),
    "fire9": (64, 256, 256),
    "fire10": (96, 384, 384),
    "fire11": (96, 384, 384),
}
CONV1_FILTERS = 64
CONVDET_INIT_STD = 1e-4


def preprocess(rasters: np.ndarray) -> np.ndarray:
    """uint8 (N, H, W, 3) -> float32, standardized per image."""
    x = np.asarray(rasters, dtype=np.float32) / 255.0
    mean = x.mean(axis=(1, 2, 3), keepdims=True)
    std = x.std(axis=(1, 2, 3), keepdims=True)
    return (x - mean) / (std + 1e-3)


class SqueezeDetector:
    """Shared plumbing of both detector architectures."""

    def __init__(self, config: DetectorConfig, conv1_stride: int, fire_specs: Dict[str, Tuple[int, int, int]]):
        self.config = config
        self._rng = np.random.default_rng(config.seed)
        self.conv1 = Conv2D(3, CONV1_FILTERS, 3, stride=conv1_stride, rng=self._rng)
        self.relu1 = ReLU()
        self.fires: Dict[str, Fire] = {}
        self._fire_specs = fire_specs
        self.dropout = Dropout(config.dropout, seed=config.seed)

    def _width(self, n: int) -> int:
        return max(1, int(round(n * self.config.width_multiplier)))

    def _add_fire(self, name: str, in_channels: int) -> int:
        s, e1, e3 = self._fire_specs[name]
        self.fires[name] = Fire(in_channels, self._width(s), self._width(e1), self._width(e3), rng=self._rng)
        return self.fires[name].out_channels

    def _add_convdet(self, in_channels: int) -> None:
        self.convdet = Conv2D(in_channels, self.config.output_channels, 3, rng=self._rng, init_std=CONVDET_INIT_STD)

    def _check_input(self, x: np.ndarray) -> None:
        if x.ndim != 4 or x.shape[3] != 3:
            raise ops.ShapeError(f"Detector expects (N, H, W, 3) input, got {x.shape}")
        stride = self.config.grid_stride
        if x.shape[1] % stride:
            raise ValueError(f"Detector input height must be divisible by {stride}, got {x.shape[1]}")

    def _parametric(self) -> List[Tuple[str, Layer]]:
        return [("conv1", self.conv1)] + list(self.fires.items()) + [("convdet", self.convdet)]

    def _head(self, h: np.ndarray, training: bool) -> np.ndarray:
        out = self.convdet.forward(self.dropout.forward(h, training))
        ops.assert_finite("detector output", out)
        return out

    def _finish_backward(self, d: np.ndarray) -> np.ndarray:
        d = self.conv1.backward(self.relu1.backward(d))
        ops.assert_finite("detector input gradient", d)
        return d

    def parameters(self) -> Dict[str, np.ndarray]:
        named: Dict[str, np.ndarray] = {}
        for name, layer in self._parametric():
            named.update(layer.named_parameters(f"{name}."))
        return named

    def gradients(self) -> Dict[str, np.ndarray]:
        named: Dict[str, np.ndarray] = {}
        for name, layer in self._parametric():
            named.update(layer.named_gradients(f"{name}."))
        return named

    def descriptor(self) -> Dict[str, Any]:
        return {"kind": "detector", "config": self.config.model_dump(mode="json")}

    def astype(self, dtype) -> "SqueezeDetector":
        for _, layer in self._parametric():
            layer.astype(dtype)
        return self


class DiacriticDetector(SqueezeDetector):
    """Stride-1 conv1, no early pooling, two fire sets joined by a skip concat."""

    def __init__(self, config: DetectorConfig):
        super().__init__(config, conv1_stride=1, fire_specs=FIRE_SPECS)
        in_channels = CONV1_FILTERS
        for name in ("fire2", "fire3", "fire4", "fire5"):
            in_channels = self._add_fire(name, in_channels)
        self._skip_channels = self.fires["fire3"].out_channels
        in_channels = self._skip_channels + self.fires["fire5"].out_channels
        for name in ("fire6", "fire7", "fire8", "fire9", "fire10"):
            in_channels = self._add_fire(name, in_channels)
        self.pool1 = MaxPool2D(3, 2, "same")
        self.pool2 = MaxPool2D(3, 2, "same")
        self.pool_skip = MaxPool2D(3, 2, "same")
        self._add_convdet(in_channels)

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        self._check_input(x)
        f = self.fires
        h = self.relu1.forward(self.conv1.forward(x))
        h = f["fire3"].forward(f["fire2"].forward(h))
        first = self.pool1.forward(h)
        second = self.pool2.forward(f["fire5"].forward(f["fire4"].forward(first)))
        h, _ = ops.channel_concat_forward(self.pool_skip.forward(first), second)
        for name in ("fire6", "fire7", "fire8", "fire9", "fire10"):
            h = f[name].forward(h)
        return self._head(h, training)

    def backward(self, dout: np.ndarray) -> np.ndarray:
        f = self.fires
        d = self.dropout.backward(self.convdet.backward(dout))
        for name in ("fire10", "fire9", "fire8", "fire7", "fire6"):
            d = f[name].backward(d)
        d_skip, d_second = ops.channel_concat_backward(d, self._skip_channels)
        d_first = self.pool_skip.backward(d_skip)
        d_first = d_first + f["fire4"].backward(f["fire5"].backward(self.pool2.backward(d_second)))
        d = f["fire2"].backward(f["fire3"].backward(self.pool1.backward(d_first)))
        return self._finish_backward(d)


class SqueezeDetBaseline(SqueezeDetector):
    """conv1/2 -> pool1 -> fire2, fire3 -> pool3 -> fire4, fire5 -> pool5 -> fire6 .. fire11 -> convdet."""

    # fires followed by a max pool
    POOLED_AFTER = {"fire3": "pool3", "fire5": "pool5"}

    def __init__(self, config: DetectorConfig):
        super().__init__(config, conv1_stride=2, fire_specs=BASELINE_FIRE_SPECS)
        self.pools: Dict[str, MaxPool2D] = {name: MaxPool2D(3, 2, "same") for name in ("pool1", "pool3", "pool5")}
        in_channels = CONV1_FILTERS
        for name in BASELINE_FIRE_SPECS:
            in_channels = self._add_fire(name, in_channels)
        self._add_convdet(in_channels)

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        self._check_input(x)
        h = self.pools["pool1"].forward(self.relu1.forward(self.conv1.forward(x)))
        for name, fire in self.fires.items():
            h = fire.forward(h)
            if name in self.POOLED_AFTER:
                h = self.pools[self.POOLED_AFTER[name]].forward(h)
        return self._head(h, training)

    def backward(self, dout: np.ndarray) -> np.ndarray:
        d = self.dropout.backward(self.convdet.backward(dout))
        for name in reversed(list(self.fires)):
            if name in self.POOLED_AFTER:
                d = self.pools[self.POOLED_AFTER[name]].backward(d)
            d = self.fires[name].backward(d)
        return self._finish_backward(self.pools["pool1"].backward(d))


def build_detector(config: DetectorConfig) -> SqueezeDetector:
    if config.architecture == "squeezedet":
        return SqueezeDetBaseline(config)
    return DiacriticDetector(config)


register_architecture("detector", lambda descriptor: build_detector(DetectorConfig(**descriptor["config"])))
