"""Hyper-parameters of the diacritic detector."""

from __future__ import annotations

from typing import Dict, List, Literal, Tuple

from pydantic import BaseModel, Field, model_validator

from app.diacritics import NUM_DIACRITICS

# w in {5, 7, 9} x h in {10, 13, 16}; replaced by fitted shapes when training on a corpus
DEFAULT_ANCHOR_SHAPES: List[Tuple[float, float]] = [(w, h) for w in (5.0, 7.0, 9.0) for h in (10.0, 13.0, 16.0)]

# output stride of each architecture; "squeezedet" is the stock network, kept as a baseline
GRID_STRIDES: Dict[str, int] = {"diacritic": 4, "squeezedet": 16}


class DetectorConfig(BaseModel):
    architecture: Literal["diacritic", "squeezedet"] = "diacritic"
    anchors_per_cell: int = Field(9, ge=1)
    num_classes: int = Field(NUM_DIACRITICS, ge=1)
    nms_threshold: float = Field(0.2, gt=0.0, lt=1.0)
    confidence_threshold: float = Field(0.25, gt=0.0, lt=1.0, description="Minimum sigmoid confidence kept after NMS")
    top_n: int = Field(64, ge=1, description="Candidates kept before NMS")
    dropout: float = Field(0.5, ge=0.0, lt=1.0)

    lr: float = Field(0.01, gt=0.0)
    decay: float = Field(1e-4, ge=0.0)
    momentum: float = Field(0.9, ge=0.0, lt=1.0)
    max_grad_norm: float = Field(10.0, ge=0.0, description="0 disables clipping")
    batch_size: int = Field(16, ge=1)

    loss_bbox: float = Field(5.0, ge=0.0)
    loss_conf_pos: float = Field(75.0, ge=0.0)
    loss_conf_neg: float = Field(100.0, ge=0.0)

    width_multiplier: float = Field(0.25, gt=0.0, le=1.0, description="Scales fire-layer channel counts")
    anchor_shapes: List[Tuple[float, float]] = Field(default_factory=lambda: list(DEFAULT_ANCHOR_SHAPES))
    seed: int = 0

    @model_validator(mode="after")
    def _check_anchor_shapes(self) -> "DetectorConfig":
        if len(self.anchor_shapes) != self.anchors_per_cell:
            raise ValueError(
                f"anchor_shapes has {len(self.anchor_shapes)} entries, anchors_per_cell is {self.anchors_per_cell}"
            )
        if any(w <= 0 or h <= 0 for w, h in self.anchor_shapes):
            raise ValueError(f"anchor shapes must be positive: {self.anchor_shapes}")
        return self

    @property
    def grid_stride(self) -> int:
        return GRID_STRIDES[self.architecture]

    @property
    def channels_per_anchor(self) -> int:
        """Class logits, one confidence logit, four box deltas."""
        return self.num_classes + 5

    @property
    def output_channels(self) -> int:
        return self.anchors_per_cell * self.channels_per_anchor
