"""
Binary model files.

Layout (little-endian):
    b"DKRT" | u16 version | u32 descriptor length | descriptor (UTF-8 JSON)
    | u32 tensor count | per tensor: u16 name length, name (UTF-8),
    u8 rank, rank x u32 dims, float32 data
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Any, BinaryIO, Callable, Dict, Tuple

import numpy as np

from app.nn.network import Network
from app.utils.logger import get_logger

logger = get_logger()

MAGIC = b"DKRT"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    """The file is not a readable model."""


class ModelVersionError(ModelFormatError):
    """Bad magic bytes or an unsupported format version."""


class ModelTruncatedError(ModelFormatError):
    """The file ends before the declared content."""


class ModelShapeError(ModelFormatError):
    """Stored tensors disagree with the architecture they are loaded into."""


# kind -> builder(descriptor) returning an untrained network of that architecture
_ARCHITECTURES: Dict[str, Callable[[Dict[str, Any]], Network]] = {}


def register_architecture(kind: str, builder: Callable[[Dict[str, Any]], Network]) -> None:
    _ARCHITECTURES[kind] = builder


def _read_exact(handle: BinaryIO, size: int, what: str) -> bytes:
    data = handle.read(size)
    if len(data) != size:
        raise ModelTruncatedError(f"model file truncated while reading {what}: wanted {size} bytes, got {len(data)}")
    return data


def save_model(network: Network, path: Path) -> int:
    """Write ``network`` to ``path``; returns the file size in bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    descriptor = json.dumps(network.descriptor(), sort_keys=True, ensure_ascii=False).encode("utf-8")
    params = network.parameters()

    with path.open("wb") as handle:
        handle.write(MAGIC)
        handle.write(struct.pack("<H", FORMAT_VERSION))
        handle.write(struct.pack("<I", len(descriptor)))
        handle.write(descriptor)
        handle.write(struct.pack("<I", len(params)))
        for name, tensor in params.items():
            encoded = name.encode("utf-8")
            handle.write(struct.pack("<H", len(encoded)))
            handle.write(encoded)
            handle.write(struct.pack("<B", tensor.ndim))
            handle.write(struct.pack(f"<{tensor.ndim}I", *tensor.shape))
            handle.write(np.ascontiguousarray(tensor, dtype="<f4").tobytes())

    size = path.stat().st_size
    logger.info(f"MODEL SAVED | path={path} | kind={network.descriptor().get('kind')} | tensors={len(params)} | bytes={size}")
    return size


def read_model_file(path: Path) -> Tuple[Dict[str, Any], Dict[str, np.ndarray]]:
    """Parse a model file into its descriptor and named float32 tensors."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Model file not found: {path}")

    with path.open("rb") as handle:
        magic = _read_exact(handle, 4, "magic")
        if magic != MAGIC:
            raise ModelVersionError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        (version,) = struct.unpack("<H", _read_exact(handle, 2, "version"))
        if version != FORMAT_VERSION:
            raise ModelVersionError(f"{path}: unsupported format version {version} (this build reads {FORMAT_VERSION})")
        (desc_len,) = struct.unpack("<I", _read_exact(handle, 4, "descriptor length"))
        try:
            descriptor = json.loads(_read_exact(handle, desc_len, "descriptor").decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ModelFormatError(f"{path}: descriptor is not valid UTF-8 JSON: {exc}") from exc

        (count,) = struct.unpack("<I", _read_exact(handle, 4, "tensor count"))
        tensors: Dict[str, np.ndarray] = {}
        for i in range(count):
            (name_len,) = struct.unpack("<H", _read_exact(handle, 2, f"tensor {i} name length"))
            name = _read_exact(handle, name_len, f"tensor {i} name").decode("utf-8")
            (rank,) = struct.unpack("<B", _read_exact(handle, 1, f"'{name}' rank"))
            dims = struct.unpack(f"<{rank}I", _read_exact(handle, 4 * rank, f"'{name}' dims"))
            n_bytes = 4 * int(np.prod(dims, dtype=np.int64))
            raw = _read_exact(handle, n_bytes, f"'{name}' data")
            tensors[name] = np.frombuffer(raw, dtype="<f4").reshape(dims).astype(np.float32)

        if handle.read(1):
            raise ModelFormatError(f"{path}: trailing bytes after {count} tensors")

    return descriptor, tensors


def assign_parameters(network: Network, tensors: Dict[str, np.ndarray]) -> Network:
    """Copy stored tensors into ``network``'s parameter arrays, checking names and shapes."""
    params = network.parameters()
    missing = sorted(set(params) - set(tensors))
    extra = sorted(set(tensors) - set(params))
    if missing or extra:
        raise ModelShapeError(f"parameter names disagree: missing={missing[:5]} unexpected={extra[:5]}")
    for name, target in params.items():
        source = tensors[name]
        if source.shape != target.shape:
            raise ModelShapeError(f"parameter '{name}': stored shape {source.shape} vs architecture {target.shape}")
        target[...] = source
    return network


def load_model(path: Path) -> Network:
    """Rebuild the network described in ``path`` and load its weights."""
    descriptor, tensors = read_model_file(path)
    kind = descriptor.get("kind")
    builder = _ARCHITECTURES.get(kind)
    if builder is None:
        raise ModelFormatError(f"{path}: unknown architecture kind '{kind}' (known: {sorted(_ARCHITECTURES)})")
    network = assign_parameters(builder(descriptor), tensors)
    logger.info(f"MODEL LOADED | path={path} | kind={kind} | tensors={len(tensors)}")
    return network
