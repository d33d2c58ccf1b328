"""
Checkpoint Format

Binary parameter snapshots::

    16 bytes   magic  b"GRASPMARLCKPT\\0\\0\\0"
     1 byte    format version
     4 bytes   descriptor length (uint32, little-endian)
     n bytes   UTF-8 JSON layout descriptor
     rest      parameters as little-endian float64
"""

import json
import struct
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from ...utils.constants import CHECKPOINT_MAGIC, CHECKPOINT_VERSION
from ...utils.exceptions import GraspError
from ...utils.logger import get_logger
from .params import ParamLayout, PolicyParams

logger = get_logger(__name__)

_HEADER = struct.Struct("<16sBI")


class CheckpointError(GraspError, ValueError):
    """A checkpoint file is malformed or of an unknown version."""


def write_checkpoint(path: Union[str, Path], params: PolicyParams,
                     metadata: Optional[Dict[str, Any]] = None) -> Path:
    """Write ``params`` (and optional JSON-serialisable metadata) to ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    descriptor = {
        "blocks": params.layout.to_descriptor(),
        "n_agents": params.n_agents,
        "metadata": metadata or {},
    }
    encoded = json.dumps(descriptor, sort_keys=True, separators=(",", ":")).encode("utf-8")
    payload = params.flat.astype("<f8").tobytes()
    with open(path, "wb") as f:
        f.write(_HEADER.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, len(encoded)))
        f.write(encoded)
        f.write(payload)
    logger.debug(f"Wrote checkpoint {path} ({params.layout.size} parameters)")
    return path


def read_checkpoint_with_metadata(path: Union[str, Path]) -> Tuple[PolicyParams, Dict[str, Any]]:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise CheckpointError(f"{path}: truncated header")
    magic, version, length = _HEADER.unpack_from(data, 0)
    if magic != CHECKPOINT_MAGIC:
        raise CheckpointError(f"{path}: not a GRASP-MARL checkpoint")
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")

    start = _HEADER.size
    try:
        descriptor = json.loads(data[start:start + length].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"{path}: corrupt layout descriptor ({e})") from e

    layout = ParamLayout.from_descriptor(descriptor["blocks"])
    payload = data[start + length:]
    if len(payload) != 8 * layout.size:
        raise CheckpointError(f"{path}: payload holds {len(payload) // 8} values, layout needs {layout.size}")
    flat = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    return PolicyParams(layout, flat, int(descriptor["n_agents"])), descriptor.get("metadata", {})


def read_checkpoint(path: Union[str, Path]) -> PolicyParams:
    """Load the parameters stored by :func:`write_checkpoint`."""
    params, _ = read_checkpoint_with_metadata(path)
    return params
