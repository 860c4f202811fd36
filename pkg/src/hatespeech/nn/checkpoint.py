"""Binary model checkpoints.

Layout (all integers little-endian)::

    u64 header_len | header (UTF-8 ``key=value`` lines)
    per tensor, in the order listed by the ``tensors`` header key:
        u32 ndim | ndim x u64 dims | float64 data, row-major
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import CheckpointError
from .model import ModelConfig, param_names

MAGIC = "hatespeech-checkpoint/1"


def _encode_header(entries):
    lines = []
    for key, value in entries.items():
        value = str(value)
        if "\n" in value or "=" in key:
            raise ValueError(f"cannot store header entry {key!r}")
        lines.append(f"{key}={value}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def save_checkpoint(path, config: ModelConfig, params, meta=None):
    """Write ``config``, ``params`` and free-form ``meta`` strings to ``path``."""
    names = param_names(config)
    entries = {"format": MAGIC}
    entries.update({f"config.{k}": v for k, v in config.to_dict().items()})
    entries.update({f"meta.{k}": v for k, v in (meta or {}).items()})
    entries["tensors"] = ",".join(names)
    header = _encode_header(entries)
    parts = [struct.pack("<Q", len(header)), header]
    for name in names:
        arr = np.ascontiguousarray(params[name], dtype="<f8")
        parts.append(struct.pack(f"<I{arr.ndim}Q", arr.ndim, *arr.shape))
        parts.append(arr.tobytes())
    Path(path).write_bytes(b"".join(parts))


def load_checkpoint(path):
    """Returns ``(config, params, meta)``."""
    blob = Path(path).read_bytes()
    try:
        (hlen,) = struct.unpack_from("<Q", blob, 0)
        header = blob[8: 8 + hlen].decode("utf-8")
    except (struct.error, UnicodeDecodeError) as exc:
        raise CheckpointError(f"{path}: unreadable header ({exc})") from None
    entries = dict(line.split("=", 1) for line in header.splitlines() if "=" in line)
    if entries.get("format") != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint file")
    config = ModelConfig.from_dict(
        {k[7:]: v for k, v in entries.items() if k.startswith("config.")})
    meta = {k[5:]: v for k, v in entries.items() if k.startswith("meta.")}
    params = {}
    offset = 8 + hlen
    try:
        for name in entries["tensors"].split(","):
            (ndim,) = struct.unpack_from("<I", blob, offset)
            shape = struct.unpack_from(f"<{ndim}Q", blob, offset + 4)
            offset += 4 + 8 * ndim
            count = int(np.prod(shape))
            data = np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
            params[name] = data.astype(np.float64).reshape(shape)
            offset += 8 * count
    except (struct.error, ValueError) as exc:
        raise CheckpointError(f"{path}: truncated tensor data ({exc})") from None
    if offset != len(blob):
        raise CheckpointError(f"{path}: {len(blob) - offset} trailing bytes")
    if list(params) != param_names(config):
        raise CheckpointError(f"{path}: tensors do not match the stored config")
    return config, params, meta
