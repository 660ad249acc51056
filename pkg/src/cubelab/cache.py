"""Binary cache files for solver tables.

Layout:  8 magic bytes, u32 header length, JSON header, raw array payload.
The header records the format version plus name/dtype/shape/sha256 for every
array; a checksum mismatch or version change raises CacheCorrupt and callers
fall back to rebuilding.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
from pathlib import Path

import numpy as np

from .cube import CubeError

MAGIC = b"CUBETBL\x00"


class CacheCorrupt(CubeError):
    pass


def default_table_dir() -> Path:
    override = os.environ.get("CUBELAB_TABLE_DIR")
    if override:
        return Path(override)
    return Path.home() / ".cache" / "cubelab"


def save_arrays(path: Path, version: str, arrays: dict[str, np.ndarray]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    entries = []
    payload = bytearray()
    for name, arr in arrays.items():
        arr = np.ascontiguousarray(arr)
        raw = arr.tobytes()
        entries.append({
            "name": name,
            "dtype": str(arr.dtype),
            "shape": list(arr.shape),
            "sha256": hashlib.sha256(raw).hexdigest(),
            "offset": len(payload),
            "nbytes": len(raw),
        })
        payload.extend(raw)
    header = json.dumps({"version": version, "arrays": entries}).encode()
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(payload)
    os.replace(tmp, path)


def load_arrays(path: Path, version: str) -> dict[str, np.ndarray]:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            if fh.read(8) != MAGIC:
                raise CacheCorrupt(f"{path}: bad magic bytes")
            (hlen,) = struct.unpack("<I", fh.read(4))
            header = json.loads(fh.read(hlen))
            if header.get("version") != version:
                raise CacheCorrupt(f"{path}: version {header.get('version')!r} != {version!r}")
            payload = fh.read()
    except (OSError, ValueError, struct.error) as exc:
        raise CacheCorrupt(f"{path}: unreadable ({exc})") from exc
    out = {}
    for ent in header["arrays"]:
        raw = payload[ent["offset"]:ent["offset"] + ent["nbytes"]]
        if len(raw) != ent["nbytes"]:
            raise CacheCorrupt(f"{path}: truncated payload for {ent['name']}")
        if hashlib.sha256(raw).hexdigest() != ent["sha256"]:
            raise CacheCorrupt(f"{path}: checksum mismatch for {ent['name']}")
        out[ent["name"]] = np.frombuffer(raw, dtype=ent["dtype"]).reshape(ent["shape"]).copy()
    return out


def file_checksum(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
