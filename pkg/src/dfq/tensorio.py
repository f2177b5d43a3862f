"""QTNS tensor files and the manifest that indexes them.

QTNS layout: magic "QTNS", version byte, u32 LE header length, JSON
header {name, dtype: "f32", shape}, then raw little-endian float32 data.
The manifest is a JSON document listing tensors with per-file sha256.
"""
from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._util import atomic_write_bytes
from .codec import Tensor
from .errors import FileFormatError, ManifestError

__all__ = [
    "write_qtns",
    "read_qtns",
    "ManifestEntry",
    "Manifest",
    "load_manifest",
    "save_manifest",
    "sha256_file",
]

QTNS_MAGIC = b"QTNS"
QTNS_VERSION = 1


def write_qtns(path, tensor: Tensor) -> None:
    header = {"name": tensor.name, "dtype": "f32", "shape": list(tensor.shape)}
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    data = (QTNS_MAGIC + bytes([QTNS_VERSION]) + struct.pack("<I", len(blob))
            + blob + tensor.values.astype("<f4").tobytes())
    atomic_write_bytes(path, data)


def read_qtns(path) -> Tensor:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != QTNS_MAGIC:
            raise FileFormatError(f"{path}: bad magic {magic!r}")
        version = fh.read(1)
        if version != bytes([QTNS_VERSION]):
            raise FileFormatError(f"{path}: unsupported version {version!r}")
        raw = fh.read(4)
        if len(raw) != 4:
            raise FileFormatError(f"{path}: truncated header")
        (hlen,) = struct.unpack("<I", raw)
        try:
            header = json.loads(fh.read(hlen).decode("utf-8"))
        except ValueError as exc:
            raise FileFormatError(f"{path}: bad header JSON: {exc}") from exc
        if header.get("dtype") != "f32":
            raise FileFormatError(f"{path}: unsupported dtype {header.get('dtype')!r}")
        shape = tuple(int(s) for s in header["shape"])
        count = int(np.prod(shape, dtype=np.int64))
        payload = fh.read(4 * count)
        if len(payload) != 4 * count:
            raise FileFormatError(f"{path}: truncated data section")
    values = np.frombuffer(payload, dtype="<f4")
    return Tensor(header["name"], shape, values)


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    shape: tuple[int, ...]
    file: str
    sha256: str


@dataclass(frozen=True)
class Manifest:
    model_name: str
    tensors: tuple[ManifestEntry, ...]
    base_dir: Path

    def tensor_path(self, entry: ManifestEntry) -> Path:
        return self.base_dir / entry.file


def load_manifest(path, validate: bool = True) -> Manifest:
    """Parse and (by default) validate a manifest: unique names, files
    present, hashes matching."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text("utf-8"))
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    except ValueError as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}") from exc
    try:
        entries = tuple(
            ManifestEntry(t["name"], tuple(int(s) for s in t["shape"]),
                          t["file"], t["sha256"])
            for t in doc["tensors"])
        manifest = Manifest(doc["model_name"], entries, path.parent)
    except (KeyError, TypeError) as exc:
        raise ManifestError(f"manifest {path} is malformed: {exc}") from exc
    names = [e.name for e in entries]
    if len(set(names)) != len(names):
        raise ManifestError(f"manifest {path} has duplicate tensor names")
    if validate:
        for entry in entries:
            fpath = manifest.tensor_path(entry)
            if not fpath.is_file():
                raise ManifestError(f"missing tensor file: {fpath}")
            actual = sha256_file(fpath)
            if actual != entry.sha256:
                raise ManifestError(
                    f"sha256 mismatch for {fpath}: {actual} != {entry.sha256}")
    return manifest


def save_manifest(path, model_name: str, entries: list[ManifestEntry]) -> None:
    doc = {
        "model_name": model_name,
        "tensors": [
            {"name": e.name, "shape": list(e.shape), "file": e.file,
             "sha256": e.sha256}
            for e in entries
        ],
    }
    atomic_write_bytes(path, (json.dumps(doc, indent=2, sort_keys=True) + "\n")
                       .encode("utf-8"))
