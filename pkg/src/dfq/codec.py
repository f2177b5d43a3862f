"""Apply a quantizer spec to weight tensors: encode to M-bit codes, pack,
reconstruct, and serialize (QDFQ container format).
"""
from __future__ import annotations

import json
import struct
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from ._util import atomic_write_bytes
from .errors import (CodeOutOfRange, FileFormatError, NonFiniteValue,
                     ShapeMismatch)

__all__ = [
    "Tensor",
    "QuantizedTensor",
    "encode",
    "decode",
    "empirical_mse",
    "pack_codes",
    "unpack_codes",
    "write_qdfq",
    "read_qdfq",
]

QDFQ_MAGIC = b"QDFQ"
QDFQ_VERSION = 1


def _as_f32(name: str, values) -> np.ndarray:
    values = np.asarray(values)
    if values.dtype == np.float64:
        warnings.warn(f"tensor {name!r}: converting 64-bit floats to 32-bit",
                      stacklevel=3)
    values = values.astype(np.float32, copy=False).ravel()
    if not np.isfinite(values).all():
        raise NonFiniteValue(f"tensor {name!r} contains NaN or infinite values")
    return values


@dataclass(frozen=True)
class Tensor:
    """Named tensor with a flat 32-bit float payload."""

    name: str
    shape: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        values = _as_f32(self.name, self.values)
        if values.size != int(np.prod(shape, dtype=np.int64)):
            raise ShapeMismatch(
                f"tensor {self.name!r}: {values.size} values vs shape {shape}")
        values.flags.writeable = False
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "values", values)

    @property
    def size(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class QuantizedTensor:
    """Per-element codes plus the codebook in data coordinates."""

    name: str
    shape: tuple[int, ...]
    bits: int
    codes: np.ndarray
    codebook: np.ndarray

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        codes = np.ascontiguousarray(self.codes, dtype=np.uint32)
        codebook = np.asarray(self.codebook, dtype=np.float64)
        k = 2**self.bits
        if codebook.shape != (k,):
            raise ValueError(f"codebook must have {k} entries")
        if not (np.diff(codebook) > 0).all():
            raise ValueError("codebook must be strictly increasing")
        if codes.size and int(codes.max()) >= k:
            raise CodeOutOfRange(
                f"code {int(codes.max())} does not fit in {self.bits} bits")
        if codes.size != int(np.prod(shape, dtype=np.int64)):
            raise ShapeMismatch(
                f"quantized tensor {self.name!r}: {codes.size} codes vs shape {shape}")
        codes.flags.writeable = False
        codebook.flags.writeable = False
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "codebook", codebook)

    @property
    def size(self) -> int:
        return self.codes.size


def encode(tensor: Tensor, spec) -> QuantizedTensor:
    """Quantize a tensor with a (converged) spec.

    Values are standardized with the spec's offset/scale and assigned the
    interval they fall in; a value exactly on a boundary goes right.  With
    midpoint boundaries this is identical to nearest-level assignment.
    """
    codes = kernels.assign_codes(tensor.values, spec.interior_boundaries,
                                 spec.location_offset, spec.scale_factor)
    return QuantizedTensor(tensor.name, tensor.shape, spec.bits, codes,
                           spec.codebook())


def decode(q: QuantizedTensor) -> Tensor:
    """Reconstruct a tensor by codebook lookup (back to 32-bit floats)."""
    return Tensor(q.name, q.shape, q.codebook[q.codes].astype(np.float32))


def empirical_mse(original: Tensor, reconstructed: Tensor) -> float:
    if original.shape != reconstructed.shape:
        raise ShapeMismatch(
            f"{original.shape} vs {reconstructed.shape}")
    if original.size == 0:
        return 0.0
    diff = original.values.astype(np.float64) - reconstructed.values
    return float(np.mean(diff * diff))


def _check_codes(codes: np.ndarray, bits: int) -> np.ndarray:
    codes = np.ascontiguousarray(codes, dtype=np.uint32)
    if not 1 <= bits <= 16:
        raise CodeOutOfRange(f"bit width must be in [1, 16], got {bits}")
    if codes.size and int(codes.max()) >= 2**bits:
        raise CodeOutOfRange(f"code {int(codes.max())} needs more than {bits} bits")
    return codes


def pack_codes(codes, bits: int) -> bytes:
    """Bit-pack codes little-endian, `bits` bits each, padded to a byte."""
    codes = _check_codes(np.asarray(codes), bits)
    return kernels.pack_bits(codes, bits).tobytes()


def unpack_codes(data: bytes, bits: int, count: int) -> np.ndarray:
    """Exact inverse of pack_codes for `count` codes."""
    if not 1 <= bits <= 16:
        raise CodeOutOfRange(f"bit width must be in [1, 16], got {bits}")
    return kernels.unpack_bits(data, bits, count)


# ---------------------------------------------------------------------------
# QDFQ container: magic, version byte, u32 LE header length, JSON header,
# packed code bytes.  Codebook entries are serialized as decimal strings
# with 17 significant digits so the round-trip is bit-exact.
# ---------------------------------------------------------------------------

def qdfq_bytes(q: QuantizedTensor) -> bytes:
    packed = pack_codes(q.codes, q.bits)
    header = {
        "name": q.name,
        "shape": list(q.shape),
        "bits": q.bits,
        "codebook": [format(v, ".17g") for v in q.codebook],
        "code_bytes": len(packed),
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    return (QDFQ_MAGIC + bytes([QDFQ_VERSION]) + struct.pack("<I", len(blob))
            + blob + packed)


def write_qdfq(path, q: QuantizedTensor) -> None:
    atomic_write_bytes(path, qdfq_bytes(q))


def read_qdfq(path) -> QuantizedTensor:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != QDFQ_MAGIC:
            raise FileFormatError(f"{path}: bad magic {magic!r}")
        version = fh.read(1)
        if version != bytes([QDFQ_VERSION]):
            raise FileFormatError(f"{path}: unsupported version {version!r}")
        (hlen,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        packed = fh.read(header["code_bytes"])
        if len(packed) != header["code_bytes"]:
            raise FileFormatError(f"{path}: truncated code section")
    shape = tuple(header["shape"])
    count = int(np.prod(shape, dtype=np.int64))
    codes = unpack_codes(packed, header["bits"], count)
    codebook = np.array([float(s) for s in header["codebook"]])
    return QuantizedTensor(header["name"], shape, header["bits"], codes, codebook)
