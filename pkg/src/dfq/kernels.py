"""Backend dispatch for the hot kernels.

Prefers the compiled extension; falls back to the numpy implementations.
Set DFQ_FORCE_PY=1 to force the fallback (used by the benchmark and by
tests that exercise both paths).
"""
from __future__ import annotations

import os

from . import _kernels_py
from .distributions import ModelKind

KIND_GAUSSIAN = _kernels_py.KIND_GAUSSIAN
KIND_LAPLACE = _kernels_py.KIND_LAPLACE

if os.getenv("DFQ_FORCE_PY") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"


def kind_code(kind: ModelKind) -> int:
    return KIND_GAUSSIAN if kind is ModelKind.GAUSSIAN else KIND_LAPLACE


def lloyd_iterate(kind, levels0, tol, max_iter, record=None):
    # state recording is only supported by the python implementation
    impl = _kernels_py if record is not None else _impl
    return impl.lloyd_iterate(kind, levels0, tol, max_iter, record=record)


def assign_codes(values, interior, offset, scale):
    return _impl.assign_codes(values, interior, offset, scale)


def pack_bits(codes, bits):
    return _impl.pack_bits(codes, bits)


def unpack_bits(data, bits, count):
    return _impl.unpack_bits(data, bits, count)
