"""Pure-numpy implementations of the hot kernels.

Same contracts as the compiled `dfq._kernels` extension; selected as a
fallback at import time by `dfq.kernels`.
"""
from __future__ import annotations

import numpy as np

from .distributions import ModelKind, std_interval_moments

KIND_GAUSSIAN = 0
KIND_LAPLACE = 1

_KINDS = {KIND_GAUSSIAN: ModelKind.GAUSSIAN, KIND_LAPLACE: ModelKind.LAPLACE}


def _moments(kind: int, lo, hi):
    mass, m1, _ = std_interval_moments(_KINDS[kind], lo, hi)
    return mass, m1


def lloyd_iterate(kind, levels0, tol, max_iter, record=None):
    """Alternate conditional-mean level updates with midpoint boundary
    updates until the largest level change drops below `tol`.

    Returns (levels, interior_boundaries, iterations, converged, changes,
    drops) where `changes[t]` is the max level movement of iteration t and
    `drops[t]` is that iteration's exact distortion decrement, computed
    cancellation-free (level part: sum of mass * movement^2; boundary
    part: local integral between old and new boundary).
    """
    levels = np.array(levels0, dtype=float)
    inner = 0.5 * (levels[:-1] + levels[1:])
    changes = np.empty(max_iter)
    drops = np.empty(max_iter)
    converged = False
    iters = 0
    inf = np.inf
    for t in range(max_iter):
        lo = np.concatenate(([-inf], inner))
        hi = np.concatenate((inner, [inf]))
        mass, m1 = _moments(kind, lo, hi)
        new_levels = m1 / mass
        delta = new_levels - levels
        change = float(np.max(np.abs(delta)))
        level_drop = float(np.sum(mass * delta * delta))
        levels = new_levels
        new_inner = 0.5 * (levels[:-1] + levels[1:])
        if inner.size:
            lo_b = np.minimum(inner, new_inner)
            hi_b = np.maximum(inner, new_inner)
            mm, ss = _moments(kind, lo_b, hi_b)
            term = (levels[1:] - levels[:-1]) * (
                (levels[:-1] + levels[1:]) * mm - 2.0 * ss)
            term = np.where(new_inner < inner, -term, term)
            boundary_drop = float(np.sum(np.maximum(term, 0.0)))
        else:
            boundary_drop = 0.0
        inner = new_inner
        changes[t] = change
        drops[t] = level_drop + boundary_drop
        iters = t + 1
        if record is not None:
            record.append((levels.copy(), inner.copy()))
        if change < tol:
            converged = True
            break
    return levels, inner, iters, converged, changes[:iters].copy(), drops[:iters].copy()


def assign_codes(values, interior, offset, scale):
    """Map each value to its interval index; a value exactly on a boundary
    goes to the interval on the right."""
    z = (np.asarray(values, dtype=np.float64) - offset) / scale
    return np.searchsorted(interior, z, side="right").astype(np.uint32)


def pack_bits(codes, bits):
    """Pack codes little-endian, `bits` bits each, zero-padded to a byte."""
    codes = np.ascontiguousarray(codes, dtype=np.uint32)
    shifts = np.arange(bits, dtype=np.uint32)
    bitmat = ((codes[:, None] >> shifts) & np.uint32(1)).astype(np.uint8)
    return np.packbits(bitmat.ravel(), bitorder="little")


def unpack_bits(data, bits, count):
    """Inverse of pack_bits; `count` is the number of codes to recover."""
    data = np.frombuffer(bytes(data), dtype=np.uint8)
    stream = np.unpackbits(data, bitorder="little")
    needed = count * bits
    if stream.size < needed:
        raise ValueError("byte buffer too short for requested code count")
    bitmat = stream[:needed].reshape(count, bits).astype(np.uint64)
    weights = np.uint64(1) << np.arange(bits, dtype=np.uint64)
    return (bitmat @ weights).astype(np.uint32)
