"""Binary checkpoint / snapshot layout.

Little-endian header::

    magic    4s   b"CCPS"
    version  u32  1
    dim      u32  1 or 2
    nx, ny   u64  cells per axis (ny = 1 for one-dimensional grids)
    t        f64
    step     u64

followed by the raw float64 little-endian arrays u, v, w in row-major order.
"""
import struct

import numpy as np

from .model import FieldState

MAGIC = b"CCPS"
VERSION = 1
_HEADER = struct.Struct("<4sIIQQdQ")


def write_state(path, state: FieldState, step: int):
    shape = state.u.shape
    if len(shape) not in (1, 2):
        raise ValueError("only 1-D and 2-D grids are supported")
    nx = shape[0]
    ny = shape[1] if len(shape) == 2 else 1
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, len(shape), nx, ny, state.t, step))
        for arr in (state.u, state.v, state.w):
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes(order="C"))


def read_state(path):
    """Return ``(state, step)``."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, version, dim, nx, ny, t, step = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: not a checkpoint file")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported format version {version}")
    shape = (nx,) if dim == 1 else (nx, ny)
    count = nx * ny
    body = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if body.size != 3 * count:
        raise ValueError(f"{path}: expected {3 * count} values, found {body.size}")
    u, v, w = (body[i * count:(i + 1) * count].reshape(shape).astype(np.float64) for i in range(3))
    return FieldState(u, v, w, t), int(step)
