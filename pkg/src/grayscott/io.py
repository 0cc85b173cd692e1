"""Snapshot persistence and image export.

Snapshot files (``.gsf``) are little-endian regardless of the host:

======  =======  ==========================================
offset  type     content
======  =======  ==========================================
0       4 bytes  magic ``b"GSF1"``
4       u32      ``nx``
8       u32      ``ny``
12      u64      ``step``
20      f64      ``dt``
28      f64[]    ``u`` then ``v``, row-major, ``nx * ny`` each
======  =======  ==========================================
"""

import os
from typing import Union

import jax.numpy as jnp
import numpy as np

from . import grid
from .exceptions import ParameterError, SnapshotFormatError
from .integrator import SimState

PathLike = Union[str, os.PathLike]

MAGIC = b"GSF1"
HEADER_DTYPE = np.dtype(
    [
        ("magic", "S4"),
        ("nx", "<u4"),
        ("ny", "<u4"),
        ("step", "<u8"),
        ("dt", "<f8"),
    ]
)
DATA_DTYPE = np.dtype("<f8")

# refuse headers announcing more cells than this per field
MAX_CELLS = 1 << 28


def snapshot_size(nx: int, ny: int) -> int:
    """Exact size in bytes of a snapshot of an ``nx x ny`` state."""
    return HEADER_DTYPE.itemsize + 2 * nx * ny * DATA_DTYPE.itemsize


def write_snapshot(s: SimState, path: PathLike, dt: float):
    """
    Write a state to a snapshot file.

    Parameters
    ----------
    s :
        The state.
    path :
        Destination file; its directory must exist.
    dt :
        Time step of the run, stored so that ``time = step * dt`` can be restored.

    Raises
    ------
    OSError
        If the file cannot be written.
    """
    nx, ny = s.u.shape
    header = np.zeros((), dtype=HEADER_DTYPE)
    header["magic"] = MAGIC
    header["nx"] = nx
    header["ny"] = ny
    header["step"] = s.step
    header["dt"] = dt
    u = np.asarray(s.u, dtype=DATA_DTYPE)
    v = np.asarray(s.v, dtype=DATA_DTYPE)
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        fh.write(u.tobytes(order="C"))
        fh.write(v.tobytes(order="C"))


def read_snapshot(path: PathLike) -> SimState:
    """
    Read a snapshot file back into a state.

    The round trip with :func:`write_snapshot` is bit-exact.

    Parameters
    ----------
    path :
        Snapshot file.

    Returns
    -------
    :
        The stored state, with ``time = step * dt``.

    Raises
    ------
    SnapshotFormatError
        On a bad magic number, a dimension overflow, or a file whose length does
        not match its header.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < HEADER_DTYPE.itemsize:
        raise SnapshotFormatError(f"{path}: truncated header ({len(raw)} bytes).")
    header = np.frombuffer(raw, dtype=HEADER_DTYPE, count=1)[0]
    if bytes(header["magic"]) != MAGIC:
        raise SnapshotFormatError(
            f"{path}: bad magic {bytes(header['magic'])!r}, expected {MAGIC!r}."
        )
    nx, ny = int(header["nx"]), int(header["ny"])
    if nx < 1 or ny < 1 or nx * ny > MAX_CELLS:
        raise SnapshotFormatError(f"{path}: invalid dimensions {nx}x{ny}.")
    expected = snapshot_size(nx, ny)
    if len(raw) != expected:
        raise SnapshotFormatError(
            f"{path}: expected {expected} bytes for a {nx}x{ny} snapshot, found {len(raw)}."
        )
    data = np.frombuffer(raw, dtype=DATA_DTYPE, offset=HEADER_DTYPE.itemsize)
    u = data[: nx * ny].reshape(nx, ny).astype(np.float64)
    v = data[nx * ny :].reshape(nx, ny).astype(np.float64)
    step, dt = int(header["step"]), float(header["dt"])
    return SimState(jnp.asarray(u), jnp.asarray(v), step, step * dt)


def read_snapshot_dt(path: PathLike) -> float:
    """Time step stored in a snapshot header."""
    with open(path, "rb") as fh:
        raw = fh.read(HEADER_DTYPE.itemsize)
    if len(raw) < HEADER_DTYPE.itemsize:
        raise SnapshotFormatError(f"{path}: truncated header ({len(raw)} bytes).")
    return float(np.frombuffer(raw, dtype=HEADER_DTYPE, count=1)[0]["dt"])


def to_pixels(f: grid.Field, lo: float, hi: float) -> np.ndarray:
    """Map a field to 8-bit gray levels ``round(255 clamp((f - lo) / (hi - lo), 0, 1))``."""
    if not lo < hi:
        raise ParameterError(f"Image window must satisfy lo < hi. Got lo={lo}, hi={hi}.")
    scaled = np.clip((np.asarray(f, dtype=np.float64) - lo) / (hi - lo), 0.0, 1.0)
    # round half up
    return np.floor(255.0 * scaled + 0.5).astype(np.uint8)


def export_image(f: grid.Field, path: PathLike, lo: float, hi: float):
    """
    Write a field as a binary 8-bit PGM (P5) image.

    Row ``i`` of the field is image row ``i`` and column ``j`` is image column ``j``.

    Parameters
    ----------
    f :
        Field to render.
    path :
        Destination file.
    lo, hi :
        Values mapped to black and white.

    Raises
    ------
    ParameterError
        If ``lo >= hi``.
    """
    pixels = to_pixels(f, lo, hi)
    height, width = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes(order="C"))


def read_image(path: PathLike) -> np.ndarray:
    """Read back a P5 image written by :func:`export_image`."""
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, dims, maxval, data = raw.split(b"\n", 3)
    if magic != b"P5" or maxval != b"255":
        raise SnapshotFormatError(f"{path}: not an 8-bit P5 image.")
    width, height = (int(x) for x in dims.split())
    return np.frombuffer(data, dtype=np.uint8).reshape(height, width)
