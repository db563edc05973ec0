"""Binary PNM image files: P5 graymaps for mean images, P4 bitmaps for
binary images.  Round-trips are bit exact."""

from __future__ import annotations

from contextlib import contextmanager

import numpy as np


@contextmanager
def _writable(path):
    """Accept a filesystem path or an open binary file object."""
    if hasattr(path, "write"):
        yield path
    else:
        with open(path, "wb") as f:
            yield f


@contextmanager
def _readable(path):
    if hasattr(path, "read"):
        yield path
    else:
        with open(path, "rb") as f:
            yield f


def _read_header(data: bytes, magic: bytes, n_fields: int):
    if not data.startswith(magic):
        raise ValueError(f"expected {magic!r} file")
    fields = []
    pos = 2
    while len(fields) < n_fields:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(int(data[start:pos]))
    return fields, pos + 1  # single whitespace after the last field


def write_pgm(path, mean: np.ndarray) -> None:
    """Mean image as binary P5, probabilities quantized to maxval 255."""
    mean = np.asarray(mean, dtype=float)
    if mean.ndim != 2:
        raise ValueError("mean image must be 2D")
    data = np.rint(mean * 255.0).astype(np.uint8)
    h, w = data.shape
    with _writable(path) as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(data.tobytes())


def read_pgm(path) -> np.ndarray:
    """P5 graymap back to floats in [0, 1] (value / maxval)."""
    with _readable(path) as f:
        data = f.read()
    (w, h, maxval), offset = _read_header(data, b"P5", 3)
    raw = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=offset)
    return raw.reshape(h, w).astype(float) / maxval


def write_pbm(path, image: np.ndarray) -> None:
    """Binary image as packed P4; True means black."""
    image = np.asarray(image, dtype=bool)
    if image.ndim != 2:
        raise ValueError("binary image must be 2D")
    h, w = image.shape
    packed = np.packbits(image, axis=1)
    with _writable(path) as f:
        f.write(b"P4\n%d %d\n" % (w, h))
        f.write(packed.tobytes())


def read_pbm(path) -> np.ndarray:
    """Packed P4 back to a boolean array (True = black)."""
    with _readable(path) as f:
        data = f.read()
    (w, h), offset = _read_header(data, b"P4", 2)
    row_bytes = (w + 7) // 8
    raw = np.frombuffer(data, dtype=np.uint8, count=h * row_bytes, offset=offset)
    bits = np.unpackbits(raw.reshape(h, row_bytes), axis=1)[:, :w]
    return bits.astype(bool)
