"""PGM (Netpbm P2/P5) reading and writing, plus density and table exports.

Images are plain numpy arrays indexed ``[row, col]`` with the origin at the
top-left pixel. Gray images are ``uint8``, edge maps ``bool`` and density
images ``float64`` in ``[0, 1]``.
"""
from __future__ import annotations

import csv
import os

import numpy as np

from ._validation import check_density_image, check_edge_map, check_gray_image

__all__ = [
    "PGMError",
    "PGMHeaderError",
    "PGMMaxvalError",
    "PGMTruncatedError",
    "load_pgm",
    "save_pgm",
    "load_density_pgm",
    "save_density_pgm",
    "load_density_csv",
    "save_density_csv",
]

_WHITESPACE = b" \t\r\n\v\f"
_PLAIN_LINE_WIDTH = 70


class PGMError(ValueError):
    """Base class for PGM decoding failures."""


class PGMHeaderError(PGMError):
    """The magic number, dimensions or maxval field cannot be parsed."""


class PGMMaxvalError(PGMError):
    """The file's maxval exceeds what the caller accepts."""


class PGMTruncatedError(PGMError):
    """The file ends before all pixel samples were read."""


def _skip_space_and_comments(data, pos):
    n = len(data)
    while pos < n:
        ch = data[pos]
        if ch == 0x23:  # '#'
            end = data.find(b"\n", pos)
            pos = n if end < 0 else end + 1
        elif ch in _WHITESPACE:
            pos += 1
        else:
            break
    return pos


def _scan_word(data, pos):
    n = len(data)
    while pos < n and data[pos] not in _WHITESPACE and data[pos] != 0x23:
        pos += 1
    return pos


def _read_token(data, pos, what):
    start = _skip_space_and_comments(data, pos)
    pos = _scan_word(data, start)
    tok = data[start:pos]
    if not tok:
        raise PGMHeaderError(f"missing {what} in PGM header")
    try:
        value = int(tok)
    except ValueError:
        raise PGMHeaderError(f"invalid {what} {tok!r} in PGM header") from None
    return value, pos


def _decode(data, max_maxval):
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise PGMHeaderError(f"not a PGM file (magic {magic!r}, expected P2 or P5)")
    pos = 2
    if pos < len(data) and data[pos] not in _WHITESPACE and data[pos] != 0x23:
        raise PGMHeaderError("magic number must be followed by whitespace")
    width, pos = _read_token(data, pos, "width")
    height, pos = _read_token(data, pos, "height")
    maxval, pos = _read_token(data, pos, "maxval")
    if width <= 0 or height <= 0:
        raise PGMHeaderError(f"invalid dimensions {width}x{height}")
    if maxval <= 0 or maxval >= 65536:
        raise PGMHeaderError(f"invalid maxval {maxval}")
    if maxval > max_maxval:
        raise PGMMaxvalError(f"maxval {maxval} exceeds supported maximum {max_maxval}")

    count = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates maxval from the raster
        if pos >= len(data) or data[pos] not in _WHITESPACE:
            raise PGMTruncatedError("missing raster after P5 header")
        pos += 1
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
        need = count * dtype.itemsize
        raster = data[pos:pos + need]
        if len(raster) < need:
            raise PGMTruncatedError(
                f"expected {need} raster bytes, found {len(raster)}"
            )
        pixels = np.frombuffer(raster, dtype=dtype).astype(np.int64)
    else:
        tokens = []
        n = len(data)
        while len(tokens) < count:
            pos = _skip_space_and_comments(data, pos)
            if pos >= n:
                break
            start = pos
            pos = _scan_word(data, pos)
            tokens.append(data[start:pos])
        if len(tokens) < count:
            raise PGMTruncatedError(
                f"expected {count} samples, found {len(tokens)}"
            )
        try:
            pixels = np.array([int(t) for t in tokens], dtype=np.int64)
        except ValueError:
            raise PGMError("non-integer sample in P2 raster") from None
    if pixels.size and (pixels.min() < 0 or pixels.max() > maxval):
        raise PGMError(f"sample outside [0, {maxval}]")
    return pixels.reshape(height, width), maxval


def _read(path, max_maxval):
    with open(path, "rb") as fh:
        data = fh.read()
    return _decode(data, max_maxval)


def load_pgm(path):
    """Load an 8-bit PGM (P2 or P5) as a ``(height, width)`` ``uint8`` array.

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    PGMHeaderError
        If the header is malformed.
    PGMMaxvalError
        If maxval is above 255.
    PGMTruncatedError
        If the raster holds fewer samples than the header announces.
    """
    pixels, _ = _read(path, 255)
    return pixels.astype(np.uint8)


def _encode(pixels, maxval, binary):
    height, width = pixels.shape
    header = f"{'P5' if binary else 'P2'}\n{width} {height}\n{maxval}\n".encode("ascii")
    if binary:
        dtype = ">u2" if maxval > 255 else np.uint8
        return header + np.ascontiguousarray(pixels, dtype=dtype).tobytes()
    lines = []
    for row in pixels:
        line = ""
        for value in row:
            tok = str(int(value))
            if line and len(line) + 1 + len(tok) > _PLAIN_LINE_WIDTH:
                lines.append(line)
                line = tok
            else:
                line = f"{line} {tok}" if line else tok
        lines.append(line)
    return header + ("\n".join(lines) + "\n").encode("ascii")


def save_pgm(image, path, binary=True):
    """Write a gray image or edge map as an 8-bit PGM.

    Boolean edge maps are written as 255 for edge and 0 otherwise; gray
    images are written verbatim. The header carries no comments.
    """
    arr = np.asarray(image)
    if arr.dtype == bool:
        pixels = np.where(check_edge_map(arr), 255, 0).astype(np.uint8)
    else:
        pixels = check_gray_image(arr)
    payload = _encode(pixels, 255, binary)
    with open(path, "wb") as fh:
        fh.write(payload)


def save_density_pgm(density, path):
    """Write a density image as a 16-bit P5 PGM, value ``round(d * 65535)``."""
    d = check_density_image(density)
    pixels = np.rint(d * 65535.0).astype(np.uint16)
    with open(path, "wb") as fh:
        fh.write(_encode(pixels, 65535, True))


def load_density_pgm(path):
    """Read a density PGM written by :func:`save_density_pgm` back to floats."""
    pixels, maxval = _read(path, 65535)
    return pixels.astype(np.float64) / float(maxval)


def save_density_csv(density, path):
    """Write raw density doubles, one CSV row per image row.

    Each value uses Python's shortest round-trip float representation, so
    :func:`load_density_csv` recovers the array bit for bit.
    """
    d = check_density_image(density)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in d:
            writer.writerow([repr(float(v)) for v in row])


def load_density_csv(path):
    with open(path, newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    if not rows or len({len(r) for r in rows}) != 1:
        raise ValueError(f"{os.fspath(path)}: ragged or empty density CSV")
    return np.array(rows, dtype=np.float64)
