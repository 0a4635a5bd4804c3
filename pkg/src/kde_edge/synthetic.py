"""Reproducible synthetic gray images used as test fixtures and demos."""
from __future__ import annotations

import numpy as np

__all__ = [
    "make_step",
    "make_constant",
    "make_checkerboard",
    "make_noise",
    "make_diagonal_step",
    "make_disk",
]


def _check_dims(width, height):
    if int(width) != width or int(height) != height or width < 1 or height < 1:
        raise ValueError(f"dimensions must be positive integers, got {width}x{height}")
    return int(width), int(height)


def _check_level(value, name):
    if int(value) != value or not 0 <= value <= 255:
        raise ValueError(f"{name} must be a gray level in [0, 255], got {value}")
    return int(value)


def make_step(width, height, low, high, split_col):
    """Vertical step: columns ``< split_col`` are ``low``, the rest ``high``.

    >>> make_step(4, 1, 0, 255, 2).tolist()
    [[0, 0, 255, 255]]
    """
    width, height = _check_dims(width, height)
    low = _check_level(low, "low")
    high = _check_level(high, "high")
    if not 0 < split_col < width:
        raise ValueError(f"split_col must satisfy 0 < split_col < {width}, got {split_col}")
    image = np.full((height, width), high, dtype=np.uint8)
    image[:, :split_col] = low
    return image


def make_constant(width, height, value):
    width, height = _check_dims(width, height)
    return np.full((height, width), _check_level(value, "value"), dtype=np.uint8)


def make_checkerboard(width, height, low, high, cell):
    """Checkerboard of ``cell``-pixel squares, ``low`` at the top-left."""
    width, height = _check_dims(width, height)
    low = _check_level(low, "low")
    high = _check_level(high, "high")
    if cell < 1:
        raise ValueError("cell must be at least 1 pixel")
    rows, cols = np.indices((height, width))
    parity = (rows // cell + cols // cell) % 2
    return np.where(parity == 0, low, high).astype(np.uint8)


def make_noise(width, height, seed, low=0, high=255):
    """Uniform integer noise in ``[low, high]`` from a seeded PCG64 generator."""
    width, height = _check_dims(width, height)
    low = _check_level(low, "low")
    high = _check_level(high, "high")
    if low > high:
        raise ValueError("low must not exceed high")
    rng = np.random.default_rng(seed)
    return rng.integers(low, high, size=(height, width), endpoint=True, dtype=np.uint8)


def make_diagonal_step(size, low, high):
    """Square image split along the anti-diagonal.

    Pixel ``(r, c)`` is ``high`` when ``r + c >= size`` and ``low`` otherwise.
    """
    size, _ = _check_dims(size, size)
    low = _check_level(low, "low")
    high = _check_level(high, "high")
    rows, cols = np.indices((size, size))
    return np.where(rows + cols >= size, high, low).astype(np.uint8)


def make_disk(size, radius, low, high):
    """Filled disk of ``high`` centred in a ``size``x``size`` image of ``low``."""
    size, _ = _check_dims(size, size)
    low = _check_level(low, "low")
    high = _check_level(high, "high")
    if radius <= 0:
        raise ValueError("radius must be positive")
    rows, cols = np.indices((size, size))
    centre = (size - 1) / 2.0
    inside = (rows - centre) ** 2 + (cols - centre) ** 2 <= radius ** 2
    return np.where(inside, high, low).astype(np.uint8)
