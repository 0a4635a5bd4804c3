"""Input validation helpers shared by detectors, metrics and I/O."""
from __future__ import annotations

import numpy as np


def check_gray_image(image, name="image"):
    """Validate a grayscale image and return it as a 2-D ``uint8`` array.

    Accepts any integer or float array whose values are whole numbers in
    ``[0, 255]``. Boolean edge maps are rejected so that a 0/1 map is never
    silently read as a nearly black image.
    """
    arr = np.asarray(image)
    if arr.dtype == bool:
        raise TypeError(f"{name} is a boolean edge map, expected gray levels")
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D (height, width), got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must have at least one pixel, got shape {arr.shape}")
    if arr.dtype == np.uint8:
        return arr
    if not np.issubdtype(arr.dtype, np.number):
        raise TypeError(f"{name} has non-numeric dtype {arr.dtype}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if arr.min() < 0 or arr.max() > 255:
        raise ValueError(f"{name} values must lie in [0, 255]")
    if np.issubdtype(arr.dtype, np.floating) and np.any(arr != np.round(arr)):
        raise ValueError(f"{name} values must be whole gray levels")
    return arr.astype(np.uint8)


def check_edge_map(edges, name="edge map"):
    """Validate a binary edge map and return it as a 2-D ``bool`` array."""
    arr = np.asarray(edges)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D (height, width), got shape {arr.shape}")
    if arr.dtype == bool:
        return arr
    uniq = np.unique(arr)
    if not np.all(np.isin(uniq, (0, 1))):
        raise ValueError(f"{name} must contain only 0/1 or boolean values")
    return arr.astype(bool)


def check_density_image(density, name="density"):
    arr = np.asarray(density, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D (height, width), got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError(f"{name} values must lie in [0, 1]")
    return arr


def check_labeling(labels, name="labeling"):
    """Return ``labels`` as a flat ``int64`` array of non-negative codes.

    Arbitrary hashable label values are mapped to dense codes; only the
    partition they induce matters to the pair-counting metrics.
    """
    arr = np.asarray(labels)
    if arr.ndim == 0:
        raise ValueError(f"{name} must be an array of labels")
    _, codes = np.unique(arr.ravel(), return_inverse=True)
    return codes.astype(np.int64).ravel()


def check_same_shape(*arrays, names=None):
    shapes = [np.shape(a) for a in arrays]
    if len(set(shapes)) > 1:
        names = names or [f"argument {i}" for i in range(len(arrays))]
        detail = ", ".join(f"{n}={s}" for n, s in zip(names, shapes))
        raise ValueError(f"dimension mismatch: {detail}")
