"""Classical gradient edge detectors: Sobel, Prewitt, Roberts and Canny.

Masks are applied by correlation (coefficient ``z_i`` multiplies the pixel
directly beneath it) with replicate-edge borders. The 2x2 Roberts masks are
anchored at their top-left coefficient.
"""
from __future__ import annotations

import numpy as np
from scipy import ndimage
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_gray_image

__all__ = [
    "MASKS",
    "convolve_mask",
    "gradients",
    "gradient_detector",
    "canny",
    "GradientEdgeDetector",
    "CannyDetector",
]

MASKS = {
    "sobel": (
        np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64),
        np.array([[-1, -2, -1], [0, 0, 0], [1, 2, 1]], dtype=np.float64),
    ),
    "prewitt": (
        np.array([[-1, 0, 1], [-1, 0, 1], [-1, 0, 1]], dtype=np.float64),
        np.array([[-1, -1, -1], [0, 0, 0], [1, 1, 1]], dtype=np.float64),
    ),
    "roberts": (
        np.array([[1, 0], [0, -1]], dtype=np.float64),
        np.array([[0, 1], [-1, 0]], dtype=np.float64),
    ),
}


def convolve_mask(image, mask):
    """Signed mask response ``sum(z_i * f_i)`` at every pixel.

    Odd-sized masks are centred on the pixel; even-sized masks are anchored
    at their top-left coefficient. Pixels outside the image take the value
    of the nearest border pixel.
    """
    mask = np.asarray(mask, dtype=np.float64)
    if mask.ndim != 2 or mask.size == 0:
        raise ValueError("mask must be a non-empty 2-D array")
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("image must be 2-D")
    mh, mw = mask.shape
    top = mh // 2 if mh % 2 else 0
    left = mw // 2 if mw % 2 else 0
    padded = np.pad(img, ((top, mh - 1 - top), (left, mw - 1 - left)), mode="edge")
    height, width = img.shape
    out = np.zeros_like(img)
    for di in range(mh):
        for dj in range(mw):
            z = mask[di, dj]
            if z != 0.0:
                out += z * padded[di:di + height, dj:dj + width]
    return out


def gradients(image, operator="sobel"):
    """Return ``(gx, gy, magnitude)`` for one of the named mask pairs."""
    try:
        mx, my = MASKS[operator]
    except KeyError:
        raise ValueError(f"unknown operator {operator!r}; expected one of {sorted(MASKS)}") from None
    img = check_gray_image(image)
    gx = convolve_mask(img, mx)
    gy = convolve_mask(img, my)
    return gx, gy, np.hypot(gx, gy)


def _relative_threshold(magnitude, fraction):
    peak = magnitude.max()
    if peak <= 0:
        return np.zeros(magnitude.shape, dtype=bool)
    return magnitude > fraction * peak


def gradient_detector(image, operator="sobel", threshold_fraction=0.25):
    """Edge iff gradient magnitude exceeds ``threshold_fraction`` of its maximum."""
    if not 0.0 < threshold_fraction <= 1.0:
        raise ValueError(f"threshold_fraction must lie in (0, 1], got {threshold_fraction}")
    _, _, magnitude = gradients(image, operator)
    return _relative_threshold(magnitude, threshold_fraction)


def _non_maximum_suppression(gx, gy, magnitude):
    height, width = magnitude.shape
    padded = np.pad(magnitude, 1, mode="constant")
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    # 0: gradient along columns, 1: along the main diagonal, 2: along rows,
    # 3: along the anti-diagonal (row axis points down)
    sector = np.zeros(magnitude.shape, dtype=np.int8)
    sector[(angle >= 22.5) & (angle < 67.5)] = 1
    sector[(angle >= 67.5) & (angle < 112.5)] = 2
    sector[(angle >= 112.5) & (angle < 157.5)] = 3
    offsets = {0: (0, 1), 1: (1, 1), 2: (1, 0), 3: (1, -1)}
    keep = np.zeros(magnitude.shape, dtype=bool)
    for s, (dr, dc) in offsets.items():
        ahead = padded[1 + dr:1 + dr + height, 1 + dc:1 + dc + width]
        behind = padded[1 - dr:1 - dr + height, 1 - dc:1 - dc + width]
        # asymmetric comparison keeps exactly one pixel of a two-pixel plateau
        local_max = (magnitude > ahead) & (magnitude >= behind)
        keep |= (sector == s) & local_max
    return np.where(keep & (magnitude > 0), magnitude, 0.0)


def canny(image, sigma=1.0, low_frac=0.1, high_frac=0.2):
    """Canny detector.

    Gaussian smoothing, Sobel gradients, non-maximum suppression over four
    quantised directions, then hysteresis: weak pixels (above ``low_frac`` of
    the peak magnitude) survive only when 8-connected to a strong pixel
    (above ``high_frac``).
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not 0.0 < low_frac < high_frac <= 1.0:
        raise ValueError("expected 0 < low_frac < high_frac <= 1")
    img = check_gray_image(image).astype(np.float64)
    smoothed = ndimage.gaussian_filter(img, sigma, mode="nearest")
    mx, my = MASKS["sobel"]
    gx = convolve_mask(smoothed, mx)
    gy = convolve_mask(smoothed, my)
    magnitude = np.hypot(gx, gy)
    peak = magnitude.max()
    if peak <= 0:
        return np.zeros(img.shape, dtype=bool)
    thin = _non_maximum_suppression(gx, gy, magnitude)
    weak = thin > low_frac * peak
    strong = thin > high_frac * peak
    labels, n = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    if n == 0:
        return weak
    connected = np.zeros(n + 1, dtype=bool)
    connected[np.unique(labels[strong])] = True
    connected[0] = False
    return connected[labels]


class GradientEdgeDetector(BaseEstimator, TransformerMixin):
    """Sobel, Prewitt or Roberts detector with a threshold relative to the peak.

    ``transform`` returns the gradient magnitude; ``fit`` records
    ``threshold_ = threshold_fraction * max(magnitude)``.
    """

    def __init__(self, operator="sobel", threshold_fraction=0.25):
        self.operator = operator
        self.threshold_fraction = threshold_fraction

    def transform(self, X):
        return gradients(X, self.operator)[2]

    def fit(self, X, y=None):
        if not 0.0 < self.threshold_fraction <= 1.0:
            raise ValueError("threshold_fraction must lie in (0, 1]")
        self.threshold_ = self.threshold_fraction * float(self.transform(X).max())
        return self

    def predict(self, X):
        check_is_fitted(self, "threshold_")
        magnitude = self.transform(X)
        if self.threshold_ <= 0:
            return np.zeros(magnitude.shape, dtype=bool)
        return magnitude > self.threshold_

    def fit_predict(self, X, y=None):
        return gradient_detector(X, self.operator, self.threshold_fraction)


class CannyDetector(BaseEstimator):
    def __init__(self, sigma=1.0, low_frac=0.1, high_frac=0.2):
        self.sigma = sigma
        self.low_frac = low_frac
        self.high_frac = high_frac

    def fit(self, X, y=None):
        check_gray_image(X)
        return self

    def predict(self, X):
        return canny(X, self.sigma, self.low_frac, self.high_frac)

    def fit_predict(self, X, y=None):
        return self.fit(X).predict(X)
