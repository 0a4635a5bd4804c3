"""Edge detection by density: histogram-mode thresholding of the density image.

The pipeline is

1. estimate the joint spatial/range density at every pixel
   (:func:`kde_edge.kde.density_image`);
2. histogram the densities and pick a threshold ``u`` near the dominant
   high-density mode (:func:`select_threshold`);
3. label as edge every pixel whose density is strictly below ``u``.

How far below the mode ``u`` should sit is a modelling choice; two policies
are offered. ``"valley"`` walks down from the mode to the first strict local
minimum of the histogram and falls back to ``"fraction"`` when there is
none. ``"fraction"`` sets ``u = beta * centre(mode bin)``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_density_image
from .kde import Bandwidths, Kernel, density_image

__all__ = [
    "Histogram",
    "ThresholdPolicy",
    "build_histogram",
    "select_threshold",
    "detect_edges",
    "edd_pipeline",
    "EDDResult",
    "EDDetector",
]

VALLEY = "valley"
FRACTION = "fraction"


@dataclass(frozen=True)
class Histogram:
    """Equal-width histogram of values in ``[lo, hi]``."""

    counts: np.ndarray
    lo: float = 0.0
    hi: float = 1.0

    @property
    def bin_count(self):
        return len(self.counts)

    @property
    def width(self):
        return (self.hi - self.lo) / self.bin_count

    def left_edge(self, index):
        return self.lo + index * self.width

    def centre(self, index):
        return self.lo + (index + 0.5) * self.width

    @property
    def centres(self):
        return self.lo + (np.arange(self.bin_count) + 0.5) * self.width

    def to_csv(self, path):
        """Write ``bin_center,count`` rows with a header line."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["bin_center", "count"])
            for c, n in zip(self.centres, self.counts):
                writer.writerow([repr(float(c)), int(n)])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        if len(rows) < 2:
            raise ValueError(f"{path}: histogram CSV needs at least two bins")
        centres = np.array([float(r["bin_center"]) for r in rows])
        counts = np.array([int(r["count"]) for r in rows], dtype=np.int64)
        half = (centres[1] - centres[0]) / 2.0
        return cls(counts=counts, lo=float(centres[0] - half), hi=float(centres[-1] + half))


@dataclass(frozen=True)
class ThresholdPolicy:
    """How :func:`select_threshold` places ``u`` relative to the histogram mode."""

    mode: str = VALLEY
    beta: float = 0.9
    bin_count: int = 256

    def __post_init__(self):
        if self.mode not in (VALLEY, FRACTION):
            raise ValueError(f"threshold mode must be {VALLEY!r} or {FRACTION!r}, got {self.mode!r}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie strictly in (0, 1), got {self.beta}")
        if int(self.bin_count) != self.bin_count or self.bin_count < 2:
            raise ValueError(f"bin_count must be an integer >= 2, got {self.bin_count}")


def build_histogram(values, bin_count=256):
    """Histogram of densities over ``[0, 1]``.

    Value ``v`` lands in bin ``min(floor(v * bin_count), bin_count - 1)``, so
    1.0 belongs to the top bin.
    """
    if int(bin_count) != bin_count or bin_count < 2:
        raise ValueError(f"bin_count must be an integer >= 2, got {bin_count}")
    bin_count = int(bin_count)
    v = check_density_image(np.atleast_2d(values)).ravel()
    index = np.minimum(np.floor(v * bin_count).astype(np.int64), bin_count - 1)
    return Histogram(counts=np.bincount(index, minlength=bin_count).astype(np.int64))


def _mode_index(counts):
    # ties go to the highest-density bin
    return len(counts) - 1 - int(np.argmax(counts[::-1]))


def select_threshold(hist, policy=ThresholdPolicy()):
    """Pick the density threshold ``u`` from a histogram.

    >>> select_threshold(Histogram(np.array([5, 0, 9])))
    0.3333333333333333
    """
    counts = np.asarray(hist.counts)
    if counts.size == 0 or counts.sum() == 0:
        raise ValueError("cannot select a threshold from an empty histogram")
    m = _mode_index(counts)
    if policy.mode == VALLEY:
        for i in range(m - 1, -1, -1):
            left = counts[i - 1] if i > 0 else np.inf
            if counts[i] < left and counts[i] < counts[i + 1]:
                return float(hist.left_edge(i))
    return float(min(max(policy.beta * hist.centre(m), 0.0), 1.0))


def detect_edges(density, threshold):
    """Edge map ``density < threshold`` (strict)."""
    d = check_density_image(density)
    return np.abs(d) < threshold


@dataclass
class EDDResult:
    density: np.ndarray
    histogram: Histogram
    threshold: float
    edges: np.ndarray = field(repr=False)


def edd_pipeline(image, bandwidths=Bandwidths(), spatial="uniform", range_="gaussian",
                 policy=ThresholdPolicy(), parallel=True):
    """Run density estimation, threshold selection and labelling on one image."""
    density = density_image(image, bandwidths, spatial, range_, parallel=parallel)
    hist = build_histogram(density, policy.bin_count)
    u = select_threshold(hist, policy)
    return EDDResult(density=density, histogram=hist, threshold=u,
                     edges=detect_edges(density, u))


class EDDetector(BaseEstimator, TransformerMixin):
    """Edge detector based on a per-pixel spatial/range kernel density estimate.

    ``transform`` maps a gray image to its density image. ``fit`` learns the
    threshold ``u`` from one image's density histogram; ``predict`` labels
    pixels of any image against that fitted threshold, and ``fit_predict``
    does both on the same image.

    Parameters
    ----------
    hs : float
        Spatial bandwidth in pixels.
    hr : float
        Range bandwidth in gray levels.
    spatial, range_kernel : {"uniform", "gaussian"}
    threshold : {"valley", "fraction"}
    beta : float
        Mode fraction for ``threshold="fraction"`` and for the valley fallback.
    bins : int
        Histogram bin count.
    parallel : bool
        Evaluate rows of the density image concurrently.

    Attributes
    ----------
    density_ : ndarray
        Density image of the image passed to ``fit``.
    histogram_ : Histogram
    threshold_ : float
    """

    def __init__(self, hs=1.0, hr=15.0, spatial="uniform", range_kernel="gaussian",
                 threshold=VALLEY, beta=0.9, bins=256, parallel=True):
        self.hs = hs
        self.hr = hr
        self.spatial = spatial
        self.range_kernel = range_kernel
        self.threshold = threshold
        self.beta = beta
        self.bins = bins
        self.parallel = parallel

    def _params(self):
        return (Bandwidths(self.hs, self.hr), Kernel.coerce(self.spatial),
                Kernel.coerce(self.range_kernel),
                ThresholdPolicy(self.threshold, self.beta, self.bins))

    def fit(self, X, y=None):
        bandwidths, spatial, range_, policy = self._params()
        result = edd_pipeline(X, bandwidths, spatial, range_, policy, parallel=self.parallel)
        self.density_ = result.density
        self.histogram_ = result.histogram
        self.threshold_ = result.threshold
        return self

    def transform(self, X):
        bandwidths, spatial, range_, _ = self._params()
        return density_image(X, bandwidths, spatial, range_, parallel=self.parallel)

    def predict(self, X):
        check_is_fitted(self, "threshold_")
        return detect_edges(self.transform(X), self.threshold_)

    def fit_predict(self, X, y=None):
        self.fit(X)
        return detect_edges(self.density_, self.threshold_)
