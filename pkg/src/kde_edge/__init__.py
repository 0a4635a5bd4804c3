"""Edge detection by kernel density estimation.

Detectors follow the scikit-learn estimator conventions (``get_params``,
``fit``, ``transform``, ``predict``) and operate on one 2-D gray image at a
time::

    >>> from kde_edge import EDDetector, make_step
    >>> edges = EDDetector(hs=1, hr=30).fit_predict(make_step(8, 8, 0, 255, 4))
    >>> sorted(set(edges.nonzero()[1].tolist()))
    [3, 4]
"""
from .baselines import CannyDetector, GradientEdgeDetector, canny, convolve_mask, gradient_detector
from .edd import (
    EDDetector,
    Histogram,
    ThresholdPolicy,
    build_histogram,
    detect_edges,
    edd_pipeline,
    select_threshold,
)
from .io import load_pgm, save_pgm
from .kde import Bandwidths, Kernel, density_at, density_image, profile_eval, window_radius
from .metrics import evaluate, ned, npri, pri, pri_bruteforce, rand_index
from .synthetic import make_checkerboard, make_constant, make_noise, make_step

__version__ = "0.1.0"

__all__ = [
    "Bandwidths",
    "CannyDetector",
    "EDDetector",
    "GradientEdgeDetector",
    "Histogram",
    "Kernel",
    "ThresholdPolicy",
    "build_histogram",
    "canny",
    "convolve_mask",
    "density_at",
    "density_image",
    "detect_edges",
    "edd_pipeline",
    "evaluate",
    "gradient_detector",
    "load_pgm",
    "make_checkerboard",
    "make_constant",
    "make_noise",
    "make_step",
    "ned",
    "npri",
    "pri",
    "pri_bruteforce",
    "profile_eval",
    "rand_index",
    "save_pgm",
    "select_threshold",
    "window_radius",
]
