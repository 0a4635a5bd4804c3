"""Segmentation similarity indices: RI, PRI, NPRI and the natural entropy distance.

Pair-counting indices are computed from contingency tables in exact integer
arithmetic and divided once at the end, so relabelling either argument
cannot change the result by even one ulp. Edge maps enter as two-label
partitions (edge / non-edge).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._validation import check_edge_map, check_gray_image, check_labeling, check_same_shape

__all__ = [
    "DegenerateIndexError",
    "PairCounts",
    "MetricReport",
    "pair_counts",
    "rand_index",
    "pri",
    "pri_bruteforce",
    "expected_index",
    "npri",
    "ned",
    "evaluate",
]

BRUTEFORCE_LIMIT = 4096


class DegenerateIndexError(ValueError):
    """NPRI is undefined because the expected index equals its maximum."""


@dataclass(frozen=True)
class PairCounts:
    """Pair agreement counts between two labelings.

    ``a``: same label in both; ``b``: different in both; ``c``: same in the
    first only; ``d``: same in the second only.
    """

    a: int
    b: int
    c: int
    d: int
    n: int

    @property
    def total(self):
        return self.n * (self.n - 1) // 2


@dataclass(frozen=True)
class MetricReport:
    ri: float
    pri: float
    npri: float
    ned: float
    ned_per_truth: tuple = ()

    def as_row(self):
        return [f"{self.ri:.6f}", f"{self.pri:.6f}", f"{self.npri:.6f}", f"{self.ned:.6f}"]


def _pairs(counts):
    counts = np.asarray(counts, dtype=object)
    return int(np.sum(counts * (counts - 1) // 2))


def _same_pairs(codes):
    return _pairs(np.bincount(codes))


def _joint_same_pairs(x, y):
    joint = x * (int(y.max()) + 1) + y
    return _pairs(np.unique(joint, return_counts=True)[1])


def _prepare(s, truths):
    if isinstance(truths, np.ndarray) and truths.ndim == np.ndim(s):
        truths = [truths]
    truths = list(truths)
    if not truths:
        raise ValueError("ground-truth set is empty")
    check_same_shape(s, *truths, names=["segmentation"] + [f"truth {k}" for k in range(len(truths))])
    codes = check_labeling(s)
    if codes.size < 2:
        raise ValueError("at least two pixels are required")
    return codes, [check_labeling(g) for g in truths]


def pair_counts(x, y):
    """Contingency-table pair counts between two labelings of equal shape."""
    check_same_shape(x, y, names=["x", "y"])
    x = check_labeling(x)
    y = check_labeling(y)
    n = x.size
    if n < 2:
        raise ValueError("at least two pixels are required")
    same_x = _same_pairs(x)
    same_y = _same_pairs(y)
    a = _joint_same_pairs(x, y)
    total = n * (n - 1) // 2
    return PairCounts(a=a, b=total - same_x - same_y + a, c=same_x - a, d=same_y - a, n=n)


def rand_index(x, y):
    """Fraction of pixel pairs on which two labelings agree.

    >>> rand_index([0, 0, 0, 0], [0, 0, 1, 1])
    0.3333333333333333
    """
    pc = pair_counts(x, y)
    return (pc.a + pc.b) / pc.total


def _pri_terms(codes, truth_codes):
    """Integer sufficient statistics for PRI and its expectation.

    Returns ``(T, S, P, J)`` with ``T`` the pair count, ``S`` the pairs sharing
    a label in the segmentation, ``P`` the same-label pair count summed over
    truths and ``J`` the pairs sharing a label in both, summed over truths.
    """
    n = codes.size
    total = n * (n - 1) // 2
    same_s = _same_pairs(codes)
    same_g = sum(_same_pairs(g) for g in truth_codes)
    joint = sum(_joint_same_pairs(codes, g) for g in truth_codes)
    return total, same_s, same_g, joint


def _pri_fraction(codes, truth_codes):
    total, same_s, same_g, joint = _pri_terms(codes, truth_codes)
    k = len(truth_codes)
    # sum_{i<j} [c p + (1-c)(1-p)] scaled by K, with p = (#truths agreeing)/K
    agree = k * total - k * same_s - same_g + 2 * joint
    return Fraction(agree, k * total)


def pri(s, truths):
    """Probabilistic Rand index of ``s`` against a set of ground truths.

    Parameters
    ----------
    s : array_like
        Test labeling (an edge map counts as two labels).
    truths : sequence of array_like
        Ground-truth labelings with the same shape as ``s``.
    """
    codes, truth_codes = _prepare(s, truths)
    return float(_pri_fraction(codes, truth_codes))


def pri_bruteforce(s, truths):
    """PRI by explicit enumeration of all pixel pairs. Quadratic; test use only."""
    codes, truth_codes = _prepare(s, truths)
    n = codes.size
    if n > BRUTEFORCE_LIMIT:
        raise ValueError(f"brute-force PRI limited to {BRUTEFORCE_LIMIT} pixels, got {n}")
    k = len(truth_codes)
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    c = (codes[:, None] == codes[None, :])[upper].astype(np.int64)
    agreeing = np.zeros(c.shape, dtype=np.int64)
    for g in truth_codes:
        agreeing += (g[:, None] == g[None, :])[upper]
    # K * [c p + (1 - c)(1 - p)] with p = agreeing / K
    scaled = c * agreeing + (1 - c) * (k - agreeing)
    return int(scaled.sum()) / (k * len(c))


def expected_index(s, truths):
    """Chance-level PRI: ``s`` replaced by a random pairing with the same label sizes."""
    codes, truth_codes = _prepare(s, truths)
    return float(_expected_fraction(codes, truth_codes))


def _expected_fraction(codes, truth_codes):
    total, same_s, same_g, _ = _pri_terms(codes, truth_codes)
    k = len(truth_codes)
    p_same = Fraction(same_s, total)
    mean_p = Fraction(same_g, k * total)
    return p_same * mean_p + (1 - p_same) * (1 - mean_p)


def npri(s, truths):
    """Normalised PRI, ``(PRI - E) / (1 - E)`` with ``E`` the chance-level PRI.

    Negative when ``s`` agrees with the truths less than chance would.

    Raises
    ------
    DegenerateIndexError
        When ``E == 1`` (all labelings single-label, or all singletons).
    """
    codes, truth_codes = _prepare(s, truths)
    expected = _expected_fraction(codes, truth_codes)
    if expected == 1:
        raise DegenerateIndexError("expected index equals 1; NPRI is undefined")
    return float((_pri_fraction(codes, truth_codes) - expected) / (1 - expected))


def ned(a, b):
    """Natural entropy distance between two gray images.

    The per-pixel difference ``(a - b) mod 256`` is histogrammed and its
    base-2 Shannon entropy divided by 8 bits, giving a value in ``[0, 1]``.
    """
    check_same_shape(a, b, names=["a", "b"])
    a = check_gray_image(a, "a").astype(np.int64)
    b = check_gray_image(b, "b").astype(np.int64)
    diff = np.mod(a - b, 256).ravel()
    counts = np.bincount(diff, minlength=256)
    # sorting fixes the summation order, so ned(a, b) == ned(b, a) bit for bit
    counts = np.sort(counts[counts > 0])
    p = counts / diff.size
    entropy = -float(np.sum(p * np.log2(p)))
    return min(1.0, max(0.0, entropy / 8.0))


def _as_gray(edges):
    return np.where(check_edge_map(edges), 255, 0).astype(np.uint8)


def evaluate(detected, truths):
    """Score an edge map against a ground-truth set.

    RI and NED are taken against the first truth; PRI and NPRI use the whole
    set. NED against every truth is kept in ``ned_per_truth``.
    """
    detected = check_edge_map(detected, "detected")
    truths = [check_edge_map(g, f"truth {k}") for k, g in enumerate(truths)]
    if not truths:
        raise ValueError("ground-truth set is empty")
    check_same_shape(detected, *truths)
    neds = tuple(ned(_as_gray(detected), _as_gray(g)) for g in truths)
    return MetricReport(
        ri=rand_index(detected, truths[0]),
        pri=pri(detected, truths),
        npri=npri(detected, truths),
        ned=neds[0],
        ned_per_truth=neds,
    )
