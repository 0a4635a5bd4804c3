"""Detector registry, cross-product benchmark tables and bandwidth search."""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .baselines import CannyDetector, GradientEdgeDetector
from .edd import EDDetector
from .metrics import evaluate, pri

__all__ = [
    "DETECTORS",
    "BENCH_HEADER",
    "make_detector",
    "BenchCase",
    "bench_rows",
    "grid_search",
]

log = logging.getLogger(__name__)

DETECTORS = ("edd", "canny", "sobel", "prewitt", "roberts")
BENCH_HEADER = ["image", "detector", "truth", "ri", "pri", "npri", "ned", "status"]

DEFAULT_HS_GRID = (1.0, 2.0, 3.0)
DEFAULT_HR_GRID = (5.0, 10.0, 15.0, 20.0, 30.0, 40.0)


def make_detector(name, hs=1.0, hr=15.0, spatial="uniform", range_kernel="gaussian",
                  threshold="valley", beta=0.9, bins=256, frac=0.25, sigma=1.0,
                  low=0.1, high=0.2):
    """Build the estimator for ``name`` from a flat parameter set.

    Parameters irrelevant to the chosen detector are ignored.
    """
    if name == "edd":
        return EDDetector(hs=hs, hr=hr, spatial=spatial, range_kernel=range_kernel,
                          threshold=threshold, beta=beta, bins=bins)
    if name == "canny":
        return CannyDetector(sigma=sigma, low_frac=low, high_frac=high)
    if name in ("sobel", "prewitt", "roberts"):
        return GradientEdgeDetector(operator=name, threshold_fraction=frac)
    raise ValueError(f"unknown detector {name!r}; expected one of {', '.join(DETECTORS)}")


@dataclass
class BenchCase:
    """One benchmark image with its ground truths.

    ``load`` returns ``(image, [truth, ...])`` and is called lazily so a bad
    file only fails its own rows.
    """

    image_id: str
    truth_ids: list
    load: object


def _score_case(case, detectors, params):
    rows = []
    try:
        image, truths = case.load()
    except Exception as exc:  # noqa: BLE001 - recorded as an error row
        log.warning("failed to load %s: %s", case.image_id, exc)
        truth_id = case.truth_ids[0] if case.truth_ids else ""
        return [[case.image_id, d, truth_id, "", "", "", "", f"error: {exc}"] for d in detectors]
    for name in detectors:
        try:
            edges = make_detector(name, **params).fit_predict(image)
            report = evaluate(edges, truths)
            rows.append([case.image_id, name, case.truth_ids[0], *report.as_row(), "ok"])
        except Exception as exc:  # noqa: BLE001
            log.warning("%s on %s failed: %s", name, case.image_id, exc)
            rows.append([case.image_id, name, case.truth_ids[0], "", "", "", "", f"error: {exc}"])
    return rows


def bench_rows(cases, detectors=DETECTORS, params=None, jobs=1):
    """Score every case with every detector.

    Rows come back in input order (image-major, then detector order)
    whatever ``jobs`` is. Failures become rows whose status starts with
    ``"error"``.
    """
    params = params or {}
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(lambda c: _score_case(c, detectors, params), cases))
    else:
        chunks = [_score_case(c, detectors, params) for c in cases]
    return list(itertools.chain.from_iterable(chunks))


def grid_search(image, truths, hs_grid=DEFAULT_HS_GRID, hr_grid=DEFAULT_HR_GRID, **params):
    """Exhaustive search of EDD bandwidths maximising PRI against ``truths``.

    Returns ``(best, table)`` where ``table`` lists ``(hs, hr, pri)`` for every
    grid point in order and ``best`` is its highest-PRI entry (first on ties).
    """
    table = []
    for hs, hr in itertools.product(hs_grid, hr_grid):
        edges = EDDetector(hs=hs, hr=hr, **params).fit_predict(image)
        table.append((hs, hr, pri(edges, truths)))
    best = max(table, key=lambda row: row[2])
    return best, table
