"""``kde-edge`` command line: detect, baseline, evaluate and bench."""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import tempfile
import warnings
from pathlib import Path

from . import __version__
from .benchmark import BENCH_HEADER, DETECTORS, BenchCase, bench_rows, make_detector
from .edd import FRACTION, VALLEY
from .io import load_pgm, save_density_csv, save_density_pgm, save_pgm
from .metrics import evaluate, rand_index

log = logging.getLogger("kde_edge")

EVAL_HEADER = ["image", "detector", "truth", "ri", "pri", "npri", "ned"]
EMIT_CHOICES = ("edges", "density", "density-csv", "histogram", "metrics")


class CLIError(Exception):
    """A user-facing failure; the message goes to stderr and the exit code is 1."""


def _umask():
    mask = os.umask(0)
    os.umask(mask)
    return mask


class _Staging:
    """Collect artifacts in temp files and move them into place together."""

    def __init__(self):
        self._pending = []

    def path(self, final):
        final = Path(final)
        fd, tmp = tempfile.mkstemp(prefix=f".{final.name}.", suffix=".tmp", dir=final.parent)
        os.close(fd)
        # mkstemp creates 0600; give the artifact ordinary permissions
        os.chmod(tmp, 0o666 & ~_umask())
        self._pending.append((Path(tmp), final))
        return tmp

    def commit(self):
        for tmp, final in self._pending:
            os.replace(tmp, final)
        self._pending = []

    def abort(self):
        for tmp, _ in self._pending:
            try:
                tmp.unlink()
            except FileNotFoundError:
                pass
        self._pending = []

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            self.commit()
        else:
            self.abort()
        return False


def _existing_file(path):
    p = Path(path)
    if not p.is_file():
        raise CLIError(f"{path}: no such file")
    return p


def _load(path):
    try:
        return load_pgm(_existing_file(path))
    except CLIError:
        raise
    except (OSError, ValueError) as exc:
        raise CLIError(f"{path}: {exc}") from None


def _load_edges(path):
    return _load(path) > 0


def _out_dir(path):
    p = Path(path)
    try:
        p.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CLIError(f"{path}: cannot create output directory: {exc}") from None
    return p


def _parse_emit(value):
    items = {v.strip() for v in value.split(",") if v.strip()}
    unknown = items - set(EMIT_CHOICES)
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown artifact(s) {', '.join(sorted(unknown))}; choose from {', '.join(EMIT_CHOICES)}")
    return items


def _parse_detectors(value):
    names = [v.strip() for v in value.split(",") if v.strip()]
    unknown = [n for n in names if n not in DETECTORS]
    if unknown or not names:
        raise argparse.ArgumentTypeError(
            f"unknown detector(s) {', '.join(unknown) or '(none)'}; choose from {', '.join(DETECTORS)}")
    return names


def _positive(value):
    x = float(value)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return x


def _add_edd_flags(p):
    g = p.add_argument_group("density detector")
    g.add_argument("--hs", type=_positive, default=1.0, help="spatial bandwidth in pixels (default 1)")
    g.add_argument("--hr", type=_positive, default=15.0, help="range bandwidth in gray levels (default 15)")
    g.add_argument("--spatial", choices=("uniform", "gaussian"), default="uniform")
    g.add_argument("--range", dest="range_kernel", choices=("uniform", "gaussian"), default="gaussian")
    g.add_argument("--threshold", choices=(VALLEY, FRACTION), default=VALLEY)
    g.add_argument("--beta", type=float, default=0.9,
                   help="mode fraction for --threshold fraction and the valley fallback")
    g.add_argument("--bins", type=int, default=256, help="density histogram bins (default 256)")


def _add_baseline_flags(p, with_op):
    g = p.add_argument_group("classical detectors")
    if with_op:
        g.add_argument("--op", required=True, choices=("sobel", "prewitt", "roberts", "canny"))
    g.add_argument("--frac", type=float, default=0.25,
                   help="gradient threshold as a fraction of the peak magnitude")
    g.add_argument("--sigma", type=_positive, default=1.0, help="Canny smoothing sigma")
    g.add_argument("--low", type=float, default=0.1, help="Canny weak threshold fraction")
    g.add_argument("--high", type=float, default=0.2, help="Canny strong threshold fraction")


def _detector_params(args):
    params = {}
    for key in ("hs", "hr", "spatial", "range_kernel", "threshold", "beta", "bins",
                "frac", "sigma", "low", "high"):
        if hasattr(args, key):
            params[key] = getattr(args, key)
    return params


def _summary(edges, **extra):
    fields = [f"{k}={v}" for k, v in extra.items()]
    fields += [f"edges={int(edges.sum())}", f"pixels={edges.size}"]
    return " ".join(fields)


def _write_csv(rows, header, dest, staging):
    if dest is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return
    with open(staging.path(dest), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _eval_rows(image_id, detector, edges, truths, truth_ids):
    for tid, t in zip(truth_ids, truths):
        if t.shape != edges.shape:
            raise CLIError(f"{tid}: dimension mismatch, {t.shape[1]}x{t.shape[0]} truth "
                           f"vs {edges.shape[1]}x{edges.shape[0]} edge map")
    try:
        report = evaluate(edges, truths)
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    rows = []
    for k, tid in enumerate(truth_ids):
        ri = rand_index(edges, truths[k])
        rows.append([image_id, detector, tid, f"{ri:.6f}", f"{report.pri:.6f}",
                     f"{report.npri:.6f}", f"{report.ned_per_truth[k]:.6f}"])
    return rows


def cmd_detect(args):
    image = _load(args.input)
    truths = [_load_edges(t) for t in args.truth]
    if "metrics" in args.emit and not truths:
        raise CLIError("--emit metrics needs at least one --truth")
    out = _out_dir(args.out)
    stem = Path(args.input).stem

    params = _detector_params(args)
    try:
        detector = make_detector("edd", **params)
        edges = detector.fit_predict(image)
    except ValueError as exc:
        raise CLIError(str(exc)) from None

    with _Staging() as staging:
        save_pgm(edges, staging.path(out / f"{stem}_edd.pgm"), binary=not args.ascii)
        if "density" in args.emit:
            save_density_pgm(detector.density_, staging.path(out / f"{stem}_density.pgm"))
        if "density-csv" in args.emit:
            save_density_csv(detector.density_, staging.path(out / f"{stem}_density.csv"))
        if "histogram" in args.emit:
            detector.histogram_.to_csv(staging.path(out / f"{stem}_histogram.csv"))
        if "metrics" in args.emit:
            rows = _eval_rows(stem, "edd", edges, truths, [Path(t).stem for t in args.truth])
            _write_csv(rows, EVAL_HEADER, out / f"{stem}_edd_metrics.csv", staging)
    print(_summary(edges, u=repr(detector.threshold_)))
    return 0


def cmd_baseline(args):
    image = _load(args.input)
    out = _out_dir(args.out)
    stem = Path(args.input).stem
    try:
        edges = make_detector(args.op, **_detector_params(args)).fit_predict(image)
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    with _Staging() as staging:
        save_pgm(edges, staging.path(out / f"{stem}_{args.op}.pgm"), binary=not args.ascii)
    print(_summary(edges))
    return 0


def cmd_evaluate(args):
    edges = _load_edges(args.detected)
    truths = [_load_edges(t) for t in args.truths]
    image_id = args.image_id or Path(args.detected).stem
    rows = _eval_rows(image_id, args.detector, edges, truths, [Path(t).stem for t in args.truths])
    if args.out is not None:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    with _Staging() as staging:
        _write_csv(rows, EVAL_HEADER, args.out, staging)
    return 0


def cmd_bench(args):
    if len(args.truths) != len(args.images):
        raise CLIError(f"got {len(args.images)} image(s) but {len(args.truths)} --truths list(s)")
    cases = []
    for path, truth_list in zip(args.images, args.truths):
        truth_paths = [t for t in truth_list.split(",") if t]
        if not truth_paths:
            raise CLIError(f"{path}: empty ground-truth list")

        def load(path=path, truth_paths=truth_paths):
            image = _load(path)
            truths = [_load_edges(t) for t in truth_paths]
            for t, tp in zip(truths, truth_paths):
                if t.shape != image.shape:
                    raise CLIError(f"{tp}: dimension mismatch with {path}")
            return image, truths

        cases.append(BenchCase(Path(path).stem, [Path(t).stem for t in truth_paths], load))

    rows = bench_rows(cases, args.detectors, _detector_params(args), jobs=args.jobs)
    if args.out is not None:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    with _Staging() as staging:
        _write_csv(rows, BENCH_HEADER, args.out, staging)
    failed = sum(1 for r in rows if r[-1] != "ok")
    if failed:
        print(f"{failed} of {len(rows)} row(s) failed", file=sys.stderr)
        return 1
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kde-edge",
        description="Edge detection by kernel density estimation, classical baselines and metrics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="density-based edge detection on one PGM")
    p.add_argument("input", help="8-bit PGM image")
    _add_edd_flags(p)
    p.add_argument("--emit", type=_parse_emit, default=set(),
                   help=f"extra artifacts, comma separated: {', '.join(EMIT_CHOICES[1:])}")
    p.add_argument("--truth", action="append", default=[], help="ground-truth edge PGM (repeatable)")
    p.add_argument("--out", default=".", help="output directory (default: current)")
    p.add_argument("--ascii", action="store_true", help="write plain (P2) PGM")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("baseline", help="classical edge detector on one PGM")
    p.add_argument("input", help="8-bit PGM image")
    _add_baseline_flags(p, with_op=True)
    p.add_argument("--out", default=".", help="output directory (default: current)")
    p.add_argument("--ascii", action="store_true", help="write plain (P2) PGM")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("evaluate", help="score an edge map against ground truths")
    p.add_argument("detected", help="edge map PGM (non-zero = edge)")
    p.add_argument("truths", nargs="+", help="ground-truth edge map PGMs")
    p.add_argument("--detector", default="edd", help="detector name for the CSV (default edd)")
    p.add_argument("--image-id", help="image id for the CSV (default: detected file stem)")
    p.add_argument("--out", help="CSV path (default: standard output)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="image x detector comparison table")
    p.add_argument("images", nargs="+", help="8-bit PGM images")
    p.add_argument("--truths", nargs="+", required=True,
                   help="one comma-separated ground-truth list per image, in image order")
    p.add_argument("--detectors", type=_parse_detectors, default=list(DETECTORS),
                   help=f"comma separated subset of {','.join(DETECTORS)}")
    _add_edd_flags(p)
    _add_baseline_flags(p, with_op=False)
    p.add_argument("--jobs", type=int, default=1, help="images processed concurrently")
    p.add_argument("--out", help="CSV path (default: standard output)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    warnings.filterwarnings("ignore", message=".*TBB.*")
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"kde-edge {args.command}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"kde-edge {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
