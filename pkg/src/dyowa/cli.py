"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 when any image in a batch failed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments
from .aggregate import get_aggregator
from .errors import DyowaError, UsageError
from .image import NoiseSpec, add_gaussian_noise, convolve_dyowa, magnify, reduce
from .imgio import load_pgm, save_pgm
from .metrics import format_db, psnr
from .properties import PROPERTIES, SPECIAL_KINDS, check_property, search_special_element

EXIT_OK, EXIT_USAGE, EXIT_BATCH_FAILURE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _methods(text: str) -> tuple[str, ...]:
    return tuple(m.strip() for m in text.split(",") if m.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dyowa", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def single(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("input", type=Path)
        p.add_argument("output", type=Path)
        p.add_argument("--variant", choices=("P2", "P5"), default="P5", help="output encoding")
        return p

    p = single("reduce", "reduce an image by k x k blocks")
    p.add_argument("--k", type=int, default=2, help="block size")
    p.add_argument("--method", default="h", help="aggregator name")
    p.add_argument("--crop", action="store_true", help="drop trailing rows/cols that do not fill a block")

    p = single("magnify", "enlarge an image by pixel cloning")
    p.add_argument("--k", type=int, default=2, help="block size")

    p = single("filter", "sliding-window DYOWA filter")
    p.add_argument("--window", type=int, default=3, help="odd filter window side")
    p.add_argument("--method", default="h", help="aggregator name")

    p = single("noise", "add seeded Gaussian noise")
    p.add_argument("--sigma", type=float, default=0.10, help="noise standard deviation on [0, 1]")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")

    p = sub.add_parser("psnr", help="PSNR between two images")
    p.add_argument("a", type=Path)
    p.add_argument("b", type=Path)

    def batch(name, help_, default_methods):
        p = sub.add_parser(name, help=help_)
        p.add_argument("corpus", type=Path)
        p.add_argument("--methods", type=_methods, default=default_methods, help="comma-separated aggregator names")
        p.add_argument("--window", type=int, default=3, help="odd filter window side")
        p.add_argument("--seed", type=int, default=0, help="RNG seed")
        p.add_argument("--out", type=Path, help="CSV path (default: stdout)")
        p.add_argument("--jobs", type=int, default=1, help="images processed in parallel")
        p.add_argument("--images-out", type=Path, help="directory for output PGMs")
        return p

    for name in ("method1", "method1p"):
        p = batch(name, "reduce/magnify PSNR study" + (" with H filtering" if name == "method1p" else ""),
                  ("h", "cowa", "arith", "median"))
        p.add_argument("--k", type=int, default=2, help="block size")
        p.add_argument("--crop", action="store_true", help="drop trailing rows/cols that do not fill a block")

    p = batch("noise-study", "noise treatment PSNR study", ("h", "cowa", "arith"))
    p.add_argument("--sigma", type=float, default=0.10, help="noise standard deviation on [0, 1]")

    p = sub.add_parser("check-props", help="sampling screens of operator properties")
    p.add_argument("--methods", type=_methods, default=("h",), help="comma-separated aggregator names")
    p.add_argument("--samples", type=int, default=10_000, help="random inputs per property")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--tolerance", type=float, default=1e-9, help="allowed absolute deviation")
    p.add_argument("--grid-step", type=float, default=0.05, help="candidate grid for special elements")
    return parser


def _single(args) -> int:
    img = load_pgm(args.input)
    if args.command == "reduce":
        out = reduce(img, args.k, args.method, crop=args.crop)
    elif args.command == "magnify":
        out = magnify(img, args.k)
    elif args.command == "filter":
        out = convolve_dyowa(img, args.window, args.method)
    else:
        out = add_gaussian_noise(img, NoiseSpec(args.sigma, args.seed))
    save_pgm(out, args.output, args.variant)
    return EXIT_OK


def _batch(args) -> int:
    cfg = experiments.ExperimentConfig(
        corpus_dir=args.corpus,
        methods=args.methods,
        block_size=getattr(args, "k", 2),
        sigma=getattr(args, "sigma", None),
        seed=args.seed,
        window=args.window,
        output=args.out,
        crop=getattr(args, "crop", False),
        jobs=args.jobs,
        images_out=args.images_out,
    )
    runner = {
        "method1": experiments.run_method1,
        "method1p": experiments.run_method1_prime,
        "noise-study": experiments.run_noise_study,
    }[args.command]
    report = runner(cfg)
    if args.out is None:
        sys.stdout.write(report.to_csv())
    elif report.rows:
        print(report.summary())
    for image_id, message in report.failures:
        print(f"failed: {image_id}: {message}", file=sys.stderr)
    return EXIT_BATCH_FAILURE if report.failures else EXIT_OK


def _check_props(args) -> int:
    for name in args.methods:
        agg = get_aggregator(name)
        print(f"[{name}]")
        for prop in PROPERTIES:
            report = check_property(agg, prop, args.samples, args.seed, args.tolerance)
            print(f"  {report}")
        for kind in SPECIAL_KINDS:
            found = search_special_element(agg, kind, args.grid_step, seed=args.seed)
            print(f"  {kind}: {found.candidates if found.found else 'none found'}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "psnr":
            print(format_db(psnr(load_pgm(args.a), load_pgm(args.b))))
            return EXIT_OK
        if args.command == "check-props":
            return _check_props(args)
        if args.command in ("method1", "method1p", "noise-study"):
            return _batch(args)
        return _single(args)
    except (DyowaError, OSError) as exc:
        print(f"dyowa: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
