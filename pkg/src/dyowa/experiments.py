"""Corpus-level pipelines: reduce/magnify scoring (with and without an H
filter pass) and the noise-treatment study."""

from __future__ import annotations

import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .aggregate import AGGREGATORS
from .errors import DyowaError, UsageError
from .image import GrayImage, NoiseSpec, add_gaussian_noise, convolve_dyowa, magnify, reduce
from .imgio import load_pgm, save_pgm
from .metrics import QualityReport, psnr

log = logging.getLogger(__name__)

METHODS = ("h", "cowa", "arith", "median", "min", "max")
UNTREATED = "none"


@dataclass(frozen=True)
class ExperimentConfig:
    corpus_dir: Path
    methods: tuple[str, ...] = ("h", "cowa", "arith", "median")
    block_size: int = 2
    sigma: float | None = None
    seed: int = 0
    window: int = 3
    output: Path | None = None
    crop: bool = False
    jobs: int = 1
    images_out: Path | None = None

    def __post_init__(self):
        object.__setattr__(self, "corpus_dir", Path(self.corpus_dir))
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.methods:
            raise UsageError("at least one method is required")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise UsageError(f"unknown methods {unknown}; choose from {list(METHODS)}")
        if self.block_size < 1:
            raise UsageError("block size k must be >= 1")
        if self.window < 3 or self.window % 2 == 0:
            raise UsageError(f"window must be odd and >= 3, got {self.window}")
        if self.jobs < 1:
            raise UsageError("jobs must be >= 1")
        if self.sigma is not None:
            NoiseSpec(self.sigma, self.seed)


def list_corpus(corpus_dir) -> list[tuple[str, Path]]:
    """``(image_id, path)`` for every ``*.pgm`` in the directory, sorted by id."""
    corpus_dir = Path(corpus_dir)
    if not corpus_dir.is_dir():
        raise UsageError(f"corpus directory {corpus_dir} is not readable")
    items = sorted((p.stem, p) for p in corpus_dir.iterdir() if p.suffix.lower() == ".pgm")
    if not items:
        log.warning("corpus %s contains no .pgm files", corpus_dir)
    return items


def image_seed(seed: int, image_id: str) -> int:
    """Per-image noise seed derived from the run seed and the image id."""
    digest = hashlib.blake2b(f"{seed}:{image_id}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _run(cfg: ExperimentConfig, per_image: Callable[[str, GrayImage], list[tuple[str, float]]]) -> QualityReport:
    corpus = list_corpus(cfg.corpus_dir)

    def work(item):
        image_id, path = item
        try:
            return image_id, per_image(image_id, load_pgm(path)), None
        except (DyowaError, OSError) as exc:
            return image_id, [], f"{type(exc).__name__}: {exc}"

    if cfg.jobs > 1:
        with ThreadPoolExecutor(cfg.jobs) as pool:
            results = list(pool.map(work, corpus))
    else:
        results = [work(item) for item in corpus]

    report = QualityReport()
    for image_id, rows, error in results:
        if error is not None:
            log.error("image %s failed: %s", image_id, error)
            report.add_failure(image_id, error)
        for method, value in rows:
            report.add(image_id, method, value)
    if cfg.output is not None:
        Path(cfg.output).write_text(report.to_csv())
    return report


def _save(cfg: ExperimentConfig, img: GrayImage, name: str) -> None:
    if cfg.images_out is not None:
        out = Path(cfg.images_out)
        out.mkdir(parents=True, exist_ok=True)
        save_pgm(img, out / f"{name}.pgm")


def reconstruct(img: GrayImage, method: str, k: int, crop: bool = False) -> GrayImage:
    """Reduce by ``k x k`` blocks with ``method`` and clone back up."""
    return magnify(reduce(img, k, method, crop=crop), k)


def _reference(img: GrayImage, k: int, crop: bool) -> GrayImage:
    m, n = img.rows - img.rows % k, img.cols - img.cols % k
    if crop and (m, n) != img.shape:
        return GrayImage(img.pixels[:m, :n], img.max_value)
    return img


def run_method1(cfg: ExperimentConfig) -> QualityReport:
    """Reduce, magnify, and score each image against the original."""
    k = cfg.block_size

    def per_image(image_id, img):
        ref = _reference(img, k, cfg.crop)
        rows = []
        for method in cfg.methods:
            out = reconstruct(img, method, k, cfg.crop)
            _save(cfg, out, f"{image_id}_{method}")
            rows.append((method, psnr(ref, out)))
        return rows

    return _run(cfg, per_image)


def run_method1_prime(cfg: ExperimentConfig) -> QualityReport:
    """As :func:`run_method1`, with an H window filter after magnification."""
    k = cfg.block_size

    def per_image(image_id, img):
        ref = _reference(img, k, cfg.crop)
        rows = []
        for method in cfg.methods:
            out = convolve_dyowa(reconstruct(img, method, k, cfg.crop), cfg.window, "h")
            _save(cfg, out, f"{image_id}_{method}")
            rows.append((method, psnr(ref, out)))
        return rows

    return _run(cfg, per_image)


def run_noise_study(cfg: ExperimentConfig) -> QualityReport:
    """Add noise, filter with each method, score against the clean image.

    The untreated noisy image is scored under the pseudo-method ``none``.
    """
    if cfg.sigma is None:
        raise UsageError("the noise study needs sigma")

    def per_image(image_id, img):
        noisy = add_gaussian_noise(img, NoiseSpec(cfg.sigma, image_seed(cfg.seed, image_id)))
        _save(cfg, noisy, f"{image_id}_{UNTREATED}")
        rows = [(UNTREATED, psnr(img, noisy))]
        for method in cfg.methods:
            out = convolve_dyowa(noisy, cfg.window, AGGREGATORS[method])
            _save(cfg, out, f"{image_id}_{method}")
            rows.append((method, psnr(img, out)))
        return rows

    return _run(cfg, per_image)
