"""MSE / PSNR and the per-image quality report."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError

AVERAGE_ID = "average"


def _pixels(img) -> np.ndarray:
    return np.asarray(getattr(img, "pixels", img), dtype=np.float64)


def mse(a, b) -> float:
    """Mean squared pixel difference of two equally sized images."""
    pa, pb = _pixels(a), _pixels(b)
    if pa.shape != pb.shape:
        raise DimensionError(f"image shapes differ: {pa.shape} vs {pb.shape}")
    return float(np.mean((pa - pb) ** 2))


def psnr_from_mse(err: float, max_i: float = 1.0) -> float:
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(max_i**2 / err)


def psnr(a, b, max_i: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for identical images.

    Pixels are compared on the normalised [0, 1] scale, so ``max_i`` is 1 by
    default.  The result equals the 0..255 computation with ``max_i=255``.
    """
    if max_i <= 0:
        raise ValueError("max_i must be positive")
    return psnr_from_mse(mse(a, b), max_i)


def format_db(value: float) -> str:
    return "inf" if math.isinf(value) and value > 0 else f"{value:.2f}"


@dataclass
class QualityReport:
    """PSNR per (image, method), with per-method averages over finite entries."""

    rows: list[tuple[str, str, float]] = field(default_factory=list)
    failures: list[tuple[str, str]] = field(default_factory=list)

    def add(self, image_id: str, method: str, psnr_db: float) -> None:
        self.rows.append((image_id, method, float(psnr_db)))

    def add_failure(self, image_id: str, message: str) -> None:
        self.failures.append((image_id, message))

    def sorted_rows(self) -> list[tuple[str, str, float]]:
        return sorted(self.rows, key=lambda r: (r[0], r[1]))

    @property
    def methods(self) -> list[str]:
        return sorted({m for _, m, _ in self.rows})

    @property
    def averages(self) -> dict[str, float]:
        """Mean PSNR per method over finite rows.

        A method whose rows are all infinite averages to ``inf``.
        """
        out = {}
        for method in self.methods:
            values = [v for _, m, v in self.rows if m == method]
            finite = [v for v in values if math.isfinite(v)]
            out[method] = math.fsum(finite) / len(finite) if finite else math.inf
        return out

    @property
    def infinite_counts(self) -> dict[str, int]:
        return {
            method: sum(1 for _, m, v in self.rows if m == method and math.isinf(v))
            for method in self.methods
        }

    def value(self, image_id: str, method: str) -> float:
        for i, m, v in self.rows:
            if i == image_id and m == method:
                return v
        raise KeyError((image_id, method))

    def to_csv(self, averages: bool = True) -> str:
        """Serialize as ``image,method,psnr_db`` rows, sorted by image then method.

        Averages follow as rows with image id ``average``; failures, if any,
        follow after a blank line under an ``image,error`` header.
        """
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["image", "method", "psnr_db"])
        for image_id, method, value in self.sorted_rows():
            writer.writerow([image_id, method, format_db(value)])
        if averages:
            for method, value in self.averages.items():
                writer.writerow([AVERAGE_ID, method, format_db(value)])
        if self.failures:
            writer.writerow([])
            writer.writerow(["image", "error"])
            for image_id, message in sorted(self.failures):
                writer.writerow([image_id, message])
        return buf.getvalue()

    def summary(self) -> str:
        """Human-readable table: one line per image, methods as columns."""
        methods = self.methods
        images = sorted({i for i, _, _ in self.rows})
        lookup = {(i, m): v for i, m, v in self.rows}
        width = max([len(AVERAGE_ID)] + [len(i) for i in images])
        lines = [" " * width + "".join(f"{m:>10}" for m in methods)]
        for image_id in images:
            cells = (format_db(lookup[(image_id, m)]) if (image_id, m) in lookup else "-" for m in methods)
            lines.append(f"{image_id:<{width}}" + "".join(f"{c:>10}" for c in cells))
        avg = self.averages
        lines.append(f"{AVERAGE_ID:<{width}}" + "".join(f"{format_db(avg[m]):>10}" for m in methods))
        return "\n".join(lines)
