"""Grayscale image operations: block reduction, pixel-cloning magnification,
sliding-window DYOWA filtering and seeded Gaussian noise."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .aggregate import Aggregator, get_aggregator
from .errors import DimensionError, FormatError, UsageError


@dataclass(eq=False)
class GrayImage:
    """An ``m x n`` raster of unit-interval pixels.

    ``max_value`` is the integer maximum of the source encoding (255 for
    8-bit files) and is used when writing the image back out.
    """

    pixels: np.ndarray
    max_value: int = 255

    def __post_init__(self):
        px = np.array(self.pixels, dtype=np.float64)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise DimensionError(f"image must be a non-empty 2-D array, got shape {px.shape}")
        if not np.all(np.isfinite(px)) or px.min() < 0.0 or px.max() > 1.0:
            raise FormatError("pixel values must lie in [0, 1]")
        if int(self.max_value) < 1:
            raise FormatError("max_value must be >= 1")
        px.setflags(write=False)
        self.pixels = px
        self.max_value = int(self.max_value)

    @property
    def rows(self) -> int:
        return self.pixels.shape[0]

    @property
    def cols(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def __repr__(self) -> str:
        return f"GrayImage({self.rows}x{self.cols}, max_value={self.max_value})"


@dataclass(frozen=True)
class NoiseSpec:
    """Gaussian noise with standard deviation ``sigma`` on the [0, 1] scale."""

    sigma: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.sigma <= 1.0:
            raise UsageError(f"sigma must lie in (0, 1], got {self.sigma}")
        if not 0 <= int(self.seed) < 2**64:
            raise UsageError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class BlockGrid:
    """``k x k`` tiles of an image; ``blocks[I, J]`` is tile (I, J)."""

    block_size: int
    blocks: np.ndarray  # (rows // k, cols // k, k, k)

    @property
    def grid_shape(self) -> tuple[int, int]:
        return self.blocks.shape[:2]

    def flattened(self) -> np.ndarray:
        """Tiles as row-major vectors, shape ``(R, C, k*k)``."""
        r, c, k, _ = self.blocks.shape
        return self.blocks.reshape(r, c, k * k)

    def assemble(self) -> np.ndarray:
        r, c, k, _ = self.blocks.shape
        return self.blocks.transpose(0, 2, 1, 3).reshape(r * k, c * k)


def normalize(raw, max_value: int) -> GrayImage:
    """Map an integer raster in ``[0, max_value]`` onto ``[0, 1]``."""
    arr = np.asarray(raw)
    if max_value < 1:
        raise FormatError("max_value must be >= 1")
    if arr.size and (arr.min() < 0 or arr.max() > max_value):
        raise FormatError(f"raster values must lie in [0, {max_value}]")
    return GrayImage(arr.astype(np.float64) / max_value, max_value)


def denormalize(img: GrayImage) -> np.ndarray:
    """Integer raster: round half up, then clamp to ``[0, max_value]``."""
    scaled = np.floor(img.pixels * img.max_value + 0.5)
    return np.clip(scaled, 0, img.max_value).astype(np.int64)


def _resolve(agg) -> Aggregator:
    return agg if isinstance(agg, Aggregator) else get_aggregator(agg)


def partition(img: GrayImage, k: int, crop: bool = False) -> BlockGrid:
    """Split ``img`` into ``k x k`` tiles in row-major order.

    With ``crop=True`` trailing rows/columns that do not fill a tile are
    dropped; otherwise both dimensions must be multiples of ``k``.
    """
    if k < 1:
        raise UsageError("block size must be >= 1")
    m, n = img.shape
    if m % k or n % k:
        if not crop:
            raise DimensionError(
                f"block size {k} does not divide image dimensions {m}x{n} "
                f"(rows {m}, cols {n}); pass crop=True to drop the remainder"
            )
        m, n = m - m % k, n - n % k
        if m == 0 or n == 0:
            raise DimensionError(f"image {img.rows}x{img.cols} is smaller than block size {k}")
    px = img.pixels[:m, :n]
    blocks = px.reshape(m // k, k, n // k, k).transpose(0, 2, 1, 3)
    return BlockGrid(k, blocks)


def reduce(img: GrayImage, k: int, agg, crop: bool = False) -> GrayImage:
    """Replace every ``k x k`` tile by ``agg`` of its row-major pixels."""
    agg = _resolve(agg)
    agg.check_arity(k * k)
    grid = partition(img, k, crop=crop)
    return GrayImage(agg.apply(grid.flattened()), img.max_value)


def magnify(img: GrayImage, k: int) -> GrayImage:
    """Enlarge by cloning each pixel into a ``k x k`` tile."""
    if k < 1:
        raise UsageError("magnification factor must be >= 1")
    px = np.repeat(np.repeat(img.pixels, k, axis=0), k, axis=1)
    return GrayImage(px, img.max_value)


def neighborhoods(img: GrayImage, window: int) -> np.ndarray:
    """Edge-replicated ``window x window`` neighbourhoods, shape ``(m, n, window**2)``."""
    pad = window // 2
    padded = np.pad(img.pixels, pad, mode="edge")
    return sliding_window_view(padded, (window, window)).reshape(
        img.rows, img.cols, window * window
    )


def convolve_dyowa(img: GrayImage, window: int = 3, weight_rule="h") -> GrayImage:
    """Filter ``img`` with an averaging operator over a sliding window.

    Each output pixel is the operator applied to the ``window x window``
    neighbourhood centred on it (row-major, borders replicated).  With
    ``"h"`` the weights come from the median deviations inside each window;
    ``"cowa"`` uses fixed centred OWA weights on the sorted window and
    ``"arith"`` the plain mean.  Any registered aggregator name or an
    :class:`Aggregator` instance is also accepted.
    """
    if window < 3 or window % 2 == 0:
        raise UsageError(f"window must be odd and >= 3, got {window}")
    if window > min(img.shape):
        raise UsageError(f"window {window} exceeds the image size {img.rows}x{img.cols}")
    agg = _resolve(weight_rule)
    agg.check_arity(window * window)
    out = np.empty(img.shape)
    # row bands bound the temporary neighbourhood stack
    hood = neighborhoods(img, window)
    band = max(1, (1 << 20) // (img.cols * window * window))
    for r in range(0, img.rows, band):
        out[r:r + band] = agg.apply(hood[r:r + band])
    return GrayImage(out, img.max_value)


def gaussian_field(shape: tuple[int, int], sigma: float, seed: int) -> np.ndarray:
    """Normal deviates keyed by ``(seed, row, col)``.

    Row ``i`` is drawn from a Philox stream with key ``seed`` and counter
    offset ``i`` in the high word, so each value depends only on its
    coordinates and rows may be generated in any order.
    """
    rows, cols = shape
    field = np.empty(shape)
    for i in range(rows):
        bitgen = np.random.Philox(key=int(seed), counter=[0, 0, 0, i])
        field[i] = np.random.Generator(bitgen).standard_normal(cols)
    return sigma * field


def add_gaussian_noise(img: GrayImage, spec: NoiseSpec) -> GrayImage:
    """Add seeded Gaussian noise and clamp to ``[0, 1]``."""
    noise = gaussian_field(img.shape, spec.sigma, spec.seed)
    return GrayImage(np.clip(img.pixels + noise, 0.0, 1.0), img.max_value)
