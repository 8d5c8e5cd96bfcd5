"""Dynamic ordered weighted averaging (DYOWA) operators and their use for
image reduction and noise filtering."""

from .aggregate import (
    AGGREGATORS,
    ARITH,
    COWA,
    H,
    MAX,
    MEDIAN,
    MIN,
    STANDARD_NEGATION,
    Aggregator,
    StrongNegation,
    WeightFunctionFamily,
    arith,
    cowa_weights,
    dual,
    dyowa,
    get_aggregator,
    h,
    h_weights,
    max_agg,
    median,
    min_agg,
    owa,
    sort_desc,
)
from .errors import (
    ArityError,
    DimensionError,
    DomainError,
    DyowaError,
    FamilyViolationError,
    FormatError,
    UsageError,
)
from .image import (
    BlockGrid,
    GrayImage,
    NoiseSpec,
    add_gaussian_noise,
    convolve_dyowa,
    denormalize,
    magnify,
    normalize,
    partition,
    reduce,
)
from .imgio import load_pgm, read_pgm, save_pgm, write_pgm
from .metrics import QualityReport, mse, psnr
from .properties import check_property, search_special_element

__version__ = "0.1.0"
