"""Averaging aggregation operators on the unit hypercube.

Every operator here works on the *last* axis of its input, so a single
vector ``(n,)`` yields a float and a stack ``(..., n)`` yields an array of
shape ``(...)``.  This is what lets the image code apply an operator to all
blocks or windows of an image in one call.

Operators provided:

* ``min_agg``, ``max_agg``, ``arith``, ``median``
* ``owa`` with an explicit weight vector, and the centred ``cowa`` weights
* ``dyowa`` for any :class:`WeightFunctionFamily` (weights that depend on
  the input itself)
* ``h``: the DYOWA whose weights shrink with the distance of each component
  from the median of the input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ArityError, DomainError, FamilyViolationError, UsageError

#: spread (max - min) at or below which a vector is treated as constant
CONSTANT_TOL = 1e-12
#: slack allowed on the sum of a weight vector at construction time
WEIGHT_SUM_TOL = 1e-9
#: slack allowed on the sum of family weights when evaluating a DYOWA
FAMILY_SUM_TOL = 1e-6
#: rounding overshoot outside [0, 1] that is silently clamped
ROUNDING_TOL = 1e-12


def as_unit_vector(x, min_length: int = 1) -> np.ndarray:
    """Validate ``x`` as one or more vectors in ``[0, 1]^n``.

    Returns a float64 array whose last axis is the vector axis.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    n = arr.shape[-1]
    if n < min_length:
        raise ArityError(f"vector length {n} is below the minimum {min_length}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("vector contains non-finite values")
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise DomainError(
            f"vector components must lie in [0, 1], got range "
            f"[{arr.min()!r}, {arr.max()!r}]"
        )
    return arr


def as_weight_vector(w, length: int | None = None) -> np.ndarray:
    """Validate ``w`` as nonnegative weights summing to one."""
    arr = np.asarray(w, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ArityError("weight vector must be one-dimensional and non-empty")
    if length is not None and arr.size != length:
        raise ArityError(f"weight vector has length {arr.size}, expected {length}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError("weights must be finite and nonnegative")
    total = arr.sum()
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise DomainError(f"weights sum to {total!r}, expected 1")
    return arr


def _unit_range(values: np.ndarray) -> np.ndarray:
    # clamp pure rounding overshoot; anything larger is a real defect
    if values.size and (
        values.min() < -ROUNDING_TOL or values.max() > 1.0 + ROUNDING_TOL
    ):
        raise DomainError(
            f"aggregation produced a value outside [0, 1]: "
            f"[{values.min()!r}, {values.max()!r}]"
        )
    return np.clip(values, 0.0, 1.0)


def _scalar_or_array(values: np.ndarray, batched: bool):
    return values if batched else float(values)


# ---------------------------------------------------------------------------
# Sorting and fixed-weight operators
# ---------------------------------------------------------------------------


def sort_desc(x) -> tuple[np.ndarray, np.ndarray]:
    """Sort a single vector in non-increasing order.

    Ties keep their original relative order.  Returns ``(values, perm)`` with
    ``values[i] == x[perm[i]]``; ``perm`` holds 0-based source indices.

    >>> sort_desc([0.1, 1.0, 0.9])
    (array([1. , 0.9, 0.1]), array([1, 2, 0]))
    """
    arr = as_unit_vector(x)
    if arr.ndim != 1:
        raise ArityError("sort_desc expects a single vector")
    perm = np.argsort(-arr, kind="stable")
    return arr[perm], perm


def _sorted_desc(x: np.ndarray) -> np.ndarray:
    return np.flip(np.sort(x, axis=-1), axis=-1)


def _weighted_sum(w: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``sum(w * x)`` over the last axis, exact on constant vectors.

    Weights summing to one only up to rounding would otherwise turn
    ``(c, ..., c)`` into ``c +- 1 ulp``.
    """
    total = (w * x).sum(axis=-1)
    return np.where(x.max(axis=-1) == x.min(axis=-1), x[..., 0], total)


def _owa(w: np.ndarray, x: np.ndarray) -> np.ndarray:
    return _weighted_sum(w, _sorted_desc(x))


def owa(w, x):
    """Ordered weighted average: ``sum(w[i] * sorted_desc(x)[i])``."""
    arr = as_unit_vector(x)
    weights = as_weight_vector(w)
    if weights.size != arr.shape[-1]:
        raise ArityError(
            f"weight vector length {weights.size} != input length {arr.shape[-1]}"
        )
    return _scalar_or_array(_unit_range(_owa(weights, arr)), arr.ndim > 1)


def arith(x):
    arr = as_unit_vector(x)
    return _scalar_or_array(ARITH.apply(arr), arr.ndim > 1)


def min_agg(x):
    arr = as_unit_vector(x)
    return _scalar_or_array(arr.min(axis=-1), arr.ndim > 1)


def max_agg(x):
    arr = as_unit_vector(x)
    return _scalar_or_array(arr.max(axis=-1), arr.ndim > 1)


def median(x):
    """Middle order statistic; mean of the two middle ones for even length."""
    arr = as_unit_vector(x)
    return _scalar_or_array(np.median(arr, axis=-1), arr.ndim > 1)


def median_weights(n: int) -> np.ndarray:
    """OWA weight vector that reproduces :func:`median` for length ``n``."""
    if n < 1:
        raise ArityError("median weights need n >= 1")
    w = np.zeros(n)
    if n % 2:
        w[n // 2] = 1.0
    else:
        w[n // 2 - 1] = w[n // 2] = 0.5
    return w


def cowa_weights(n: int) -> np.ndarray:
    """Centred OWA weights ``2(2j-1)/n^2``, mirrored about the middle.

    For odd ``n`` the centre weight absorbs the remainder so the vector sums
    to one.
    """
    if n < 1:
        raise ArityError("cOWA weights need n >= 1")
    j = np.arange(1, n // 2 + 1)
    head = 2.0 * (2.0 * j - 1.0) / n**2
    if n % 2 == 0:
        return np.concatenate([head, head[::-1]])
    centre = 1.0 - 2.0 * head.sum()
    return np.concatenate([head, [centre], head[::-1]])


# ---------------------------------------------------------------------------
# Weight-function families and DYOWA
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightFunctionFamily:
    """``n`` weight functions of the whole input vector.

    ``weights_fn`` maps an array ``(..., n)`` to weights of the same shape.
    ``arity=None`` means the family is defined for every length.  Families
    built from per-component callables should use :meth:`from_evaluators`.
    """

    weights_fn: Callable[[np.ndarray], np.ndarray]
    arity: int | None = None
    name: str = "family"
    min_arity: int = 1

    @classmethod
    def from_evaluators(
        cls, evaluators: Sequence[Callable[[np.ndarray], float]], name: str = "family"
    ) -> "WeightFunctionFamily":
        """Build a family from one callable per component.

        Each callable receives a single 1-D vector and returns that
        component's weight.
        """
        evaluators = tuple(evaluators)
        n = len(evaluators)
        if n < 1:
            raise ArityError("a family needs at least one weight function")

        def weights_fn(x: np.ndarray) -> np.ndarray:
            flat = x.reshape(-1, n)
            out = np.array(
                [[f(row) for f in evaluators] for row in flat], dtype=np.float64
            )
            return out.reshape(x.shape)

        return cls(weights_fn=weights_fn, arity=n, name=name)

    @property
    def evaluators(self) -> tuple[Callable[[np.ndarray], float], ...]:
        if self.arity is None:
            raise ArityError(f"family {self.name!r} has no fixed arity")
        return tuple(
            (lambda x, i=i: float(self.weights_fn(as_unit_vector(x))[i]))
            for i in range(self.arity)
        )

    def accepts(self, n: int) -> bool:
        return n >= self.min_arity and (self.arity is None or n == self.arity)

    def __call__(self, x, tolerance: float = FAMILY_SUM_TOL) -> np.ndarray:
        """Evaluate the weights at ``x``, checking arity and the unit sum."""
        arr = as_unit_vector(x)
        n = arr.shape[-1]
        if not self.accepts(n):
            raise ArityError(f"family {self.name!r} does not accept length {n}")
        w = np.asarray(self.weights_fn(arr), dtype=np.float64)
        if w.shape != arr.shape:
            raise FamilyViolationError(
                f"family {self.name!r} returned shape {w.shape}, expected {arr.shape}"
            )
        err = np.abs(w.sum(axis=-1) - 1.0)
        if np.any(~np.isfinite(err)) or np.any(err > tolerance):
            raise FamilyViolationError(
                f"family {self.name!r} weights do not sum to 1 "
                f"(max deviation {np.nanmax(err)!r})"
            )
        return w

    def validate(
        self, samples: int = 1000, seed: int = 0, tolerance: float = WEIGHT_SUM_TOL
    ) -> None:
        """Sample random inputs and raise if any weight sum strays from 1."""
        rng = np.random.default_rng(seed)
        n = self.arity if self.arity is not None else max(self.min_arity, 3)
        self(rng.random((samples, n)), tolerance=tolerance)


def dyowa(family: WeightFunctionFamily, x):
    """``sum(f_i(x) * x_i)`` with weights drawn from ``family`` at ``x``."""
    arr = as_unit_vector(x)
    w = family(arr)
    return _scalar_or_array(_unit_range(_weighted_sum(w, arr)), arr.ndim > 1)


def _uniform_weights(x: np.ndarray) -> np.ndarray:
    return np.full_like(x, 1.0 / x.shape[-1])


def _indicator(x: np.ndarray, index: np.ndarray) -> np.ndarray:
    w = np.zeros_like(x)
    np.put_along_axis(w, index[..., None], 1.0, axis=-1)
    return w


def _rank_desc(x: np.ndarray) -> np.ndarray:
    # rank[i] = position of x[i] in the stable descending sort
    perm = np.argsort(-x, axis=-1, kind="stable")
    return np.argsort(perm, axis=-1, kind="stable")


def _ratio_weights(x: np.ndarray) -> np.ndarray:
    total = x.sum(axis=-1, keepdims=True)
    zero = total == 0.0
    return np.where(zero, 1.0 / x.shape[-1], x / np.where(zero, 1.0, total))


def uniform_family(arity: int | None = None) -> WeightFunctionFamily:
    """Constant weights ``1/n``; the DYOWA is the arithmetic mean."""
    return WeightFunctionFamily(_uniform_weights, arity, "uniform")


def min_family(arity: int | None = None) -> WeightFunctionFamily:
    """All weight on the (first) smallest component."""
    return WeightFunctionFamily(
        lambda x: _indicator(x, np.argmin(x, axis=-1)), arity, "min"
    )


def max_family(arity: int | None = None) -> WeightFunctionFamily:
    """All weight on the (first) largest component."""
    return WeightFunctionFamily(
        lambda x: _indicator(x, np.argmax(x, axis=-1)), arity, "max"
    )


def owa_family(w) -> WeightFunctionFamily:
    """An OWA expressed as a DYOWA: component ``i`` gets ``w[rank(x_i)]``."""
    weights = as_weight_vector(w)
    return WeightFunctionFamily(
        lambda x: weights[_rank_desc(x)], weights.size, "owa"
    )


def ratio_family(arity: int | None = None) -> WeightFunctionFamily:
    """Weights ``x_i / sum(x)`` (``1/n`` at the origin).

    The resulting DYOWA is ``sum(x^2) / sum(x)``; it is idempotent and
    homogeneous but neither shift-invariant nor monotone.
    """
    return WeightFunctionFamily(_ratio_weights, arity, "ratio")


# ---------------------------------------------------------------------------
# H: median-deviation weights
# ---------------------------------------------------------------------------


def _h_parts(x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = x.shape[-1]
    med = np.median(x, axis=-1, keepdims=True)
    constant = (x.max(axis=-1) - x.min(axis=-1)) <= CONSTANT_TOL
    dev = np.abs(x - med)
    total = dev.sum(axis=-1, keepdims=True)
    total = np.where(constant[..., None], 1.0, total)
    w = (1.0 - dev / total) / (n - 1)
    w = np.where(constant[..., None], 1.0 / n, w)
    return w, med[..., 0], constant


def _h_weights(x: np.ndarray) -> np.ndarray:
    return _h_parts(x)[0]


def _h(x: np.ndarray) -> np.ndarray:
    w, med, constant = _h_parts(x)
    # constant input returns the constant itself, not a rounded weighted sum
    return np.where(constant, med, (w * x).sum(axis=-1))


def h_weights(x) -> np.ndarray:
    """Weights ``(1 - |x_i - med| / sum_j |x_j - med|) / (n - 1)``.

    A constant vector (spread <= ``CONSTANT_TOL``) gets the uniform weights
    ``1/n``.  Requires ``n >= 2``.
    """
    arr = as_unit_vector(x, min_length=2)
    return _h_weights(arr)


def h(x):
    """The DYOWA built on :func:`h_weights`.

    >>> round(h([0.1, 0.3, 0.0]), 12)
    0.1
    """
    arr = as_unit_vector(x, min_length=2)
    return _scalar_or_array(_unit_range(_h(arr)), arr.ndim > 1)


def h_family(arity: int | None = None) -> WeightFunctionFamily:
    return WeightFunctionFamily(_h_weights, arity, "h", min_arity=2)


# ---------------------------------------------------------------------------
# Aggregator objects, negations and duals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Aggregator:
    """A named operator ``[0,1]^n -> [0,1]``.

    ``func`` receives an already validated array ``(..., n)`` and must
    reduce the last axis.  ``arity=None`` accepts every length
    ``>= min_arity``.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    arity: int | None = None
    min_arity: int = 1

    def accepts(self, n: int) -> bool:
        return n >= self.min_arity and (self.arity is None or n == self.arity)

    def check_arity(self, n: int) -> None:
        if not self.accepts(n):
            want = self.arity if self.arity is not None else f">= {self.min_arity}"
            raise ArityError(f"aggregator {self.name!r} needs length {want}, got {n}")

    def apply(self, x) -> np.ndarray:
        """Batched evaluation; always returns an array of shape ``x.shape[:-1]``."""
        arr = as_unit_vector(x)
        self.check_arity(arr.shape[-1])
        return _unit_range(np.asarray(self.func(arr), dtype=np.float64))

    def __call__(self, x):
        arr = as_unit_vector(x)
        return _scalar_or_array(self.apply(arr), arr.ndim > 1)


def _cowa(x: np.ndarray) -> np.ndarray:
    return _owa(cowa_weights(x.shape[-1]), x)


MIN = Aggregator("min", lambda x: x.min(axis=-1))
MAX = Aggregator("max", lambda x: x.max(axis=-1))
ARITH = Aggregator("arith", lambda x: _weighted_sum(1.0 / x.shape[-1], x))
MEDIAN = Aggregator("median", lambda x: np.median(x, axis=-1))
COWA = Aggregator("cowa", _cowa)
H = Aggregator("h", _h, min_arity=2)

AGGREGATORS: dict[str, Aggregator] = {
    agg.name: agg for agg in (H, COWA, ARITH, MEDIAN, MIN, MAX)
}


def get_aggregator(name: str) -> Aggregator:
    try:
        return AGGREGATORS[name]
    except KeyError:
        raise UsageError(
            f"unknown aggregator {name!r}; choose from {sorted(AGGREGATORS)}"
        ) from None


def owa_aggregator(w, name: str = "owa") -> Aggregator:
    weights = as_weight_vector(w)
    return Aggregator(name, lambda x: _owa(weights, x), arity=weights.size)


def dyowa_aggregator(family: WeightFunctionFamily, name: str | None = None) -> Aggregator:
    return Aggregator(
        name or f"dyowa({family.name})",
        lambda x: _weighted_sum(family(x), x),
        arity=family.arity,
        min_arity=family.min_arity,
    )


@dataclass(frozen=True)
class StrongNegation:
    """An involutive, order-reversing map of ``[0, 1]`` onto itself."""

    map: Callable[[np.ndarray], np.ndarray]
    name: str = "negation"

    def __call__(self, a):
        return self.map(np.asarray(a, dtype=np.float64))

    def validate(self, samples: int = 1000, seed: int = 0, tolerance: float = 1e-12) -> None:
        """Raise :class:`DomainError` if sampling finds a non-involutive or
        non-antitonic point."""
        rng = np.random.default_rng(seed)
        a, b = np.sort(rng.random((2, samples)), axis=0)
        if np.any(np.abs(self(self(a)) - a) > tolerance):
            raise DomainError(f"negation {self.name!r} is not involutive")
        if np.any(self(a) < self(b) - tolerance):
            raise DomainError(f"negation {self.name!r} is not antitonic")


STANDARD_NEGATION = StrongNegation(lambda a: 1.0 - a, "standard")


def dual(agg: Aggregator, neg: StrongNegation = STANDARD_NEGATION) -> Aggregator:
    """The dual operator ``N(f(N(x_1), ..., N(x_n)))``."""

    def func(x: np.ndarray) -> np.ndarray:
        return neg(_unit_range(np.asarray(agg.func(_unit_range(neg(x))))))

    return Aggregator(f"dual({agg.name})", func, agg.arity, agg.min_arity)
