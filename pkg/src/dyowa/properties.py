"""Sampling screens for algebraic properties of aggregators.

These are refutation tools: a reported counterexample is a real violation,
while ``holds=True`` only means no violation turned up among the samples.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .aggregate import Aggregator
from .errors import UsageError

PROPERTIES = (
    "idempotent",
    "symmetric",
    "shift_invariant",
    "homogeneous",
    "averaging_bounds",
    "monotone",
)
SPECIAL_KINDS = ("neutral", "absorbing", "zero_divisor", "one_divisor")

_CHUNK = 1 << 16


@dataclass
class PropertyReport:
    property: str
    holds: bool
    checked: int
    counterexample: tuple | None = None
    # |deviation| at the counterexample
    violation: float | None = None

    def __str__(self) -> str:
        status = "holds" if self.holds else "FAILS"
        line = f"{self.property}: {status} ({self.checked} samples)"
        if self.counterexample is not None:
            parts = ", ".join(np.array2string(np.asarray(c), precision=6) for c in self.counterexample)
            line += f"; counterexample {parts}"
        return line


@dataclass
class SpecialElementReport:
    kind: str
    found: bool
    candidates: list[float] = field(default_factory=list)


def _parse_property(prop: str, order: float) -> tuple[str, float]:
    m = re.fullmatch(r"homogeneous\(([^)]+)\)", prop)
    if m:
        return "homogeneous", float(m.group(1))
    if prop not in PROPERTIES:
        raise UsageError(f"unknown property {prop!r}; choose from {PROPERTIES}")
    return prop, order


def _lengths(agg: Aggregator, lengths) -> list[int]:
    if agg.arity is not None:
        return [agg.arity]
    usable = [n for n in lengths if agg.accepts(n)]
    if not usable:
        raise UsageError(f"no admissible vector length for {agg.name!r} in {list(lengths)}")
    return usable


def _draw(rng, prop, size, n, order):
    """Return (args, deviation_fn) for one batch of ``size`` samples."""
    x = rng.random((size, n))
    if prop == "idempotent":
        c = rng.random(size)
        return (np.repeat(c[:, None], n, axis=1),), lambda agg, v: np.abs(agg(v) - v[:, 0])
    if prop == "symmetric":
        y = rng.permuted(x, axis=1)
        return (x, y), lambda agg, a, b: np.abs(agg(a) - agg(b))
    if prop == "averaging_bounds":
        def dev(agg, a):
            f = agg(a)
            return np.maximum(a.min(axis=1) - f, f - a.max(axis=1)).clip(min=0.0)
        return (x,), dev
    if prop == "shift_invariant":
        lo, hi = -x.min(axis=1), 1.0 - x.max(axis=1)
        lam = lo + rng.random(size) * (hi - lo)
        y = np.clip(x + lam[:, None], 0.0, 1.0)
        return (x, y, lam), lambda agg, a, b, s: np.abs(agg(b) - (agg(a) + s))
    if prop == "homogeneous":
        lam = rng.random(size)
        y = x * lam[:, None]
        return (x, y, lam), lambda agg, a, b, s: np.abs(agg(b) - s**order * agg(a))
    if prop == "monotone":
        # half the pairs move every coordinate up, half bump a single one
        step = rng.random((size, n)) * (1.0 - x)
        single = rng.random(size) < 0.5
        pick = rng.integers(0, n, size)
        mask = np.where(single[:, None], np.arange(n) == pick[:, None], True)
        y = np.clip(x + np.where(mask, step, 0.0), 0.0, 1.0)
        return (x, y), lambda agg, a, b: (agg(a) - agg(b)).clip(min=0.0)
    raise AssertionError(prop)


def check_property(
    agg: Aggregator,
    prop: str,
    samples: int = 1000,
    seed: int = 0,
    tolerance: float = 1e-9,
    *,
    order: float = 1.0,
    lengths=range(2, 17),
    pairs=None,
) -> PropertyReport:
    """Screen ``agg`` for ``prop`` on ``samples`` seeded random inputs.

    Args:
        agg: operator under test.
        prop: one of :data:`PROPERTIES`; ``"homogeneous(k)"`` sets the order.
        samples: number of random inputs (or input pairs).
        seed: RNG seed; the report is a deterministic function of it.
        tolerance: allowed absolute deviation.
        order: homogeneity order ``k`` in ``f(lx) = l^k f(x)``.
        lengths: candidate vector lengths for variable-arity aggregators.
        pairs: explicit ``(x, y)`` pairs with ``x <= y`` to test for
            ``monotone`` instead of random sampling.

    Returns:
        A :class:`PropertyReport`; ``counterexample`` holds the inputs of
        the first violating sample.
    """
    prop, order = _parse_property(prop, order)
    if samples < 1:
        raise UsageError("samples must be >= 1")

    if pairs is not None:
        if prop != "monotone":
            raise UsageError("explicit pairs are only supported for 'monotone'")
        for x, y in pairs:
            x, y = np.asarray(x, float), np.asarray(y, float)
            if np.any(x > y):
                raise UsageError("monotone pairs must satisfy x <= y componentwise")
            diff = float(agg(x)) - float(agg(y))
            if diff > tolerance:
                return PropertyReport(prop, False, len(pairs), (x, y), diff)
        return PropertyReport(prop, True, len(pairs))

    rng = np.random.default_rng(seed)
    ns = _lengths(agg, lengths)
    sizes = rng.choice(ns, size=samples)
    first: tuple[int, tuple, float] | None = None
    for n in ns:
        index = np.flatnonzero(sizes == n)
        for start in range(0, index.size, _CHUNK):
            chunk = index[start:start + _CHUNK]
            args, deviation = _draw(rng, prop, chunk.size, n, order)
            dev = np.asarray(deviation(agg.apply, *args))
            bad = np.flatnonzero(~(dev <= tolerance))
            if bad.size:
                k = bad[0]
                if first is None or chunk[k] < first[0]:
                    vectors = tuple(a[k] for a in args if np.ndim(a) == 2)
                    first = (int(chunk[k]), vectors, float(dev[k]))
                break
    if first is None:
        return PropertyReport(prop, True, samples)
    return PropertyReport(prop, False, samples, first[1], first[2])


def search_monotonicity_violation(
    agg: Aggregator,
    pairs: int = 1_000_000,
    seed: int = 0,
    tolerance: float = 1e-12,
    lengths=range(2, 17),
) -> PropertyReport:
    """Hunt for ``x <= y`` with ``agg(x) > agg(y)`` over many seeded pairs."""
    return check_property(
        agg, "monotone", samples=pairs, seed=seed, tolerance=tolerance, lengths=lengths
    )


def _grid(step: float) -> np.ndarray:
    if not 0.0 < step < 1.0:
        raise UsageError("grid_step must lie in (0, 1)")
    count = int(np.floor(1.0 / step + 1e-9))
    grid = step * np.arange(count + 1)
    if grid[-1] < 1.0 - 1e-12:
        grid = np.append(grid, 1.0)
    return np.minimum(grid, 1.0)


def search_special_element(
    agg: Aggregator,
    kind: str,
    grid_step: float = 0.05,
    probes: int = 1000,
    seed: int = 0,
    n: int | None = None,
    tolerance: float = 1e-9,
) -> SpecialElementReport:
    """Grid-scan candidates for a neutral/absorbing element or a divisor.

    Neutral and absorbing elements are universal claims, so a candidate is
    kept only if it passes every probe.  Zero and one divisors are
    existential, so a candidate is kept as soon as one probe witnesses it;
    only interior grid points are considered for them.
    """
    if kind not in SPECIAL_KINDS:
        raise UsageError(f"unknown element kind {kind!r}; choose from {SPECIAL_KINDS}")
    if n is None:
        n = agg.arity if agg.arity is not None else max(agg.min_arity, 3)
    agg.check_arity(n)
    rng = np.random.default_rng(seed)
    grid = _grid(grid_step)
    if kind in ("zero_divisor", "one_divisor"):
        grid = grid[(grid > 0.0) & (grid < 1.0)]

    pos = rng.integers(0, n, probes)
    at_pos = np.arange(n) == pos[:, None]
    if kind == "neutral":
        t = rng.random(probes)
    elif kind == "zero_divisor":
        companions = 1.0 - rng.random((probes, n))  # (0, 1]
    else:
        companions = rng.random((probes, n))  # [0, 1)

    candidates = []
    for a in grid:
        if kind == "neutral":
            v = np.where(at_pos, t[:, None], a)
            keep = np.all(np.abs(agg.apply(v) - t) <= tolerance)
        else:
            v = np.where(at_pos, a, companions)
            out = agg.apply(v)
            if kind == "absorbing":
                keep = np.all(np.abs(out - a) <= tolerance)
            elif kind == "zero_divisor":
                keep = np.any(out <= tolerance)
            else:
                keep = np.any(out >= 1.0 - tolerance)
        if keep:
            candidates.append(float(a))
    return SpecialElementReport(kind, bool(candidates), candidates)
