from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyowa.aggregate import (
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
    dyowa_aggregator,
    get_aggregator,
    h,
    h_family,
    h_weights,
    max_agg,
    max_family,
    median,
    median_weights,
    min_agg,
    min_family,
    owa,
    owa_family,
    ratio_family,
    sort_desc,
    uniform_family,
)
from dyowa.errors import ArityError, DomainError, FamilyViolationError, UsageError

from oracles import cowa_weights_exact, h_exact, h_weights_exact

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


def vectors(min_size=2, max_size=16):
    return st.lists(unit, min_size=min_size, max_size=max_size)


class TestSortDesc:
    def test_example(self):
        values, perm = sort_desc([0.1, 1.0, 0.9])
        np.testing.assert_array_equal(values, [1.0, 0.9, 0.1])
        # 0-based form of the 1-based permutation (2, 3, 1)
        np.testing.assert_array_equal(perm, [1, 2, 0])

    def test_ties_are_stable(self):
        values, perm = sort_desc([0.5, 0.5])
        np.testing.assert_array_equal(perm, [0, 1])
        values, perm = sort_desc([0.2, 0.7, 0.2, 0.7])
        np.testing.assert_array_equal(perm, [1, 3, 0, 2])

    def test_singleton(self):
        values, perm = sort_desc([0.3])
        assert values.tolist() == [0.3] and perm.tolist() == [0]

    @given(vectors(1))
    def test_output_is_sorted_permutation(self, xs):
        values, perm = sort_desc(xs)
        assert np.all(np.diff(values) <= 0)
        np.testing.assert_array_equal(values, np.asarray(xs)[perm])


class TestOwa:
    def test_reference_fixture(self):
        assert owa([0.3, 0.4, 0.3], [0.1, 1.0, 0.9]) == pytest.approx(0.69, abs=1e-12)

    def test_max_and_min_weights(self):
        assert owa([1, 0, 0], [0.2, 0.9, 0.5]) == 0.9
        assert owa([0, 0, 1], [0.2, 0.9, 0.5]) == 0.2

    def test_length_mismatch(self):
        with pytest.raises(ArityError):
            owa([0.5, 0.5], [0.1, 0.2, 0.3])

    def test_bad_weights(self):
        with pytest.raises(DomainError):
            owa([0.5, 0.6], [0.1, 0.2])
        with pytest.raises(DomainError):
            owa([1.5, -0.5], [0.1, 0.2])

    def test_out_of_range_input(self):
        with pytest.raises(DomainError):
            owa([0.5, 0.5], [0.1, 1.2])

    def test_batched(self):
        x = np.array([[0.1, 1.0, 0.9], [0.2, 0.9, 0.5]])
        np.testing.assert_allclose(owa([0.3, 0.4, 0.3], x), [0.69, 0.53])

    @given(vectors(1))
    def test_reductions(self, xs):
        n = len(xs)
        assert owa(np.full(n, 1 / n), xs) == pytest.approx(arith(xs), abs=1e-12)
        assert owa(np.eye(n)[0], xs) == max(xs)
        assert owa(np.eye(n)[-1], xs) == min(xs)

    @given(vectors(1))
    def test_median_as_owa(self, xs):
        assert owa(median_weights(len(xs)), xs) == pytest.approx(median(xs), abs=1e-12)


class TestBasicOperators:
    def test_values(self):
        assert arith([0.2, 0.4, 0.6]) == pytest.approx(0.4)
        assert min_agg([0.2, 0.4, 0.6]) == 0.2
        assert max_agg([0.2, 0.4, 0.6]) == 0.6

    @pytest.mark.parametrize("c", [0.0, 0.37, 1.0])
    def test_constant(self, c):
        assert max_agg([c] * 5) == c
        assert min_agg([c] * 5) == c

    def test_median(self):
        assert median([0.1, 0.3, 0]) == 0.1
        assert median([0.2, 0.4]) == pytest.approx(0.3)
        assert median([0.6] * 4) == 0.6

    def test_registry(self):
        assert get_aggregator("h") is H
        with pytest.raises(UsageError):
            get_aggregator("harmonic")


class TestCowa:
    def test_even(self):
        np.testing.assert_allclose(cowa_weights(4), [0.125, 0.375, 0.375, 0.125], atol=0)

    def test_odd(self):
        np.testing.assert_allclose(cowa_weights(3), [2 / 9, 5 / 9, 2 / 9], atol=1e-15)

    def test_singleton(self):
        assert cowa_weights(1).tolist() == [1.0]

    def test_zero(self):
        with pytest.raises(ArityError):
            cowa_weights(0)

    @pytest.mark.parametrize("n", range(1, 65))
    def test_matches_exact_and_is_palindromic(self, n):
        w = cowa_weights(n)
        np.testing.assert_allclose(w, [float(v) for v in cowa_weights_exact(n)], atol=1e-15)
        np.testing.assert_array_equal(w, w[::-1])
        assert abs(w.sum() - 1) <= 1e-12
        assert np.all(w >= 0)


class TestDyowa:
    def test_ratio_family_values(self):
        fam = ratio_family()
        assert dyowa(fam, [0.5, 0.2, 0.1]) == pytest.approx(0.375, abs=5e-4)
        assert dyowa(fam, [0.5, 0.22, 0.2]) == pytest.approx(0.368, abs=5e-4)

    def test_ratio_family_origin(self):
        np.testing.assert_allclose(ratio_family()([0.0, 0.0, 0.0]), [1 / 3] * 3)
        assert dyowa(ratio_family(), [0.0, 0.0]) == 0.0

    def test_ratio_family_not_shift_invariant(self):
        fam = ratio_family()
        assert dyowa(fam, [0.0, 0.5]) == pytest.approx(0.5, abs=1e-12)
        assert dyowa(fam, [0.5, 1.0]) == pytest.approx(5 / 6, abs=1e-12)

    @given(vectors(1))
    def test_uniform_family_is_arith(self, xs):
        assert dyowa(uniform_family(), xs) == pytest.approx(arith(xs), abs=1e-12)

    @given(vectors(1))
    def test_min_max_families(self, xs):
        assert dyowa(min_family(), xs) == min(xs)
        assert dyowa(max_family(), xs) == max(xs)

    def test_owa_family_weights(self):
        fam = owa_family([0.3, 0.4, 0.3])
        np.testing.assert_allclose(fam([0.1, 1.0, 0.9]), [0.3, 0.3, 0.4])
        assert dyowa(fam, [0.1, 1.0, 0.9]) == pytest.approx(0.69, abs=1e-12)

    @given(vectors(3, 3))
    def test_owa_family_matches_owa(self, xs):
        w = [0.2, 0.5, 0.3]
        assert dyowa(owa_family(w), xs) == pytest.approx(owa(w, xs), abs=1e-12)

    def test_arity_mismatch(self):
        with pytest.raises(ArityError):
            dyowa(owa_family([0.5, 0.5]), [0.1, 0.2, 0.3])

    def test_family_violation(self):
        bad = WeightFunctionFamily(lambda x: np.full_like(x, 0.5), name="halves")
        with pytest.raises(FamilyViolationError):
            dyowa(bad, [0.1, 0.2, 0.3])

    def test_family_tolerance_is_loose_at_evaluation(self):
        fuzzy = WeightFunctionFamily(lambda x: np.full_like(x, 1 / x.shape[-1]) + 1e-8)
        assert dyowa(fuzzy, [0.5, 0.5]) == pytest.approx(0.5, abs=1e-7)
        with pytest.raises(FamilyViolationError):
            fuzzy.validate()

    def test_from_evaluators_sine_family(self):
        # two weight functions sin(x) * y and 1 - sin(x) * y
        fam = WeightFunctionFamily.from_evaluators(
            [lambda v: np.sin(v[0]) * v[1], lambda v: 1 - np.sin(v[0]) * v[1]],
            name="sine",
        )
        fam.validate()
        x, y = 0.4, 0.7
        expected = np.sin(x) * y * x + (1 - np.sin(x) * y) * y
        assert dyowa(fam, [x, y]) == pytest.approx(expected, abs=1e-15)
        batch = dyowa(fam, [[x, y], [y, x]])
        assert batch.shape == (2,)
        assert fam.evaluators[0]([x, y]) == pytest.approx(np.sin(x) * y)

    @settings(max_examples=200)
    @given(st.integers(1, 12), unit)
    def test_idempotent_for_every_family(self, n, c):
        x = [c] * n
        for fam in (uniform_family(), min_family(), max_family(), ratio_family(),
                    owa_family(cowa_weights(n))):
            assert dyowa(fam, x) == pytest.approx(c, abs=1e-12)


class TestHWeights:
    def test_worked_example(self):
        np.testing.assert_allclose(h_weights([0.1, 0.3, 0.0]), [0.5, 1 / 6, 1 / 3], atol=5e-4)

    def test_exact_oracle_example(self):
        exact = [float(v) for v in h_weights_exact([Fraction(1, 10), Fraction(3, 10), 0])]
        np.testing.assert_allclose(h_weights([0.1, 0.3, 0.0]), exact, atol=1e-15)

    def test_constant_branch(self):
        np.testing.assert_array_equal(h_weights([0.4] * 4), [0.25] * 4)

    @pytest.mark.parametrize("n", [3, 4, 7])
    def test_single_outlier(self, n):
        w = h_weights([0.6] + [0.0] * (n - 1))
        np.testing.assert_allclose(w, [0.0] + [1 / (n - 1)] * (n - 1), atol=1e-15)

    def test_length_one_rejected(self):
        with pytest.raises(ArityError):
            h_weights([0.5])
        with pytest.raises(ArityError):
            h([0.5])

    @given(vectors())
    def test_against_exact_oracle(self, xs):
        exact = h_weights_exact(xs)
        np.testing.assert_allclose(h_weights(xs), [float(v) for v in exact], atol=1e-12)

    @given(vectors())
    def test_sum_and_bounds(self, xs):
        w = h_weights(xs)
        n = len(xs)
        assert abs(w.sum() - 1) <= 1e-12
        assert np.all(w >= 0) and np.all(w <= 1 / (n - 1) + 1e-15)

    @given(vectors(), st.floats(-1, 1))
    def test_shift_invariant_weights(self, xs, lam):
        x = np.asarray(xs)
        lam = float(np.clip(lam, -x.min(), 1 - x.max()))
        y = np.clip(x + lam, 0, 1)
        if np.ptp(x) <= 1e-9:
            return  # constant detection may legitimately flip near the threshold
        np.testing.assert_allclose(h_weights(y), h_weights(x), atol=1e-9)

    @given(vectors(), st.floats(1e-3, 1))
    def test_scale_invariant_weights(self, xs, lam):
        x = np.asarray(xs)
        if np.ptp(x) * lam <= 1e-9:
            return
        np.testing.assert_allclose(h_weights(lam * x), h_weights(x), atol=1e-9)


class TestH:
    def test_example_value(self):
        # weights (1/2, 1/6, 1/3) dotted with x give exactly 0.1
        assert h([0.1, 0.3, 0.0]) == pytest.approx(0.1, abs=1e-9)
        assert float(h_exact([Fraction(1, 10), Fraction(3, 10), 0])) == pytest.approx(0.1, abs=1e-15)

    @given(unit, unit)
    def test_pair_is_mean(self, a, b):
        assert h([a, b]) == pytest.approx((a + b) / 2, abs=1e-15)

    def test_constant_exact(self):
        assert h([0.7, 0.7, 0.7]) == 0.7
        assert h([0.1] * 9) == 0.1

    @given(vectors())
    def test_against_exact_oracle(self, xs):
        assert h(xs) == pytest.approx(float(h_exact(xs)), abs=1e-12)

    @given(vectors())
    def test_averaging(self, xs):
        assert min(xs) - 1e-12 <= h(xs) <= max(xs) + 1e-12

    @given(vectors(), st.randoms(use_true_random=False))
    def test_symmetric(self, xs, rnd):
        ys = list(xs)
        rnd.shuffle(ys)
        assert h(ys) == pytest.approx(h(xs), abs=1e-12)

    @given(vectors(), st.floats(-1, 1))
    def test_shift_invariant(self, xs, lam):
        x = np.asarray(xs)
        lam = float(np.clip(lam, -x.min(), 1 - x.max()))
        y = np.clip(x + lam, 0, 1)
        assert h(y) == pytest.approx(h(x) + lam, abs=1e-9)

    @given(vectors(), unit)
    def test_homogeneous(self, xs, lam):
        x = np.asarray(xs)
        assert h(lam * x) == pytest.approx(lam * h(x), abs=1e-9)

    def test_aggregator_matches_family(self):
        rng = np.random.default_rng(3)
        x = rng.random((100, 6))
        np.testing.assert_allclose(H(x), dyowa(h_family(), x), atol=1e-15)


class TestAggregatorObjects:
    def test_arity_check(self):
        with pytest.raises(ArityError):
            H([0.4])
        fixed = Aggregator("pair", lambda x: x.mean(axis=-1), arity=2)
        with pytest.raises(ArityError):
            fixed([0.1, 0.2, 0.3])

    def test_scalar_and_batch(self):
        assert isinstance(ARITH([0.2, 0.4]), float)
        assert ARITH([[0.2, 0.4], [0.0, 1.0]]).shape == (2,)

    def test_out_of_range_result_is_an_error(self):
        broken = Aggregator("broken", lambda x: x.sum(axis=-1))
        with pytest.raises(DomainError):
            broken([0.8, 0.8])

    def test_rounding_overshoot_is_clamped(self):
        nudged = Aggregator("nudged", lambda x: x.max(axis=-1) + 5e-13)
        assert nudged([1.0, 0.2]) == 1.0

    def test_dyowa_aggregator(self):
        agg = dyowa_aggregator(ratio_family(3))
        assert agg([0.5, 0.2, 0.1]) == pytest.approx(0.375)
        assert agg.arity == 3


class TestDual:
    def test_dual_of_max_is_min(self):
        assert dual(MAX, STANDARD_NEGATION)([0.2, 0.8]) == pytest.approx(0.2)
        rng = np.random.default_rng(0)
        x = rng.random((1000, 5))
        np.testing.assert_allclose(dual(MAX)(x), MIN(x), atol=1e-15)

    def test_arith_is_self_dual(self):
        rng = np.random.default_rng(1)
        x = rng.random((1000, 7))
        np.testing.assert_allclose(dual(ARITH)(x), ARITH(x), atol=1e-12)

    @pytest.mark.parametrize("agg", [H, COWA, MEDIAN, ARITH, MIN, MAX], ids=lambda a: a.name)
    def test_involution(self, agg):
        rng = np.random.default_rng(2)
        x = rng.random((500, 6))
        np.testing.assert_allclose(dual(dual(agg))(x), agg(x), atol=1e-12)

    def test_h_is_self_dual(self):
        # median deviations are reflected by 1 - x, so the weights are unchanged
        rng = np.random.default_rng(4)
        x = rng.random((500, 5))
        np.testing.assert_allclose(dual(H)(x), H(x), atol=1e-12)

    def test_negation_validation(self):
        STANDARD_NEGATION.validate()
        with pytest.raises(DomainError):
            StrongNegation(lambda a: a, "identity").validate()
        with pytest.raises(DomainError):
            StrongNegation(lambda a: 1 - a**2, "not involutive").validate()
