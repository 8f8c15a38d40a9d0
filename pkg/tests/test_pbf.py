import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from psrbo.pbf import (
    BudgetExceededError,
    QuadraticPBF,
    all_bits,
    brute_force_minimize,
    evaluate,
    from_alpha,
    sign_split,
)


def naive_value(A, b, c, x):
    """Term-by-term double loop, no vectorization."""
    n = len(x)
    total = c
    for i in range(n):
        total += b[i] * x[i]
        for j in range(n):
            total += A[i][j] * x[i] * x[j]
    return total


def random_pbf(rng, n):
    A = rng.normal(size=(n, n))
    return QuadraticPBF(A + A.T, rng.normal(size=n), rng.normal())


class TestEvaluate:
    def test_linear_only(self):
        f = QuadraticPBF(np.zeros((2, 2)), [1.0, -2.0], 0.5)
        assert evaluate(f, [1, 1]) == -0.5

    def test_single_pair_counts_twice(self):
        f = QuadraticPBF([[0, 1.5], [1.5, 0]], [0, 0])
        assert evaluate(f, [1, 1]) == 3.0

    def test_matches_double_loop_on_all_inputs(self):
        rng = np.random.default_rng(7)
        f = random_pbf(rng, 10)
        for x in all_bits(10):
            assert evaluate(f, x) == pytest.approx(naive_value(f.A, f.b, f.c, x), abs=1e-12)

    def test_evaluate_many_agrees(self):
        rng = np.random.default_rng(8)
        f = random_pbf(rng, 8)
        X = all_bits(8)
        np.testing.assert_allclose(f.evaluate_many(X), [evaluate(f, x) for x in X], atol=1e-12)

    def test_dimension_mismatch(self):
        f = QuadraticPBF.zero(3)
        with pytest.raises(ValueError):
            evaluate(f, [0, 1])

    def test_non_binary_rejected(self):
        with pytest.raises(ValueError):
            evaluate(QuadraticPBF.zero(2), [0, 2])

    def test_diagonal_folded_into_linear_term(self):
        f = QuadraticPBF([[2.0, 0.0], [0.0, -1.0]], [0.0, 0.0])
        assert np.all(np.diag(f.A) == 0)
        np.testing.assert_array_equal(f.b, [2.0, -1.0])
        assert evaluate(f, [1, 1]) == 1.0

    def test_asymmetric_input_is_symmetrized(self):
        f = QuadraticPBF([[0.0, 3.0], [1.0, 0.0]], [0.0, 0.0])
        np.testing.assert_array_equal(f.A, f.A.T)
        assert evaluate(f, [1, 1]) == 4.0

    def test_immutable(self):
        f = QuadraticPBF.zero(2)
        with pytest.raises(ValueError):
            f.A[0, 1] = 1.0

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            QuadraticPBF(np.zeros((1, 1)), [np.inf])


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 7))
def test_evaluate_is_linear_in_coefficients(seed, n):
    rng = np.random.default_rng(seed)
    f, g = random_pbf(rng, n), random_pbf(rng, n)
    for x in all_bits(n):
        assert evaluate(f + g, x) == pytest.approx(evaluate(f, x) + evaluate(g, x), abs=1e-9)


class TestFromAlpha:
    def test_coefficients_read_off(self):
        f = from_alpha(0.5, [1.0, -2.0], {(0, 1): 3.0}, 0.1)
        np.testing.assert_allclose(f.b, [1.1, -1.9])
        assert f.A[0, 1] == f.A[1, 0] == 1.5
        assert f.c == 0.5

    def test_zero(self):
        f = from_alpha(0.0, np.zeros(4), {}, 0.0)
        assert not f.A.any() and not f.b.any() and f.c == 0.0

    def test_matches_model_formula(self):
        rng = np.random.default_rng(11)
        n = 8
        pairs = list(itertools.combinations(range(n), 2))
        for _ in range(50):
            a0, lin, lam = rng.normal(), rng.normal(size=n), rng.uniform(0, 1)
            quad = {p: rng.normal() for p in pairs}
            f = from_alpha(a0, lin, quad, lam)
            for x in all_bits(n):
                direct = a0 + sum((lin[j] + lam) * x[j] for j in range(n))
                direct += sum(a * x[i] * x[j] for (i, j), a in quad.items())
                assert evaluate(f, x) == pytest.approx(direct, abs=1e-9)

    @pytest.mark.parametrize("quad", [{(1, 0): 1.0}, {(0, 0): 1.0}, {(0, 5): 1.0}])
    def test_bad_indices(self, quad):
        with pytest.raises(ValueError):
            from_alpha(0.0, np.zeros(3), quad)

    def test_duplicate_keys(self):
        class Pairs(dict):
            def items(self):
                return [((0, 1), 1.0), ((0, 1), 2.0)]

        with pytest.raises(ValueError, match="duplicate"):
            from_alpha(0.0, np.zeros(2), Pairs())

    def test_negative_lambda(self):
        with pytest.raises(ValueError):
            from_alpha(0.0, np.zeros(2), {}, -0.1)


class TestSignSplit:
    def test_all_positive(self):
        s = sign_split(np.array([[0, 2.0], [2.0, 0]]))
        np.testing.assert_array_equal(s.a_plus, [[0, 2], [2, 0]])
        assert not s.a_minus.any()

    def test_all_negative(self):
        A = np.array([[0, -1.0], [-1.0, 0]])
        s = sign_split(A)
        assert not s.a_plus.any()
        np.testing.assert_array_equal(s.a_minus, A)

    def test_raw_mixed_matrix(self):
        s = sign_split(np.array([[0, 2.0], [-1.0, 0]]))
        np.testing.assert_array_equal(s.a_plus, [[0, 2], [0, 0]])
        np.testing.assert_array_equal(s.a_minus, [[0, 0], [-1, 0]])


@given(arrays(np.float64, (5, 5), elements=st.floats(-1e6, 1e6)))
def test_sign_split_reconstructs(A):
    s = sign_split(A)
    np.testing.assert_array_equal(s.a_plus + s.a_minus, A)
    assert np.all(s.a_plus >= 0) and np.all(s.a_minus <= 0)


class TestBruteForce:
    def test_tie_goes_to_lexicographic_smallest(self):
        f = QuadraticPBF([[0, -0.5], [-0.5, 0]], [1.0, -2.0])
        x, v = brute_force_minimize(f)
        np.testing.assert_array_equal(x, [0, 1])
        assert v == -2.0

    def test_zero_function(self):
        x, v = brute_force_minimize(QuadraticPBF.zero(5))
        np.testing.assert_array_equal(x, np.zeros(5))
        assert v == 0.0

    def test_below_random_samples(self):
        rng = np.random.default_rng(3)
        f = random_pbf(rng, 12)
        _, v = brute_force_minimize(f)
        for x in rng.integers(0, 2, size=(1000, 12)):
            assert v <= evaluate(f, x)

    def test_below_every_input(self):
        rng = np.random.default_rng(4)
        f = random_pbf(rng, 9)
        _, v = brute_force_minimize(f)
        assert all(v <= evaluate(f, x) for x in all_bits(9))

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            brute_force_minimize(QuadraticPBF.zero(25))
