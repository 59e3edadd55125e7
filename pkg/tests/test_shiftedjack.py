import random
from fractions import Fraction as F

import pytest

from htjack.errors import ResourceLimitError
from htjack.exactseries import raising_factorial
from htjack.shiftedjack import (
    RowQStarInput,
    ck_limit_experiment,
    gamma_product_check,
    profile_moments,
    qstar_row,
    qstar_row_enumerate,
    replicate_partition,
)


class TestQStarRow:
    def test_k0_is_one(self):
        assert qstar_row(RowQStarInput((3, 1, 0), F(1, 2), 0)) == 1

    def test_k1_is_theta_times_sum(self):
        theta = F(2, 3)
        x = (F(5), F(2), F(-1, 2))
        assert qstar_row(RowQStarInput(x, theta, 1)) == theta * sum(x)

    def test_single_variable_falling_product(self):
        theta = F(1, 3)
        x = F(7, 2)
        for k in range(1, 6):
            expect = raising_factorial(theta, k)
            for j in range(2, k + 1):
                expect /= j
            for r in range(k):
                expect *= x - r
            assert qstar_row(RowQStarInput((x,), theta, k)) == expect

    def test_dp_matches_enumeration(self):
        rng = random.Random(3)
        for _ in range(25):
            n = rng.randint(1, 5)
            k = rng.randint(0, 5)
            theta = F(rng.randint(1, 5), rng.randint(1, 4))
            x = tuple(F(rng.randint(-4, 8), rng.randint(1, 3)) for _ in range(n))
            inp = RowQStarInput(x, theta, k)
            assert qstar_row(inp) == qstar_row_enumerate(inp)

    def test_vanishes_on_zero_vector(self):
        for k in range(1, 5):
            assert qstar_row(RowQStarInput((0, 0, 0), F(1, 2), k)) == 0

    def test_generating_identity_holds_for_every_ordering(self):
        # the evaluation is symmetric in x_i - theta*i, not in x_i, so the
        # ordering matters; the identity holds separately for each ordering
        for x in [(3, 1, 0), (0, 1, 3), (1, 3, 0)]:
            rep = gamma_product_check(x, F(1, 3), F(12), 40, tol=1e-10)
            assert rep.ok, (x, rep.abs_err)

    def test_vanishing_beyond_first_part(self):
        # on integer partitions the row evaluation vanishes once k exceeds
        # the largest part, so the alternating series terminates
        lam = (2, 1, 0)
        assert qstar_row(RowQStarInput(lam, F(1, 2), 1)) == F(3, 2)
        assert qstar_row(RowQStarInput(lam, F(1, 2), 2)) == 1
        for k in range(3, 8):
            assert qstar_row(RowQStarInput(lam, F(1, 2), k)) == 0

    def test_enumeration_budget(self):
        with pytest.raises(ResourceLimitError):
            qstar_row_enumerate(RowQStarInput((1,) * 30, F(1, 2), 20), budget=1000)


class TestGammaProduct:
    def test_zero_vector_both_sides_one(self):
        rep = gamma_product_check((0, 0), F(1, 2), F(9), 10)
        assert rep.lhs == pytest.approx(1.0, abs=1e-14)
        assert rep.rhs == pytest.approx(1.0, abs=1e-12)
        assert rep.ok

    def test_single_variable(self):
        rep = gamma_product_check((2,), F(1, 2), F(10), 30, tol=1e-10)
        assert rep.abs_err < 1e-10

    def test_three_variables(self):
        rep = gamma_product_check((3, 1, 0), F(1, 3), F(12), 40, tol=1e-8)
        assert rep.abs_err < 1e-8

    def test_forbidden_region_rejected(self):
        with pytest.raises(ValueError):
            gamma_product_check((3, 1, 0), F(1, 3), F(3), 10)

    def test_partial_sums_eventually_monotone(self):
        # needs non-integer inputs: on partitions the series terminates at
        # k = lambda_1 and the error is at float noise immediately
        x, theta, z = (F(5, 2), F(4, 3), F(1, 5)), F(1, 3), F(5)
        errs = [gamma_product_check(x, theta, z, k).abs_err for k in range(2, 31, 4)]
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 1e-6


class TestReplication:
    def test_counts(self):
        shape = replicate_partition((2, 1), 2, 7)
        assert shape == (2, 2, 2, 2, 1, 1, 1)
        assert len(replicate_partition((1,), 1, 10)) == 10

    def test_profile_moments_uniform_case(self):
        gamma = F(2)
        mv = profile_moments((), 1, gamma, 6)
        for k in range(1, 7):
            assert mv.m[k - 1] == (-gamma) ** k / (k + 1)


class TestCkLimit:
    def test_empty_shape_predicts_zero(self):
        reports = ck_limit_experiment((), 1, [8, 16], F(1), k_max=2)
        for rep in reports:
            assert rep.predicted == 0.0

    def test_single_box_errors_decrease(self):
        reports = ck_limit_experiment((1,), 1, [10, 20, 40], F(1), k_max=3)
        for rep in reports:
            assert rep.decreasing, (rep.k, rep.errors)

    def test_two_row_shape_errors_decrease(self):
        reports = ck_limit_experiment((2, 1), 2, [12, 24, 48], F(2), k_max=3)
        for rep in reports:
            assert rep.decreasing, (rep.k, rep.errors)
