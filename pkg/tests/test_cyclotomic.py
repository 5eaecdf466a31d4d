import cmath
import math
from fractions import Fraction

from hypothesis import given, strategies as st

from fiberbb.cyclotomic import CyclotomicInteger, cyclotomic_polynomial, root_sum, root_sum_float


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(2) == (1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(8) == (1, 0, 0, 0, 1)
    # Phi_6 = x^2 - x + 1
    assert cyclotomic_polynomial(6) == (1, -1, 1)


def test_all_roots_sum_to_zero():
    for n in (2, 3, 4, 6, 8, 12):
        assert CyclotomicInteger.from_exponents(n, range(n)).is_zero()


def test_cube_roots_vanish_inside_larger_order():
    # 1 + w + w^2 with w = exp(2 pi i / 3), written in order 12
    assert CyclotomicInteger.from_exponents(12, [0, 4, 8]).is_zero()


def test_root_sum_values():
    assert root_sum([0, 1]).is_zero()  # 1 + (-1)
    assert root_sum([Fraction(1, 2), Fraction(3, 2)]).is_zero()
    assert root_sum([0, 0, 0, 0]).gaussian() == (4, 0)
    assert root_sum([Fraction(1, 2), 0]).gaussian() == (1, 1)
    assert root_sum([Fraction(1, 4)]).gaussian() is None


def test_addition_across_orders():
    a = root_sum([Fraction(1, 2)])
    b = root_sum([Fraction(3, 2)])
    assert (a + b).is_zero()
    assert root_sum([Fraction(1, 3), 1]).same_value(root_sum([1, Fraction(1, 3)]))


angle = st.fractions(min_value=0, max_value=2, max_denominator=8)


@given(st.lists(angle, max_size=12), st.sampled_from([1, -1]))
def test_exact_agrees_with_float(angles, sign):
    exact = root_sum(angles, sign)
    ref = sum((cmath.exp(sign * 1j * math.pi * float(a)) for a in angles), 0j)
    assert abs(complex(exact) - ref) < 1e-9
    hp = complex(root_sum_float(angles, sign))
    assert abs(hp - ref) < 1e-9
    # exact zero iff numerically zero (no false cancellations at this size)
    assert exact.is_zero() == (abs(ref) < 1e-9)
