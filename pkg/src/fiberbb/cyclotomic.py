"""
Exact sums of roots of unity.

A sum ``sum_j c_j * zeta_N**j`` with integer ``c_j`` is an element of the
ring Z[zeta_N]. Deciding whether such a sum vanishes cannot be done by
counting alone (1 + w + w**2 = 0 for w = zeta_3), so values are reduced
modulo the cyclotomic polynomial Phi_N. The remainder has degree
< phi(N) and is zero exactly when the sum is zero.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional

import mpmath


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Exact division of integer polynomials (low -> high); ``den`` must be monic."""
    num = list(num)
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    dq = len(den) - 1
    if len(num) - 1 < dq:
        return [0], num
    quot = [0] * (len(num) - dq)
    for i in range(len(num) - 1, dq - 1, -1):
        c = num[i]
        if c:
            quot[i - dq] = c
            for j in range(dq + 1):
                num[i - dq + j] -= c * den[j]
    rem = num[:dq] if dq else [0]
    return quot, rem


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (low -> high) of Phi_n."""
    if n < 1:
        raise ValueError("order must be positive")
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_polynomial(d)))
            assert not any(rem)
    return tuple(poly)


@dataclass(frozen=True)
class CyclotomicInteger:
    """``sum_j coeffs[j] * exp(2 pi i j / order)`` in canonical reduced form."""

    order: int
    coeffs: tuple[int, ...]

    @classmethod
    def from_counts(cls, order: int, counts: Iterable[int]) -> "CyclotomicInteger":
        counts = list(counts)
        if len(counts) != order:
            raise ValueError("need one count per power of the root")
        _, rem = _poly_divmod(counts, list(cyclotomic_polynomial(order)))
        rem = rem + [0] * (len(cyclotomic_polynomial(order)) - 1 - len(rem))
        return cls(order, tuple(rem))

    @classmethod
    def from_exponents(cls, order: int, exponents: Iterable[int]) -> "CyclotomicInteger":
        counts = [0] * order
        for e in exponents:
            counts[e % order] += 1
        return cls.from_counts(order, counts)

    @classmethod
    def zero(cls, order: int = 1) -> "CyclotomicInteger":
        return cls.from_counts(order, [0] * order)

    def counts(self) -> list[int]:
        return list(self.coeffs) + [0] * (self.order - len(self.coeffs))

    def lift(self, order: int) -> "CyclotomicInteger":
        if order % self.order:
            raise ValueError(f"cannot lift order {self.order} to {order}")
        step = order // self.order
        counts = [0] * order
        for j, c in enumerate(self.coeffs):
            counts[j * step] += c
        return CyclotomicInteger.from_counts(order, counts)

    def __add__(self, other: "CyclotomicInteger") -> "CyclotomicInteger":
        n = math.lcm(self.order, other.order)
        a, b = self.lift(n).counts(), other.lift(n).counts()
        return CyclotomicInteger.from_counts(n, [x + y for x, y in zip(a, b)])

    def same_value(self, other: "CyclotomicInteger") -> bool:
        n = math.lcm(self.order, other.order)
        return self.lift(n) == other.lift(n)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __complex__(self) -> complex:
        return sum(
            (c * cmath.exp(2j * math.pi * j / self.order) for j, c in enumerate(self.coeffs)),
            0j,
        )

    def to_mpc(self, dps: int = 40) -> mpmath.mpc:
        with mpmath.workdps(dps):
            return mpmath.fsum(
                c * mpmath.expjpi(mpmath.mpf(2 * j) / self.order) for j, c in enumerate(self.coeffs)
            )

    def gaussian(self) -> Optional[tuple[int, int]]:
        """``(re, im)`` if the value is a Gaussian integer, else None (decided exactly)."""
        z = complex(self)
        re, im = round(z.real), round(z.imag)
        n = math.lcm(self.order, 4)
        counts = [0] * n
        counts[0 if re >= 0 else n // 2] += abs(re)
        counts[n // 4 if im >= 0 else 3 * n // 4] += abs(im)
        if CyclotomicInteger.from_counts(n, counts) == self.lift(n):
            return re, im
        return None


def root_sum(angles_over_pi: Iterable[Fraction], sign: int = 1) -> CyclotomicInteger:
    """Exact ``sum_s exp(sign * i * pi * a_s)`` for rational ``a_s``."""
    angles = [Fraction(a) for a in angles_over_pi]
    if not angles:
        return CyclotomicInteger.zero()
    den = math.lcm(*(a.denominator for a in angles))
    order = 2 * den
    # exp(i pi a) = zeta_order ** (a * den)
    exps = [int(sign * a * den) for a in angles]
    return CyclotomicInteger.from_exponents(order, exps)


def root_sum_float(angles_over_pi: Iterable[Fraction], sign: int = 1, dps: int = 40) -> mpmath.mpc:
    """High-precision floating counterpart of :func:`root_sum`."""
    with mpmath.workdps(dps):
        return mpmath.fsum(
            mpmath.expjpi(sign * mpmath.mpf(a.numerator) / a.denominator)
            for a in (Fraction(x) for x in angles_over_pi)
        )
