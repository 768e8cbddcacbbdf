"""Closed-form upper and lower bounds, and the partial harmonic sums s_k."""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath

from .core import Theta

# comparisons of integer family sizes against real bounds
GUARD = 1e-9


@dataclass(frozen=True)
class BoundReport:
    case_label: str
    expression: str
    value_exact: Union[int, float]
    value_floored: int

    def admits(self, size: int) -> bool:
        return size <= self.value_floored

    def to_dict(self) -> dict:
        return {
            "case": self.case_label,
            "expression": self.expression,
            "value": self.value_exact,
            "floored": self.value_floored,
        }


def _floor(x: float) -> int:
    return math.floor(x + GUARD)


def bound_case(theta: Theta, has_size_two_set: bool) -> str:
    if 2 * theta.a > theta.b:
        return "1"
    if theta.a > 1:
        return "2"
    if theta.b == 2 and has_size_two_set:
        return "3a"
    return "3b"


def main_upper_bound(n: int, theta: Theta, has_size_two_set: bool = False,
                     core_size: int | None = None) -> BoundReport:
    """Upper bound on |F| for r-closed theta-intersecting F over [n], r >= 3.

    ``core_size`` replaces the n - a (or n - 1) factor of the real-valued
    cases by n - |C|, the sharper form that appears inside the argument.
    """
    if n < 1:
        raise ValueError("n must be positive")
    a, b = theta.a, theta.b
    case = bound_case(theta, has_size_two_set)
    if case == "1":
        v = (n - a) // (b - a) + 2
        return BoundReport(case, f"floor(({n}-{a})/({b}-{a})) + 2", v, v)
    span = n - (a if core_size is None else core_size) if case == "2" else n - (
        1 if core_size is None else core_size)
    if case == "2":
        coef = 2 * (math.log(b) - math.log(a) + 1) / (b - a)
        expr = f"2*((ln {b} - ln {a} + 1)/({b}-{a}))*{span} + 1"
    elif case == "3a":
        coef = 1 + math.log(2)
        expr = f"(1 + ln 2)*{span} + 1"
    else:
        coef = 2 * math.log(b) / (b - 1)
        expr = f"(2 ln {b}/({b}-1))*{span} + 1"
    v = coef * span + 1
    return BoundReport(case, expr, v, _floor(v))


def bisection_bound(n: int) -> int:
    if n < 2:
        raise ValueError("bisection_bound needs n >= 2")
    return (3 * n) // 2 - 2


def tor_full_bound(n: int, theta: Theta) -> int:
    if n < theta.a:
        raise ValueError("tor_full_bound needs n >= a")
    return (n - theta.a) // (theta.b - theta.a)


def nonextremal_gap() -> float:
    """3/2 - 2 ln 2: the per-element gap between the extremal size and the
    bound satisfied by non-extremal bisection closed families."""
    return 1.5 - 2 * math.log(2)


def lower_bound_formulas(n: int, theta: Theta, variant: str, k: int | None = None) -> float:
    """Floor-free sizes of the shared-petal constructions.

    variant is one of ``two_layer``, ``b_odd_three_layer``,
    ``b_even_three_layer`` or ``imin_k`` (which needs ``k``).
    """
    a, b = theta.a, theta.b
    if variant == "two_layer":
        return (n - 2 * a) * (1 / (b - a) + 1 / (2 * (b - a)))
    if variant in ("b_odd_three_layer", "b_even_three_layer"):
        if a != 1:
            raise ValueError(f"{variant} needs theta = 1/b")
        if variant == "b_odd_three_layer":
            if b % 2 == 0:
                raise ValueError("b_odd_three_layer needs odd b")
            return (n - 3) * (1 / (b - 1) + 1 / (2 * (b - 1)) + 1 / (3 * (b - 1)))
        if b % 2:
            raise ValueError("b_even_three_layer needs even b")
        return (n - 4) * (1 / (b - 1) + 1 / (2 * (b - 1)) + 1 / (4 * (b - 1)))
    if variant == "imin_k":
        if theta != Theta(1, 2):
            raise ValueError("imin_k is stated for theta = 1/2")
        if k is None or k < 4 or k % 2:
            raise ValueError("imin_k needs an even k >= 4")
        return (2 * n - k - 4) * (1 / k + 1 / (k + 2) + 1 / (k + 4))
    raise ValueError(f"unknown variant {variant!r}")


# ---------------------------------------------------------------------------
# partial harmonic sums

def _floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def harmonic_range(eta: Union[int, Fraction], m: int, k: int) -> tuple[int, int]:
    """(L, U) with s_k = sum of 1/i for L < i <= U."""
    eta = Fraction(eta)
    if eta <= 1:
        raise ValueError("eta must exceed 1")
    if m < 1 or k < 1:
        raise ValueError("m and k must be positive integers")
    return _floor_frac(m * eta ** (k - 1)), _floor_frac(m * eta ** k)


def _range_sum(lo: int, hi: int) -> tuple[int, int]:
    """sum_{i=lo}^{hi} 1/i as an unreduced (p, q), by binary splitting."""
    if lo == hi:
        return 1, lo
    mid = (lo + hi) // 2
    p1, q1 = _range_sum(lo, mid)
    p2, q2 = _range_sum(mid + 1, hi)
    return p1 * q2 + p2 * q1, q1 * q2


def harmonic_s(eta: Union[int, Fraction], m: int, k: int, max_terms: int = 50_000) -> Fraction:
    """Exact s_k.  Raises ValueError when the sum has more than max_terms terms."""
    L, U = harmonic_range(eta, m, k)
    if U <= L:
        return Fraction(0)
    if U - L > max_terms:
        raise ValueError(f"s_{k} has {U - L} terms (limit {max_terms}); use harmonic_s_enclosure")
    p, q = _range_sum(L + 1, U)
    return Fraction(p, q)


_EXACT_TERMS = 2_000


@contextmanager
def _iv_dps(dps: int):
    saved = mpmath.iv.prec
    mpmath.iv.dps = dps
    try:
        yield mpmath.iv
    finally:
        mpmath.iv.prec = saved


def harmonic_s_enclosure(eta: Union[int, Fraction], m: int, k: int,
                         dps: int = 60) -> mpmath.iv.mpf:
    """Rigorous interval containing s_k.

    Short sums are evaluated exactly.  Long sums use
    H_N = ln N + gamma + 1/(2N) - 1/(12N^2) + 1/(120N^4) - e_N with
    0 < e_N < 1/(252 N^6); gamma cancels in H_U - H_L, leaving a logarithm,
    an exact rational, and a remainder in (-1/(252 U^6), 1/(252 L^6)).
    """
    L, U = harmonic_range(eta, m, k)
    with _iv_dps(dps) as iv:
        if U - L <= _EXACT_TERMS:
            s = harmonic_s(eta, m, k)
            return iv.mpf(s.numerator) / iv.mpf(s.denominator)

        def poly(N: int) -> Fraction:
            N = Fraction(N)
            return 1 / (2 * N) - 1 / (12 * N ** 2) + 1 / (120 * N ** 4)

        rational = poly(U) - poly(L)
        lo_r = -Fraction(1, 252 * U ** 6)
        hi_r = Fraction(1, 252 * L ** 6)
        log_part = iv.log(iv.mpf(U)) - iv.log(iv.mpf(L))
        q = iv.mpf(rational.numerator) / iv.mpf(rational.denominator)
        lo_iv = iv.mpf(lo_r.numerator) / iv.mpf(lo_r.denominator)
        hi_iv = iv.mpf(hi_r.numerator) / iv.mpf(hi_r.denominator)
        rem = iv.mpf([lo_iv.a, hi_iv.b])
        return log_part + q + rem


def ln_enclosure(eta: Union[int, Fraction], dps: int = 60) -> mpmath.iv.mpf:
    eta = Fraction(eta)
    with _iv_dps(dps) as iv:
        return iv.log(iv.mpf(eta.numerator)) - iv.log(iv.mpf(eta.denominator))


def strictly_less(x: mpmath.iv.mpf, y: mpmath.iv.mpf) -> bool:
    """True iff the intervals certify x < y."""
    return x.b < y.a
