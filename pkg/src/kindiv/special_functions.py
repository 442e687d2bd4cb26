"""Bernoulli numbers and certified digamma evaluation at positive rationals."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError, GuardError
from .interval import DEFAULT_PREC, Enclosure, ln_interval

BERNOULLI_MAX_INDEX = 64

# Below this precision the classical rule (shift to X >= 24, eight series
# terms, truncation < 2**-80) already meets the width contract.
_BASE_TERMS = 8
_BASE_SHIFT = 24
_MAX_TERMS = (BERNOULLI_MAX_INDEX - 2) // 2


@lru_cache(maxsize=None)
def _bernoulli_table(n_max: int) -> tuple[Fraction, ...]:
    values = [Fraction(1)]
    for n in range(1, n_max + 1):
        # sum_{j=0}^{n} C(n+1, j) B_j = 0
        acc = sum(math.comb(n + 1, j) * values[j] for j in range(n))
        values.append(-acc / (n + 1))
    return tuple(values)


def bernoulli(n: int) -> Fraction:
    """Exact Bernoulli number B_n with the convention B_1 = -1/2."""
    if n < 0:
        raise DomainError("Bernoulli index must be nonnegative")
    if n > BERNOULLI_MAX_INDEX:
        raise GuardError(f"Bernoulli index {n} exceeds guard {BERNOULLI_MAX_INDEX}")
    return _bernoulli_table(BERNOULLI_MAX_INDEX)[n]


def _omitted_term(terms: int, X: Fraction) -> Fraction:
    j = terms + 1
    return abs(bernoulli(2 * j)) / (2 * j * X ** (2 * j))


@lru_cache(maxsize=None)
def series_plan(prec: int) -> tuple[int, int]:
    """(number of series terms J, shift threshold X0) for a working precision.

    The first omitted term |B_{2J+2}| / ((2J+2) X0^(2J+2)) is kept below
    2**-(prec + 12).  Among admissible J the cheapest X0 + J is taken.
    """
    target = Fraction(1, 2 ** (prec + 12))
    best = None
    for J in range(_BASE_TERMS, _MAX_TERMS + 1):
        e = 2 * J + 2
        coeff = abs(bernoulli(e)) / e
        # float estimate, then exact correction
        est = math.exp((math.log(coeff.numerator) - math.log(coeff.denominator)
                        + (prec + 12) * math.log(2)) / e)
        X0 = max(_BASE_SHIFT, int(est))
        while X0 > _BASE_SHIFT and coeff / Fraction(X0 - 1) ** e <= target:
            X0 -= 1
        while coeff / Fraction(X0) ** e > target:
            X0 += 1
        if best is None or X0 + J < best[1] + best[0]:
            best = (J, X0)
        if X0 == _BASE_SHIFT:
            break
    return best


def _shift_sum(x: Fraction, count: int, prec: int) -> Enclosure:
    """Enclosure of sum_{n<count} 1/(x+n), accumulated in fixed point."""
    if count == 0:
        return Enclosure.exact(0, prec)
    p, q = x.numerator, x.denominator
    bits = prec + 40 + count.bit_length()
    num = q << bits
    lo = hi = 0
    d = p
    for _ in range(count):
        f, rem = divmod(num, d)
        lo += f
        hi += f + (1 if rem else 0)
        d += q
    scale = 1 << bits
    return Enclosure.from_bounds(Fraction(lo, scale), Fraction(hi, scale), prec)


def _asymptotic_part(X: Fraction, terms: int) -> Fraction:
    """-1/(2X) - sum_{j=1}^{J} B_{2j} / (2j X^{2j}), exactly."""
    inv2 = 1 / (X * X)
    acc = Fraction(0)
    power = Fraction(1)
    for j in range(1, terms + 1):
        power *= inv2
        acc += bernoulli(2 * j) / (2 * j) * power
    return -1 / (2 * X) - acc


@lru_cache(maxsize=8192)
def _digamma_cached(x: Fraction, prec: int) -> Enclosure:
    terms, threshold = series_plan(prec)
    wp = prec + 20
    shift = max(0, math.ceil(threshold - x))
    X = x + shift
    algebraic = Enclosure.exact(_asymptotic_part(X, terms), wp)
    err = _omitted_term(terms, X)
    value = ln_interval(Enclosure.exact(X, wp), wp) + algebraic
    value = value.widen(err) - _shift_sum(x, shift, wp)
    return value.rounded(prec)


def digamma(x, prec: int = DEFAULT_PREC) -> Enclosure:
    """Certified enclosure of psi(x) for rational x > 0.

    The argument is shifted by the recurrence psi(x+1) = psi(x) + 1/x until it
    reaches the series threshold; the real-axis asymptotic series is enveloping,
    so the first omitted term bounds the truncation error.
    """
    x = Fraction(x)
    if x <= 0:
        raise DomainError(f"digamma requires x > 0, got {x}")
    return _digamma_cached(x, prec)


def digamma_diff(a, x, M: int, prec: int = DEFAULT_PREC) -> Enclosure:
    """Enclosure of psi(x + a) - psi(x) from the series a * sum 1/((x+m)(x+a+m)).

    Terms m < M are summed with directed fixed-point rounding; the remainder
    is enclosed by [0, a/(x + M - 1)].
    """
    a, x = Fraction(a), Fraction(x)
    if a <= 0 or x <= 0:
        raise DomainError("digamma_diff requires a > 0 and x > 0")
    if M < 1:
        raise DomainError("digamma_diff requires M >= 1")
    bits = prec + 40 + M.bit_length()
    lo = hi = 0
    for m in range(M):
        term = a / ((x + m) * (x + a + m))
        f, rem = divmod(term.numerator << bits, term.denominator)
        lo += f
        hi += f + (1 if rem else 0)
    scale = 1 << bits
    tail = a / (x + M - 1)
    return Enclosure.from_bounds(Fraction(lo, scale), Fraction(hi, scale) + tail, prec)
