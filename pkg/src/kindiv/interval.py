"""Certified real enclosures with dyadic endpoints.

Endpoints are raw mpmath ``mpf`` tuples (sign, mantissa, exponent, bitcount),
so every endpoint is an exact dyadic rational.  Arithmetic rounds the lower
endpoint toward -inf and the upper endpoint toward +inf, which keeps the true
value inside the interval.

Transcendental endpoints (log, exp) come from mpmath evaluated with guard bits
and then pushed outward by a relative safety margin before the final directed
rounding.  Square roots use mpmath's directed integer square root directly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath.libmp import (
    fone,
    from_int,
    from_rational,
    fzero,
    mpf_abs,
    mpf_add,
    mpf_cmp,
    mpf_div,
    mpf_exp,
    mpf_log,
    mpf_mul,
    mpf_neg,
    mpf_shift,
    mpf_sqrt,
    mpf_sub,
    round_ceiling,
    round_floor,
    round_nearest,
    to_float,
    to_rational,
)

from .errors import DomainError, PrecisionError

DEFAULT_PREC = 192
MAX_PREC = 1024

# 330 significant digits; the constant tests re-derive both independently.
_PI_DIGITS = (
    "3.14159265358979323846264338327950288419716939937510582097494459230781640628"
    "620899862803482534211706798214808651328230664709384460955058223172535940812848"
    "111745028410270193852110555964462294895493038196442881097566593344612847564823"
    "378678316527120190914564856692346034861045432664821339360726024914127372458700"
    "660631558817488152092"
)
_GAMMA_DIGITS = (
    "0.57721566490153286060651209008240243104215933593992359880576723488486772677"
    "766467093694706329174674951463144724980708248096050401448654283622417399764492"
    "353625350033374293733773767394279259525824709491600873520394816567085323315177"
    "661152862119950150798479374508570574002992135478614669402960432542151905877553"
    "526733139925401296742"
)

_TRANSCENDENTAL_GUARD = 24


def _mpf_to_fraction(v) -> Fraction:
    p, q = to_rational(v)
    return Fraction(int(p), int(q))


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, mpmath.mpf):
        return _mpf_to_fraction(value._mpf_)
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact real")


def _check_prec(prec):
    if not isinstance(prec, int) or prec < 2:
        raise PrecisionError(f"precision must be an integer >= 2, got {prec!r}")
    return prec


class Enclosure:
    """Closed interval ``[lo, hi]`` certified to contain a real number."""

    __slots__ = ("_lo", "_hi", "prec")

    def __init__(self, lo, hi, prec: int = DEFAULT_PREC):
        if mpf_cmp(lo, hi) > 0:
            raise ValueError("enclosure requires lo <= hi")
        self._lo = lo
        self._hi = hi
        self.prec = prec

    # -- construction -----------------------------------------------------

    @classmethod
    def exact(cls, value, prec: int = DEFAULT_PREC) -> "Enclosure":
        """Tightest enclosure of an exact rational (ints are held exactly)."""
        if isinstance(value, Enclosure):
            return value
        if isinstance(value, int):
            v = from_int(value)
            return cls(v, v, prec)
        frac = _as_fraction(value)
        if frac.denominator == 1:
            v = from_int(frac.numerator)
            return cls(v, v, prec)
        n, d = frac.numerator, frac.denominator
        return cls(
            from_rational(n, d, prec, round_floor),
            from_rational(n, d, prec, round_ceiling),
            prec,
        )

    @classmethod
    def from_bounds(cls, lo, hi, prec: int = DEFAULT_PREC) -> "Enclosure":
        a, b = _as_fraction(lo), _as_fraction(hi)
        return cls(
            from_rational(a.numerator, a.denominator, prec, round_floor),
            from_rational(b.numerator, b.denominator, prec, round_ceiling),
            prec,
        )

    @classmethod
    def hull(cls, *items: "Enclosure") -> "Enclosure":
        lo = min((e._lo for e in items), key=_mpf_to_fraction)
        hi = max((e._hi for e in items), key=_mpf_to_fraction)
        return cls(lo, hi, max(e.prec for e in items))

    # -- views --------------------------------------------------------------

    @property
    def lo(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(self._lo)

    @property
    def hi(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(self._hi)

    @property
    def mid(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(mpf_shift(mpf_add(self._lo, self._hi), -1))

    @property
    def width(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(mpf_sub(self._hi, self._lo))

    def bounds(self) -> tuple[Fraction, Fraction]:
        """Exact rational endpoints."""
        return _mpf_to_fraction(self._lo), _mpf_to_fraction(self._hi)

    def mid_fraction(self) -> Fraction:
        lo, hi = self.bounds()
        return (lo + hi) / 2

    def magnitude(self) -> Fraction:
        lo, hi = self.bounds()
        return max(abs(lo), abs(hi))

    def __float__(self) -> float:
        return to_float(mpf_shift(mpf_add(self._lo, self._hi), -1))

    def __repr__(self) -> str:
        return (
            f"Enclosure([{mpmath.nstr(self.lo, 20)}, {mpmath.nstr(self.hi, 20)}],"
            f" prec={self.prec})"
        )

    # -- predicates -----------------------------------------------------------

    def contains(self, value) -> bool:
        if isinstance(value, Enclosure):
            return mpf_cmp(self._lo, value._lo) <= 0 and mpf_cmp(value._hi, self._hi) <= 0
        v = _as_fraction(value)
        lo, hi = self.bounds()
        return lo <= v <= hi

    def overlaps(self, other: "Enclosure") -> bool:
        return mpf_cmp(self._lo, other._hi) <= 0 and mpf_cmp(other._lo, self._hi) <= 0

    def certainly_gt(self, other) -> bool:
        other = _coerce(other, self.prec)
        return mpf_cmp(self._lo, other._hi) > 0

    def certainly_lt(self, other) -> bool:
        other = _coerce(other, self.prec)
        return mpf_cmp(self._hi, other._lo) < 0

    def is_positive(self) -> bool:
        return mpf_cmp(self._lo, fzero) > 0

    def widen(self, amount) -> "Enclosure":
        """Push both endpoints outward by a nonnegative exact amount."""
        a = _as_fraction(amount)
        e = from_rational(a.numerator, a.denominator, self.prec, round_ceiling)
        return Enclosure(
            mpf_sub(self._lo, e, self.prec, round_floor),
            mpf_add(self._hi, e, self.prec, round_ceiling),
            self.prec,
        )

    def gap_to(self, other: "Enclosure") -> mpmath.mpf:
        """Certified separation ``self.lo - other.hi`` (negative when overlapping)."""
        return mpmath.mp.make_mpf(mpf_sub(self._lo, other._hi))

    def rounded(self, prec: int) -> "Enclosure":
        return Enclosure(
            mpf_add(self._lo, fzero, prec, round_floor),
            mpf_add(self._hi, fzero, prec, round_ceiling),
            prec,
        )

    # -- arithmetic -----------------------------------------------------------

    def __neg__(self):
        return Enclosure(mpf_neg(self._hi), mpf_neg(self._lo), self.prec)

    def __add__(self, other):
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        p = max(self.prec, other.prec)
        return Enclosure(
            mpf_add(self._lo, other._lo, p, round_floor),
            mpf_add(self._hi, other._hi, p, round_ceiling),
            p,
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        p = max(self.prec, other.prec)
        return Enclosure(
            mpf_sub(self._lo, other._hi, p, round_floor),
            mpf_sub(self._hi, other._lo, p, round_ceiling),
            p,
        )

    def __rsub__(self, other):
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        p = max(self.prec, other.prec)
        pairs = [(a, b) for a in (self._lo, self._hi) for b in (other._lo, other._hi)]
        lows = [mpf_mul(a, b, p, round_floor) for a, b in pairs]
        highs = [mpf_mul(a, b, p, round_ceiling) for a, b in pairs]
        return Enclosure(_mpf_min(lows), _mpf_max(highs), p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        if mpf_cmp(other._lo, fzero) <= 0 <= mpf_cmp(other._hi, fzero):
            raise ZeroDivisionError("divisor enclosure contains zero")
        p = max(self.prec, other.prec)
        pairs = [(a, b) for a in (self._lo, self._hi) for b in (other._lo, other._hi)]
        lows = [mpf_div(a, b, p, round_floor) for a, b in pairs]
        highs = [mpf_div(a, b, p, round_ceiling) for a, b in pairs]
        return Enclosure(_mpf_min(lows), _mpf_max(highs), p)

    def __rtruediv__(self, other):
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return other
        return other / self

    def square(self) -> "Enclosure":
        p = self.prec
        if mpf_cmp(self._lo, fzero) >= 0:
            return Enclosure(
                mpf_mul(self._lo, self._lo, p, round_floor),
                mpf_mul(self._hi, self._hi, p, round_ceiling),
                p,
            )
        if mpf_cmp(self._hi, fzero) <= 0:
            return (-self).square()
        m = _mpf_max([mpf_abs(self._lo), mpf_abs(self._hi)])
        return Enclosure(fzero, mpf_mul(m, m, p, round_ceiling), p)


def _mpf_min(values):
    best = values[0]
    for v in values[1:]:
        if mpf_cmp(v, best) < 0:
            best = v
    return best


def _mpf_max(values):
    best = values[0]
    for v in values[1:]:
        if mpf_cmp(v, best) > 0:
            best = v
    return best


def _coerce(value, prec):
    if isinstance(value, Enclosure):
        return value
    if isinstance(value, (int, Fraction)):
        return Enclosure.exact(value, prec)
    return NotImplemented


def as_enclosure(value, prec: int = DEFAULT_PREC) -> Enclosure:
    """Accept an Enclosure, int, Fraction or decimal string."""
    if isinstance(value, Enclosure):
        return value
    return Enclosure.exact(_as_fraction(value), prec)


def _outward(fn, arg, prec, rnd):
    wp = prec + _TRANSCENDENTAL_GUARD
    v = fn(arg, wp, round_nearest)
    if v == fzero:
        return v
    margin = mpf_shift(mpf_abs(v), -(wp - 4))
    if rnd == round_floor:
        return mpf_sub(v, margin, prec, round_floor)
    return mpf_add(v, margin, prec, round_ceiling)


def ln_interval(x, prec: int | None = None) -> Enclosure:
    """Enclosure of the natural logarithm; x must be certainly positive."""
    x = as_enclosure(x, prec or DEFAULT_PREC)
    p = _check_prec(prec or x.prec)
    if mpf_cmp(x._lo, fzero) <= 0:
        raise DomainError("logarithm of a non-positive enclosure")
    return Enclosure(_outward(mpf_log, x._lo, p, round_floor), _outward(mpf_log, x._hi, p, round_ceiling), p)


def exp_interval(x, prec: int | None = None) -> Enclosure:
    x = as_enclosure(x, prec or DEFAULT_PREC)
    p = _check_prec(prec or x.prec)
    lo = _outward(mpf_exp, x._lo, p, round_floor)
    if mpf_cmp(lo, fzero) < 0:
        lo = fzero
    return Enclosure(lo, _outward(mpf_exp, x._hi, p, round_ceiling), p)


def sqrt_interval(x, prec: int | None = None) -> Enclosure:
    x = as_enclosure(x, prec or DEFAULT_PREC)
    p = _check_prec(prec or x.prec)
    if mpf_cmp(x._lo, fzero) < 0:
        raise DomainError("square root of an enclosure with negative part")
    return Enclosure(mpf_sqrt(x._lo, p, round_floor), mpf_sqrt(x._hi, p, round_ceiling), p)


def _literal_enclosure(digits: str, prec: int) -> Enclosure:
    value = Fraction(digits)
    places = len(digits.split(".")[1])
    err = Fraction(1, 10**places)
    return Enclosure.from_bounds(value - err, value + err, prec)


@lru_cache(maxsize=None)
def pi_const(prec: int = DEFAULT_PREC) -> Enclosure:
    _check_prec(prec)
    if prec > MAX_PREC:
        raise PrecisionError(f"pi_const supports prec <= {MAX_PREC}")
    return _literal_enclosure(_PI_DIGITS, prec)


@lru_cache(maxsize=None)
def gamma_const(prec: int = DEFAULT_PREC) -> Enclosure:
    """Euler-Mascheroni constant, width at most 2**(4 - prec)."""
    _check_prec(prec)
    if prec > MAX_PREC:
        raise PrecisionError(f"gamma_const supports prec <= {MAX_PREC}")
    return _literal_enclosure(_GAMMA_DIGITS, prec)


ONE = Enclosure(fone, fone)
