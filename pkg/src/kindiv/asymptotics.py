"""Asymptotic estimator for D_k^x(r, t; n) and analytic consistency checks.

Everything transcendental is evaluated in enclosures; exact counts enter the
quotients without loss.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bias import BiasKey, psi_kt, rbar
from .errors import CapacityError, DomainError
from .exact_count import ExactQuery, PartitionTable, d_exact
from .interval import (
    DEFAULT_PREC,
    Enclosure,
    as_enclosure,
    exp_interval,
    ln_interval,
    pi_const,
    sqrt_interval,
)

DEFAULT_TOL = Fraction(1, 10**30)
MAX_SERIES_TERMS = 2_000_000


@dataclass(frozen=True)
class Estimate:
    key: BiasKey
    r: int
    n: int
    prefactor: Enclosure
    bracket: Enclosure
    value: Enclosure


@dataclass(frozen=True)
class MajorArcSample:
    key: BiasKey
    r: int
    z: Fraction
    l_value: Enclosure
    residual: Enclosure


def _K(key: BiasKey) -> Fraction:
    return 1 - Fraction(1, key.k)


def c_kt(key: BiasKey, prec: int = DEFAULT_PREC) -> Enclosure:
    """(K/2) log(pi sqrt(K/6)) - K log t + (log k)/k with K = 1 - 1/k."""
    K = _K(key)
    pi = pi_const(prec)
    inner = pi * sqrt_interval(Enclosure.exact(K / 6, prec + 8), prec)
    return (
        ln_interval(inner, prec) * (K / 2)
        - ln_interval(key.t, prec) * K
        + ln_interval(key.k, prec) / key.k
    )


def d_hat(key: BiasKey, r: int, n: int, prec: int = DEFAULT_PREC) -> Estimate:
    """Main term plus second-order bracket, dropping O(n^{-1/2} log n) inside the bracket."""
    if n < 1:
        raise DomainError("d_hat requires n >= 1")
    if not 1 <= r <= key.t:
        raise DomainError(f"r must lie in [1, t], got r={r}")
    K = _K(key)
    pi = pi_const(prec)
    growth = exp_interval(pi * sqrt_interval(Enclosure.exact(2 * K * n / 3, prec), prec), prec)
    # 3^{1/4} / (2^{3/4} K^{1/4} n^{1/4}) = (3 / (8 K n))^{1/4}
    quartic = sqrt_interval(sqrt_interval(Enclosure.exact(Fraction(3) / (8 * K * n), prec), prec), prec)
    prefactor = growth * quartic / (pi * key.t * sqrt_interval(key.k, prec))
    bracket = ln_interval(n, prec) * (K / 2) + psi_kt(key, r, prec) + c_kt(key, prec)
    return Estimate(key, r, n, prefactor, bracket, prefactor * bracket)


def q_ratio(key: BiasKey, r: int, n: int, table: PartitionTable, prec: int = DEFAULT_PREC) -> Enclosure:
    """Exact count divided by the estimator."""
    exact = d_exact(ExactQuery(key.k, key.t, r, n), table)
    return Enclosure.exact(exact, prec) / d_hat(key, r, n, prec).value


def e_times(z, prec: int = DEFAULT_PREC) -> Enclosure:
    """e^{-z} / (1 - e^{-z}) = 1 / (e^z - 1) for z > 0."""
    z = as_enclosure(z, prec)
    if not z.is_positive():
        raise DomainError("e_times requires z > 0")
    return 1 / (exp_interval(z, prec) - 1)


def _shifted_e_sum(c: int, step: Enclosure, t: int, tol: Fraction, prec: int) -> Enclosure:
    """sum_{l>=0} E((l t + c) step) with a certified tail.

    With x_l = e^{-(l t + c) step} and u = e^{-t step} the terms are
    x_l / (1 - x_l), and for l >= L each is at most x_l / (1 - x_L), so

        0 <= tail_L <= x_L / ((1 - x_L)(1 - u)).
    """
    u = exp_interval(-(step * t), prec)
    x = exp_interval(-(step * c), prec)
    one_minus_u = 1 - u
    total = Enclosure.exact(0, prec)
    for _ in range(MAX_SERIES_TERMS):
        tail = x / ((1 - x) * one_minus_u)
        if tail.bounds()[1] <= tol:
            return total + Enclosure.from_bounds(0, tail.bounds()[1], prec)
        total = total + x / (1 - x)
        x = x * u
    raise CapacityError(f"tolerance {float(tol)} not reached within {MAX_SERIES_TERMS} terms")


def l_sum(key: BiasKey, r: int, z, tol=DEFAULT_TOL, prec: int = DEFAULT_PREC) -> Enclosure:
    """Summatory component: sum E((l t + r) z) - sum E((l t + rbar) k z)."""
    z = as_enclosure(z, prec)
    if not z.is_positive():
        raise DomainError("l_sum requires z > 0")
    tol = Fraction(tol)
    rb = rbar(key.k, key.t, r)
    first = _shifted_e_sum(r, z, key.t, tol / 2, prec)
    second = _shifted_e_sum(rb, z * key.k, key.t, tol / 2, prec)
    return first - second


def l_sum_direct(key: BiasKey, r: int, z, M: int, prec: int = DEFAULT_PREC) -> Enclosure:
    """sum_{m <= M, m = r (t), k does not divide m} q^m / (1 - q^m), plus a tail enclosure.

    Independent of :func:`l_sum`: powers q^m are formed directly and the tail
    over m > M is enclosed by [0, q^{M+1} / ((1 - q^{M+1})(1 - q))].
    """
    z = as_enclosure(z, prec)
    total = Enclosure.exact(0, prec)
    for m in range(r, M + 1, key.t):
        if m % key.k:
            qm = exp_interval(-(z * m), prec)
            total = total + qm / (1 - qm)
    q = exp_interval(-z, prec)
    qM = exp_interval(-(z * (M + 1)), prec)
    tail = qM / ((1 - qM) * (1 - q))
    return total + Enclosure.from_bounds(0, tail.bounds()[1], prec)


def major_arc_constant(key: BiasKey, r: int, prec: int = DEFAULT_PREC) -> Enclosure:
    """k^{-1} psi(rbar/t) - psi(r/t) - K log t + (log k)/k."""
    K = _K(key)
    return psi_kt(key, r, prec) - ln_interval(key.t, prec) * K + ln_interval(key.k, prec) / key.k


def major_arc_residual(key: BiasKey, r: int, z, prec: int = DEFAULT_PREC) -> MajorArcSample:
    """z L + (K/t) log z - constant/t, which is O(z) as z -> 0+."""
    z = Fraction(z)
    if not 0 < z <= Fraction(1, 4):
        raise DomainError("major_arc_residual requires 0 < z <= 1/4")
    K = _K(key)
    lval = l_sum(key, r, z, prec=prec)
    residual = (
        lval * z
        + ln_interval(z, prec) * (K / key.t)
        - major_arc_constant(key, r, prec) / key.t
    )
    return MajorArcSample(key, r, z, lval, residual)


def _euler_product(q: Enclosure, skip: int | None, tol: Fraction, prec: int) -> Enclosure:
    """prod_{m>=1, skip does not divide m} 1/(1 - q^m) for 0 < q < 1.

    After the factors m <= M the remaining log is at most
    q^{M+1} / ((1 - q)(1 - q^{M+1})), so the tail factor lies in [1, e^that].
    """
    prod = Enclosure.exact(1, prec)
    qm = Enclosure.exact(1, prec)
    one_minus_q = 1 - q
    for m in range(1, MAX_SERIES_TERMS):
        qm = qm * q
        if skip is None or m % skip:
            prod = prod / (1 - qm)
        nxt = qm * q
        bound = nxt / (one_minus_q * (1 - nxt))
        if bound.bounds()[1] <= tol:
            growth = exp_interval(Enclosure.from_bounds(0, bound.bounds()[1], prec), prec)
            return prod * growth
    raise CapacityError("truncation budget exceeded in Euler product")


def xi_transform_check(k: int, z, tol=DEFAULT_TOL, prec: int = DEFAULT_PREC) -> Enclosure:
    """Relative difference between xi_k(e^{-z}) and its modular transformation.

    Left side: prod over m not divisible by k of 1/(1 - q^m).  Right side:
    k^{-1/2} exp(pi^2 (1 - 1/k)/(6z) + z(k-1)/24) P(eps^k)/P(eps) with
    eps = exp(-4 pi^2/(k z)).
    """
    z = Fraction(z)
    if not 0 < z <= 1:
        raise DomainError("xi_transform_check requires 0 < z <= 1")
    if k < 2:
        raise DomainError("k must be >= 2")
    tol = Fraction(tol)
    pi = pi_const(prec)
    q = exp_interval(Enclosure.exact(-z, prec), prec)
    left = _euler_product(q, k, tol / 4, prec)

    pi2 = pi.square()
    eps = exp_interval(-(pi2 * 4) / (z * k), prec)
    eps_k = exp_interval(-(pi2 * 4) / z, prec)
    K = 1 - Fraction(1, k)
    phi = exp_interval(pi2 * K / (6 * z) + z * (k - 1) / 24, prec) / sqrt_interval(k, prec)
    right = phi * _euler_product(eps_k, None, tol / 4, prec) / _euler_product(eps, None, tol / 4, prec)
    return (left - right) / right

