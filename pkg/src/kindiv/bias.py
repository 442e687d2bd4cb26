"""Second-order residue bias psi_{k,t}(r) and the orderings it induces.

For coprime k, t the count of parts congruent to r mod t among k-indivisible
partitions of n is eventually larger for residues with larger

    psi_{k,t}(r) = -psi(r/t) + psi(rbar/t) / k,     k * rbar = r (mod t).

Orderings are only reported as certified when every adjacent pair of
enclosures is strictly separated; overlapping pairs are escalated in precision
and, failing that, surfaced as unresolved.  Nothing is ever tie-broken.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import DomainError, NonCoprimeError, UnresolvedComparisonError
from .interval import DEFAULT_PREC, MAX_PREC, Enclosure, pi_const
from .special_functions import digamma


@dataclass(frozen=True)
class BiasKey:
    k: int
    t: int

    def __post_init__(self):
        if self.k < 2 or self.t < 2:
            raise DomainError(f"need k, t >= 2, got k={self.k}, t={self.t}")
        if math.gcd(self.k, self.t) != 1:
            raise NonCoprimeError(f"k={self.k} and t={self.t} are not coprime")


@dataclass(frozen=True)
class ResidueBias:
    r: int
    rbar: int
    value: Enclosure


class Comparison(enum.Enum):
    GREATER = "Greater"
    LESS = "Less"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class Ordering:
    key: BiasKey
    sequence: tuple[int, ...]
    certified: bool
    unresolved_pairs: tuple[tuple[int, int], ...] = ()
    prec: int = DEFAULT_PREC
    min_gap: mpmath.mpf | None = None
    closest_pair: tuple[int, int] | None = None

    @property
    def is_natural(self) -> bool:
        return self.sequence == tuple(range(1, self.key.t + 1))


@dataclass
class OrderingAtlas:
    t: int
    k_max_searched: int
    entries: dict[tuple[int, ...], list[int]] = field(default_factory=dict)
    natural_inserted: bool = False
    min_gap: mpmath.mpf | None = None
    min_gap_witness: tuple[int, int, int] | None = None

    @property
    def count(self) -> int:
        return len(self.entries)


def euler_phi(t: int) -> int:
    """Euler's totient by trial factorisation."""
    if t < 1:
        raise DomainError("euler_phi requires t >= 1")
    result, n, p = t, t, 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


def _inverse_mod(a: int, m: int) -> int:
    """Inverse of a modulo m by the extended Euclidean algorithm."""
    old_r, r = a % m, m
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    if old_r != 1:
        raise NonCoprimeError(f"{a} is not invertible modulo {m}")
    return old_s % m


def rbar(k: int, t: int, r: int) -> int:
    """The s in [1, t] with k*s = r (mod t)."""
    if not 1 <= r <= t:
        raise DomainError(f"r must lie in [1, t], got r={r}, t={t}")
    if math.gcd(k, t) != 1:
        raise NonCoprimeError(f"k={k} and t={t} are not coprime")
    if t == 1:
        return 1
    s = (_inverse_mod(k, t) * r) % t
    return s or t


def precision_ladder(start: int = DEFAULT_PREC, cap: int = MAX_PREC) -> list[int]:
    """Doubling schedule start, 2*start, ... ending exactly at cap."""
    out, p = [], start
    while p < cap:
        out.append(p)
        p *= 2
    out.append(cap)
    return out


def _psi_values(t: int, prec: int) -> list[Enclosure]:
    return [digamma(Fraction(r, t), prec) for r in range(1, t + 1)]


def psi_kt(key: BiasKey, r: int, prec: int = DEFAULT_PREC) -> Enclosure:
    """Enclosure of -psi(r/t) + psi(rbar/t)/k."""
    if not 1 <= r <= key.t:
        raise DomainError(f"r must lie in [1, t], got r={r}, t={key.t}")
    rb = rbar(key.k, key.t, r)
    return digamma(Fraction(rb, key.t), prec) / key.k - digamma(Fraction(r, key.t), prec)


def residue_biases(key: BiasKey, prec: int = DEFAULT_PREC) -> list[ResidueBias]:
    psi = _psi_values(key.t, prec)
    out = []
    for r in range(1, key.t + 1):
        rb = rbar(key.k, key.t, r)
        out.append(ResidueBias(r, rb, psi[rb - 1] / key.k - psi[r - 1]))
    return out


def compare(key: BiasKey, r: int, s: int, prec: int = DEFAULT_PREC, cap: int = MAX_PREC) -> Comparison:
    """Certified sign of psi_{k,t}(r) - psi_{k,t}(s), escalating precision up to cap."""
    if r == s:
        raise DomainError("compare requires r != s")
    for p in precision_ladder(prec, cap):
        a, b = psi_kt(key, r, p), psi_kt(key, s, p)
        if a.certainly_gt(b):
            return Comparison.GREATER
        if a.certainly_lt(b):
            return Comparison.LESS
    return Comparison.UNRESOLVED


def _order_at(key: BiasKey, prec: int):
    biases = residue_biases(key, prec)
    ranked = sorted(biases, key=lambda b: (-b.value.mid_fraction(), b.r))
    gaps = [ranked[i].value.gap_to(ranked[i + 1].value) for i in range(len(ranked) - 1)]
    return ranked, gaps


def ordering(key: BiasKey, prec: int = DEFAULT_PREC, cap: int = MAX_PREC) -> Ordering:
    """Residues 1..t from most to least common (largest psi_{k,t} first)."""
    for p in precision_ladder(prec, cap):
        ranked, gaps = _order_at(key, p)
        closest = min(range(len(gaps)), key=gaps.__getitem__, default=None)
        if all(g > 0 for g in gaps):
            return Ordering(
                key,
                tuple(b.r for b in ranked),
                True,
                (),
                p,
                gaps[closest] if gaps else None,
                (ranked[closest].r, ranked[closest + 1].r) if gaps else None,
            )
    unresolved = []
    for i, a in enumerate(ranked):
        for b in ranked[i + 1:]:
            if a.value.overlaps(b.value):
                unresolved.append((a.r, b.r))
    return Ordering(
        key,
        tuple(b.r for b in ranked),
        False,
        tuple(unresolved),
        p,
        gaps[closest],
        (ranked[closest].r, ranked[closest + 1].r),
    )


def natural_cap(t: int) -> int:
    """ceil(6 (t^2 - 1) / pi^2), using a lower bound for pi so it is never undershot."""
    pi_lo = pi_const(64).bounds()[0]
    return math.ceil(Fraction(6 * (t * t - 1)) / (pi_lo * pi_lo))


def _orderings_for(t, ks, prec, cap):
    return [ordering(BiasKey(k, t), prec, cap) for k in ks]


def order_count(
    t: int,
    k_cap_override: int | None = None,
    prec: int = DEFAULT_PREC,
    cap: int = MAX_PREC,
    workers: int = 1,
) -> OrderingAtlas:
    """All distinct orderings for modulus t over coprime k in [2, natural_cap(t)].

    Every larger coprime k yields the natural ordering, which is therefore
    inserted unconditionally.
    """
    if t < 2:
        raise DomainError("order_count requires t >= 2")
    k_max = natural_cap(t) if k_cap_override is None else k_cap_override
    ks = [k for k in range(2, k_max + 1) if math.gcd(k, t) == 1]
    if workers > 1 and len(ks) > 1:
        chunks = [ks[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_orderings_for, [t] * workers, chunks, [prec] * workers, [cap] * workers)
            results = [o for part in parts for o in part]
    else:
        results = _orderings_for(t, ks, prec, cap)
    results.sort(key=lambda o: o.key.k)

    atlas = OrderingAtlas(t=t, k_max_searched=k_max)
    bad = []
    for o in results:
        if not o.certified:
            bad.extend((o.key.k, r, s) for r, s in o.unresolved_pairs)
            continue
        atlas.entries.setdefault(o.sequence, []).append(o.key.k)
        if o.min_gap is not None and (atlas.min_gap is None or o.min_gap < atlas.min_gap):
            atlas.min_gap = o.min_gap
            atlas.min_gap_witness = (o.key.k,) + o.closest_pair
    if bad:
        raise UnresolvedComparisonError(bad)
    natural = tuple(range(1, t + 1))
    if natural not in atlas.entries:
        atlas.entries[natural] = []
        atlas.natural_inserted = True
    atlas.entries = dict(sorted(atlas.entries.items(), key=lambda kv: (kv[1][:1] or [math.inf], kv[0])))
    return atlas

