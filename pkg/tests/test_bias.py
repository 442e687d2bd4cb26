import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kindiv.bias import (
    BiasKey,
    Comparison,
    compare,
    euler_phi,
    natural_cap,
    order_count,
    ordering,
    precision_ladder,
    psi_kt,
    rbar,
    residue_biases,
)
from kindiv.errors import DomainError, NonCoprimeError
from kindiv.interval import gamma_const
from kindiv.special_functions import digamma, digamma_diff


def test_rbar_examples():
    assert rbar(3, 4, 1) == 3
    assert rbar(5, 7, 7) == 7
    assert all(rbar(8, 7, r) == r for r in range(1, 8))


@settings(max_examples=200)
@given(st.integers(2, 60), st.integers(2, 50), st.data())
def test_rbar_inverts_multiplication(k, t, data):
    if math.gcd(k, t) != 1:
        with pytest.raises(NonCoprimeError):
            rbar(k, t, 1)
        return
    r = data.draw(st.integers(1, t))
    s = rbar(k, t, r)
    assert 1 <= s <= t and (k * s - r) % t == 0


def test_key_validation():
    with pytest.raises(NonCoprimeError):
        BiasKey(2, 4)
    with pytest.raises(DomainError):
        BiasKey(1, 3)


def test_psi_kt_two_three():
    value = psi_kt(BiasKey(2, 3), 1)
    other = digamma(Fraction(2, 3)) / 2 - digamma(Fraction(1, 3))
    assert value.overlaps(other)
    # second route: psi(2/3) = psi(1/3) + psi_{1/3}(1/3)
    via_diff = digamma(Fraction(1, 3)) + digamma_diff(Fraction(1, 3), Fraction(1, 3), 10**4)
    assert value.overlaps(via_diff / 2 - digamma(Fraction(1, 3)))


@pytest.mark.parametrize("k, t", [(2, 3), (5, 7), (12, 7), (9, 20)])
def test_psi_kt_at_t_is_scaled_gamma(k, t):
    assert psi_kt(BiasKey(k, t), t).overlaps(gamma_const(192) * (1 - Fraction(1, k)))


def test_residue_biases_agree_with_psi_kt():
    key = BiasKey(5, 12)
    for b in residue_biases(key):
        assert b.value.overlaps(psi_kt(key, b.r))
        assert (5 * b.rbar - b.r) % 12 == 0


def test_compare_examples():
    assert compare(BiasKey(2, 7), 1, 3) is Comparison.GREATER
    assert compare(BiasKey(2, 7), 7, 2) is Comparison.GREATER
    assert compare(BiasKey(12, 7), 6, 5) is Comparison.GREATER
    assert compare(BiasKey(12, 7), 5, 6) is Comparison.LESS
    with pytest.raises(DomainError):
        compare(BiasKey(2, 7), 3, 3)


@pytest.mark.parametrize(
    "k, expected",
    [(2, (1, 3, 5, 7, 2, 4, 6)), (5, (1, 2, 3, 4, 6, 7, 5)), (12, (1, 2, 3, 4, 6, 5, 7)),
     (31, (1, 2, 3, 4, 5, 6, 7))],
)
def test_ordering_examples(k, expected):
    o = ordering(BiasKey(k, 7))
    assert o.certified and o.unresolved_pairs == ()
    assert o.sequence == expected


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40), st.integers(2, 25))
def test_ordering_is_certified_permutation(k, t):
    if math.gcd(k, t) != 1:
        return
    o = ordering(BiasKey(k, t))
    assert sorted(o.sequence) == list(range(1, t + 1))
    assert o.certified == (o.unresolved_pairs == ())
    if o.certified:
        values = {b.r: b.value for b in residue_biases(BiasKey(k, t), o.prec)}
        for a, b in zip(o.sequence, o.sequence[1:]):
            assert values[a].certainly_gt(values[b])


def test_order_count_seven():
    atlas = order_count(7)
    assert atlas.count == 7
    assert {6, 10, 13, 20} <= set(atlas.entries[(1, 2, 3, 4, 5, 7, 6)])
    assert atlas.entries[(1, 2, 3, 4, 6, 5, 7)] == [12]
    assert not atlas.natural_inserted
    assert atlas.k_max_searched == 30


def test_order_count_two():
    atlas = order_count(2)
    assert atlas.count == 1
    assert (1, 2) in atlas.entries


def test_order_count_parallel_matches_serial():
    assert order_count(13, workers=2).entries == order_count(13).entries


def test_natural_cap():
    assert natural_cap(7) == 30
    assert natural_cap(2) == 2
    for t in range(2, 80):
        assert natural_cap(t) >= 6 * (t * t - 1) / math.pi**2


def test_euler_phi():
    assert [euler_phi(n) for n in (1, 7, 12, 36, 97)] == [1, 6, 4, 12, 96]


def test_precision_ladder():
    assert precision_ladder() == [192, 384, 768, 1024]
    assert precision_ladder(1024) == [1024]
