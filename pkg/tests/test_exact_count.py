import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kindiv.errors import CapacityError, DomainError, GuardError, TableMismatchError
from kindiv.exact_count import (
    ExactQuery,
    PartitionTable,
    build_pkx_table,
    build_pkx_table_pentagonal,
    count_kregular_bruteforce,
    d_bruteforce,
    d_exact,
    dump_table,
    load_table,
    load_table_file,
    partition_numbers,
    save_table_file,
    total_parts,
)


def test_small_table():
    assert build_pkx_table(2, 4).counts == (1, 1, 1, 2, 2)


def test_three_indivisible_six():
    # 5+1, 4+2, 4+1+1, 2+2+2, 2+2+1+1, 2+1+1+1+1, 1*6
    assert build_pkx_table(3, 6)[6] == 7


@pytest.mark.parametrize(
    "k, t, r, n, expected",
    [
        (2, 3, 1, 4, 5),  # 3+1 -> 1, 1+1+1+1 -> 4
        (2, 3, 1, 0, 0),
        (3, 4, 2, 2, 1),  # only the partition {2}
        (2, 1, 1, 4, 6),
    ],
)
def test_d_exact_examples(k, t, r, n, expected):
    q = ExactQuery(k, t, r, n)
    assert d_exact(q, build_pkx_table(k, max(n, 1))) == expected
    assert d_bruteforce(q) == expected


def test_total_parts_examples():
    assert total_parts(2, 4, build_pkx_table(2, 4)) == 6
    assert total_parts(5, 3, build_pkx_table(5, 3)) == 6


def test_partition_numbers():
    assert partition_numbers(10) == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]
    assert partition_numbers(100)[100] == 190569292


@pytest.mark.parametrize("k", [2, 3, 4, 5, 7])
def test_pentagonal_matches_dp(k):
    assert build_pkx_table(k, 600).counts == build_pkx_table_pentagonal(k, 600).counts


def test_euler_odd_distinct_identity():
    # 2-indivisible partitions are the odd-part partitions, equinumerous with distinct-part ones
    table = build_pkx_table(2, 40)
    assert table[40] == 1113


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(1, 9), st.integers(0, 22), st.data())
def test_d_exact_matches_enumeration(k, t, n, data):
    r = data.draw(st.integers(1, t))
    q = ExactQuery(k, t, r, n)
    assert d_exact(q, build_pkx_table(k, 22)) == d_bruteforce(q)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 8), st.integers(1, 12), st.integers(0, 150))
def test_sum_over_residues_is_total(k, t, n):
    table = build_pkx_table(k, 150)
    s = sum(d_exact(ExactQuery(k, t, r, n), table) for r in range(1, t + 1))
    assert s == total_parts(k, n, table)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 25))
def test_kregular_bijection(k, n):
    assert build_pkx_table(k, 25)[n] == count_kregular_bruteforce(k, n)


def test_every_residue_class_receives_parts():
    table = build_pkx_table(3, 50)
    assert all(d_exact(ExactQuery(3, 4, r, 50), table) > 0 for r in range(1, 5))


def test_query_validation():
    for args in [(1, 3, 1, 4), (2, 0, 1, 4), (2, 3, 0, 4), (2, 3, 4, 4), (2, 3, 1, -1)]:
        with pytest.raises(DomainError):
            ExactQuery(*args)


def test_table_mismatch():
    table = build_pkx_table(2, 10)
    with pytest.raises(TableMismatchError):
        d_exact(ExactQuery(3, 4, 1, 5), table)
    with pytest.raises(TableMismatchError):
        d_exact(ExactQuery(2, 4, 1, 11), table)


def test_guards():
    with pytest.raises(GuardError):
        d_bruteforce(ExactQuery(2, 3, 1, 61))
    with pytest.raises(GuardError):
        count_kregular_bruteforce(2, 61)
    with pytest.raises(CapacityError):
        build_pkx_table(2, 101, n_cap=100)
    with pytest.raises(CapacityError):
        build_pkx_table_pentagonal(2, 101, n_cap=100)


def test_table_round_trip(tmp_path):
    table = build_pkx_table(3, 500)
    assert load_table(dump_table(table)) == table
    path = save_table_file(table, tmp_path / "sub" / "t.bin")
    assert load_table_file(path) == table


def test_table_file_rejects_corruption():
    blob = dump_table(build_pkx_table(2, 5))
    with pytest.raises(ValueError):
        load_table(b"XXXX" + blob[4:])
    with pytest.raises(ValueError):
        load_table(blob + b"\0")
    with pytest.raises(ValueError):
        load_table(blob[:-3])


def test_table_length_invariant():
    with pytest.raises(ValueError):
        PartitionTable(2, 3, (1, 1))
