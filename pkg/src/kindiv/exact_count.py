"""Exact counts for k-indivisible partitions.

A k-indivisible partition has no part divisible by k.  ``PartitionTable``
holds p_k^x(0..n_max); the part-count sums D_k^x(r, t; n) and P_k^x(n) are
streamed from it using the weight q^m / (1 - q^m) = sum_{j>=1} q^{jm} of a
single part size m.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CapacityError, DomainError, GuardError, TableMismatchError

DEFAULT_N_CAP = 10**6
ENUMERATION_GUARD = 60


@dataclass(frozen=True)
class PartitionTable:
    k: int
    n_max: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != self.n_max + 1:
            raise ValueError("counts must have n_max + 1 entries")

    def __getitem__(self, n: int) -> int:
        return self.counts[n]


@dataclass(frozen=True)
class ExactQuery:
    k: int
    t: int
    r: int
    n: int

    def __post_init__(self):
        if self.k < 2:
            raise DomainError(f"k must be >= 2, got {self.k}")
        if self.t < 1:
            raise DomainError(f"t must be >= 1, got {self.t}")
        if not 1 <= self.r <= self.t:
            raise DomainError(f"r must satisfy 1 <= r <= t, got r={self.r}, t={self.t}")
        if self.n < 0:
            raise DomainError(f"n must be >= 0, got {self.n}")


def _check_table_args(k, n_max, n_cap):
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    if n_max > n_cap:
        raise CapacityError(f"n_max={n_max} exceeds the configured limit {n_cap}")


def build_pkx_table(k: int, n_max: int, n_cap: int = DEFAULT_N_CAP) -> PartitionTable:
    """Coefficients of prod_{m>=1, k does not divide m} 1/(1 - q^m) up to q^n_max.

    Unbounded-knapsack order: part sizes ascending, n ascending.  Each part
    size is applied in blocks of length m so one numpy call covers a block;
    the block at [s, s+m) only reads the already-updated block before it.
    """
    _check_table_args(k, n_max, n_cap)
    counts = np.zeros(n_max + 1, dtype=object)
    counts[:] = 0
    counts[0] = 1
    for m in range(1, n_max + 1):
        if m % k == 0:
            continue
        for s in range(m, n_max + 1, m):
            e = min(s + m, n_max + 1)
            counts[s:e] += counts[s - m:e - m]
    return PartitionTable(k, n_max, tuple(int(c) for c in counts))


def _pentagonal_offsets(limit: int):
    """(offset, sign) pairs of Euler's pentagonal series prod(1 - q^n), offset <= limit."""
    out = [(0, 1)]
    m = 1
    while True:
        g1 = m * (3 * m - 1) // 2
        if g1 > limit:
            break
        sign = -1 if m % 2 else 1
        out.append((g1, sign))
        g2 = m * (3 * m + 1) // 2
        if g2 <= limit:
            out.append((g2, sign))
        m += 1
    return out


def partition_numbers(n_max: int) -> list[int]:
    """p(0..n_max) from the pentagonal number recurrence."""
    offsets = _pentagonal_offsets(n_max)[1:]
    p = [0] * (n_max + 1)
    p[0] = 1
    for n in range(1, n_max + 1):
        acc = 0
        for g, sign in offsets:
            if g > n:
                break
            acc -= sign * p[n - g]
        p[n] = acc
    return p


def build_pkx_table_pentagonal(k: int, n_max: int, n_cap: int = DEFAULT_N_CAP) -> PartitionTable:
    """Same table as :func:`build_pkx_table`, via p(q) * (q^k; q^k)_inf.

    O(n_max^1.5) instead of O(n_max^2); used as an independent cross-check
    and for large n_max.
    """
    _check_table_args(k, n_max, n_cap)
    p = partition_numbers(n_max)
    offsets = _pentagonal_offsets(n_max // k)
    counts = []
    for n in range(n_max + 1):
        acc = 0
        for g, sign in offsets:
            j = n - k * g
            if j < 0:
                break
            acc += sign * p[j]
        counts.append(acc)
    return PartitionTable(k, n_max, tuple(counts))


def _check_table(k, n, table):
    if table.k != k:
        raise TableMismatchError(f"table built for k={table.k}, query has k={k}")
    if table.n_max < n:
        raise TableMismatchError(f"table covers n <= {table.n_max}, query has n={n}")


def _weighted_sum(counts, n, m):
    # sum_{j>=1, jm<=n} counts[n - jm]
    return sum(counts[n - m::-m]) if m <= n else 0


def d_exact(q: ExactQuery, table: PartitionTable) -> int:
    """D_k^x(r, t; n): parts congruent to r mod t over all k-indivisible partitions of n."""
    _check_table(q.k, q.n, table)
    counts, n, k = table.counts, q.n, q.k
    total = 0
    for m in range(q.r, n + 1, q.t):
        if m % k:
            total += _weighted_sum(counts, n, m)
    return total


def total_parts(k: int, n: int, table: PartitionTable) -> int:
    """P_k^x(n): total number of parts over all k-indivisible partitions of n."""
    _check_table(k, n, table)
    counts = table.counts
    return sum(_weighted_sum(counts, n, m) for m in range(1, n + 1) if m % k)


def _partitions_by_multiplicity(n, sizes, max_mult=None):
    """Yield partitions of n as {size: multiplicity} over the given part sizes (descending)."""
    def rec(remaining, idx, acc):
        if remaining == 0:
            yield acc
            return
        if idx == len(sizes):
            return
        size = sizes[idx]
        top = remaining // size
        if max_mult is not None:
            top = min(top, max_mult)
        for mult in range(top, -1, -1):
            if mult:
                acc[size] = mult
            yield from rec(remaining - mult * size, idx + 1, acc)
            if mult:
                del acc[size]

    yield from rec(n, 0, {})


def d_bruteforce(q: ExactQuery) -> int:
    """D_k^x(r, t; n) by listing every k-indivisible partition explicitly."""
    if q.n > ENUMERATION_GUARD:
        raise GuardError(f"enumeration guard: n={q.n} > {ENUMERATION_GUARD}")
    sizes = [m for m in range(q.n, 0, -1) if m % q.k]
    total = 0
    for parts in _partitions_by_multiplicity(q.n, sizes):
        total += sum(mult for size, mult in parts.items() if (size - q.r) % q.t == 0)
    return total


def count_kregular_bruteforce(k: int, n: int) -> int:
    """Number of partitions of n in which no part appears k or more times."""
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n > ENUMERATION_GUARD:
        raise GuardError(f"enumeration guard: n={n} > {ENUMERATION_GUARD}")
    sizes = list(range(n, 0, -1))
    return sum(1 for _ in _partitions_by_multiplicity(n, sizes, max_mult=k - 1))


# -- binary table files -------------------------------------------------------
#
# magic b"KIXT", u16 version, u32 k, u64 n_max, then per entry a u32 byte
# length followed by the little-endian magnitude.

_MAGIC = b"KIXT"
_VERSION = 1
_HEADER = struct.Struct("<4sHIQ")
_LEN = struct.Struct("<I")


def dump_table(table: PartitionTable) -> bytes:
    chunks = [_HEADER.pack(_MAGIC, _VERSION, table.k, table.n_max)]
    for c in table.counts:
        raw = c.to_bytes((c.bit_length() + 7) // 8, "little")
        chunks.append(_LEN.pack(len(raw)))
        chunks.append(raw)
    return b"".join(chunks)


def load_table(data: bytes) -> PartitionTable:
    try:
        return _parse_table(data)
    except struct.error as exc:
        raise ValueError(f"truncated table file: {exc}") from exc


def _parse_table(data: bytes) -> PartitionTable:
    magic, version, k, n_max = _HEADER.unpack_from(data, 0)
    if magic != _MAGIC:
        raise ValueError("not a partition table file (bad magic)")
    if version != _VERSION:
        raise ValueError(f"unsupported table file version {version}")
    pos = _HEADER.size
    counts = []
    for _ in range(n_max + 1):
        (length,) = _LEN.unpack_from(data, pos)
        pos += _LEN.size
        counts.append(int.from_bytes(data[pos:pos + length], "little"))
        pos += length
    if pos != len(data):
        raise ValueError("trailing bytes in table file")
    return PartitionTable(k, n_max, tuple(counts))


def save_table_file(table: PartitionTable, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(dump_table(table))
    tmp.replace(path)
    return path


def load_table_file(path) -> PartitionTable:
    return load_table(Path(path).read_bytes())
