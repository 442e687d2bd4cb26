"""Exception hierarchy shared by all kindiv modules."""


class KindivError(Exception):
    """Base class for every error raised by this package."""


class DomainError(KindivError, ValueError):
    """An argument lies outside the domain of the operation."""


class TableMismatchError(KindivError, ValueError):
    """A PartitionTable does not match the query it was handed."""


class GuardError(KindivError, ValueError):
    """An explicit size guard (enumeration, Bernoulli index, ...) was exceeded."""


class NonCoprimeError(DomainError):
    """k and t must be coprime for this operation."""


class CapacityError(KindivError):
    """A configured capacity (table size, truncation budget) would be exceeded."""


class PrecisionError(KindivError):
    """Requested working precision is outside the supported range."""


class UnresolvedComparisonError(KindivError):
    """Some enclosures still overlap at the maximum working precision.

    ``triples`` lists the offending ``(k, r, s)`` combinations.
    """

    def __init__(self, triples):
        self.triples = list(triples)
        shown = ", ".join(f"(k={k}, r={r}, s={s})" for k, r, s in self.triples[:10])
        more = "" if len(self.triples) <= 10 else f" and {len(self.triples) - 10} more"
        super().__init__(f"unresolved comparisons: {shown}{more}")
