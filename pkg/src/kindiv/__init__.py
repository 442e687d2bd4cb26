"""Exact and asymptotic statistics of parts in k-indivisible partitions by residue class."""

from .asymptotics import Estimate, d_hat, l_sum, major_arc_residual, q_ratio, xi_transform_check
from .bias import BiasKey, Comparison, Ordering, OrderingAtlas, compare, order_count, ordering, psi_kt, rbar
from .errors import (
    CapacityError,
    DomainError,
    GuardError,
    KindivError,
    NonCoprimeError,
    PrecisionError,
    TableMismatchError,
    UnresolvedComparisonError,
)
from .exact_count import (
    ExactQuery,
    PartitionTable,
    build_pkx_table,
    build_pkx_table_pentagonal,
    d_bruteforce,
    d_exact,
    total_parts,
)
from .interval import Enclosure
from .special_functions import bernoulli, digamma, digamma_diff
from .verify import SuiteReport, run_suite

__version__ = "0.1.0"
