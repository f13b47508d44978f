"""Contingency tables and chi-squared independence machinery.

All variables are Boolean, so every test reduces to a 2x2 table with one
degree of freedom; the rejection thresholds are embedded constants.  A
test whose expected counts fall below the classic floor of 5 (or whose
table has an empty margin) is reported *inconclusive* rather than
trusted either way.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import _kernels
from .errors import ConfigError, StructuralError
from .model import VariableId
from .simulator import Dataset

# Upper quantiles of the chi-squared distribution with 1 degree of freedom.
CHI2_CRITICAL_1DF: dict[float, float] = {
    0.10: 2.705543454095404,
    0.05: 3.841458820694124,
    0.025: 5.023886187314888,
    0.01: 6.634896601021213,
    0.005: 7.879438576622413,
    0.001: 10.827566170662733,
}

EXPECTED_COUNT_FLOOR = 5.0


def critical_value(alpha: float) -> float:
    try:
        return CHI2_CRITICAL_1DF[alpha]
    except KeyError:
        raise ConfigError(
            f"unsupported significance level {alpha}; "
            f"known: {sorted(CHI2_CRITICAL_1DF)}"
        ) from None


@dataclass(frozen=True)
class ContingencyTable:
    """2x2 counts; rows indexed by the first variable's value, columns by
    the second's."""

    counts: tuple[tuple[int, int], tuple[int, int]]

    def __post_init__(self):
        flat = [c for row in self.counts for c in row]
        if len(self.counts) != 2 or any(len(r) != 2 for r in self.counts):
            raise StructuralError("contingency table must be 2x2")
        if any(c < 0 for c in flat):
            raise StructuralError("contingency counts must be non-negative")

    @staticmethod
    def from_array(a) -> "ContingencyTable":
        a = np.asarray(a)
        return ContingencyTable(
            ((int(a[0, 0]), int(a[0, 1])), (int(a[1, 0]), int(a[1, 1])))
        )

    @property
    def total(self) -> int:
        return sum(c for row in self.counts for c in row)

    def row_sums(self) -> tuple[int, int]:
        return (self.counts[0][0] + self.counts[0][1],
                self.counts[1][0] + self.counts[1][1])

    def col_sums(self) -> tuple[int, int]:
        return (self.counts[0][0] + self.counts[1][0],
                self.counts[0][1] + self.counts[1][1])

    def transposed(self) -> "ContingencyTable":
        c = self.counts
        return ContingencyTable(((c[0][0], c[1][0]), (c[0][1], c[1][1])))


@dataclass(frozen=True)
class TestOutcome:
    """Result of one chi-squared test.

    ``inconclusive`` flags tables too sparse to trust (any expected cell
    below the floor, or a degenerate margin); an inconclusive outcome
    never rejects.
    """

    statistic: float
    degrees_of_freedom: int
    critical_value: float
    reject_independence: bool
    inconclusive: bool

    def __post_init__(self):
        if self.reject_independence and self.inconclusive:
            raise StructuralError("an inconclusive test cannot reject")
        if self.statistic < 0:
            raise StructuralError("chi-squared statistic must be non-negative")


def tabulate(
    dataset: Dataset,
    x: VariableId,
    y: VariableId,
    filter: Mapping[VariableId, bool] | None = None,
) -> ContingencyTable:
    """Co-occurrence counts of x (rows) and y (columns) over the records
    matching ``filter``."""
    if x == y:
        raise StructuralError("tabulate requires two distinct variables")
    x_col = dataset.column_index(x)
    y_col = dataset.column_index(y)
    items = sorted((filter or {}).items(), key=lambda kv: kv[0].index)
    filter_cols = np.array(
        [dataset.column_index(v) for v, _ in items], dtype=np.int64
    )
    filter_vals = np.array([int(val) for _, val in items], dtype=np.uint8)
    counts = _kernels.tabulate_pair(
        dataset.values, x_col, y_col, filter_cols, filter_vals
    )
    return ContingencyTable.from_array(counts)


def chi_squared(table: ContingencyTable, alpha: float = 0.05) -> TestOutcome:
    """Pearson chi-squared test of independence on a 2x2 table.

    No continuity correction.  Cells with zero expected count contribute
    nothing to the statistic and force the inconclusive flag, as does any
    expected count below ``EXPECTED_COUNT_FLOOR``.
    """
    crit = critical_value(alpha)
    total = table.total
    if total == 0:
        return TestOutcome(0.0, 1, crit, False, True)
    rows = table.row_sums()
    cols = table.col_sums()
    statistic = 0.0
    inconclusive = False
    for i in range(2):
        for j in range(2):
            expected = rows[i] * cols[j] / total
            if expected <= 0.0:
                inconclusive = True
                continue
            if expected < EXPECTED_COUNT_FLOOR:
                inconclusive = True
            diff = table.counts[i][j] - expected
            statistic += diff * diff / expected
    reject = (not inconclusive) and statistic > crit
    return TestOutcome(statistic, 1, crit, reject, inconclusive)


def distributions_differ(
    dataset_a: Dataset,
    dataset_b: Dataset,
    target: VariableId,
    alpha: float = 0.05,
) -> TestOutcome:
    """Chi-squared comparison of ``target``'s distribution between two
    datasets (rows: source dataset, columns: target value)."""
    a = dataset_a.column(target)
    b = dataset_b.column(target)
    counts = (
        (int(np.sum(a == 0)), int(np.sum(a == 1))),
        (int(np.sum(b == 0)), int(np.sum(b == 1))),
    )
    return chi_squared(ContingencyTable(counts), alpha)


def cond_independent(
    dataset: Dataset,
    x: VariableId,
    y: VariableId,
    given: frozenset[VariableId] | set[VariableId] = frozenset(),
    alpha: float = 0.05,
) -> TestOutcome:
    """Stratified chi-squared independence test on observational records.

    x and y are tested within every assignment of ``given``; independence
    is rejected as soon as any stratum rejects.  Strata below the
    expected-count floor are skipped; if every stratum is skipped the
    outcome is inconclusive.  The reported statistic is the largest
    stratum statistic (the strongest evidence of dependence seen).
    """
    if x in given or y in given:
        raise StructuralError("conditioning set must exclude the tested pair")
    obs = dataset.observational()
    crit = critical_value(alpha)
    cond = sorted(given, key=lambda v: v.index)
    best = 0.0
    any_conclusive = False
    for bits in itertools.product((0, 1), repeat=len(cond)):
        assignment = {v: bool(b) for v, b in zip(cond, bits)}
        outcome = chi_squared(tabulate(obs, x, y, assignment), alpha)
        if outcome.inconclusive:
            continue
        any_conclusive = True
        best = max(best, outcome.statistic)
        if outcome.reject_independence:
            return TestOutcome(outcome.statistic, 1, crit, True, False)
    if not any_conclusive:
        return TestOutcome(best, 1, crit, False, True)
    return TestOutcome(best, 1, crit, False, False)
