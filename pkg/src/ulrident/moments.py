"""Projected moments of linear forms of independent components.

For independent components the order-m moment tensor factorizes, so
E[(b'X)^m] is the composition sum

    sum over k1+...+kd = m of  m!/(k1!...kd!) * prod_j b_j^kj * E[X_j^kj]

which enumerates C(m+d-1, d-1) terms instead of a dense d^m tensor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .distributions import Distribution
from .errors import OrderExceeded, ValidationError

MATCH_TOL = 1e-9


@dataclass(frozen=True)
class MomentTable:
    """Per-component raw moments: row j, column k holds E[X_j^k]."""

    values: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if not self.values:
            raise ValidationError("moment table needs at least one component")
        width = len(self.values[0])
        if any(len(row) != width for row in self.values):
            raise ValidationError("moment table rows must have equal length")
        for row in self.values:
            if row[0] != 1.0:
                raise ValidationError("column 0 of a moment table must be all ones")
            if any(not math.isfinite(v) for v in row):
                raise ValidationError("moment table entries must be finite")

    @classmethod
    def from_components(
        cls, components: Sequence[Distribution], m_max: int
    ) -> "MomentTable":
        rows = tuple(
            tuple(c.raw_moment(k) for k in range(m_max + 1)) for c in components
        )
        return cls(rows)

    @property
    def d(self) -> int:
        return len(self.values)

    @property
    def m_max(self) -> int:
        return len(self.values[0]) - 1

    def moment(self, j: int, k: int) -> float:
        return self.values[j][k]


def compositions(m: int, d: int) -> Iterator[tuple[int, ...]]:
    """All d-tuples of nonnegative integers summing to m."""
    if d == 1:
        yield (m,)
        return
    for head in range(m + 1):
        for tail in compositions(m - head, d - 1):
            yield (head,) + tail


def projected_moment(table: MomentTable, beta: Sequence[float], m: int) -> float:
    """Exact E[(beta'X)^m] under component independence."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (table.d,):
        raise ValidationError(
            f"beta has length {beta.shape[0] if beta.ndim else 0}, expected {table.d}"
        )
    if m < 0 or m > table.m_max:
        raise OrderExceeded(f"order {m} exceeds table maximum {table.m_max}")
    total = 0.0
    for ks in compositions(m, table.d):
        coeff = math.factorial(m)
        term = 1.0
        for j, k in enumerate(ks):
            coeff //= math.factorial(k)
            if k:
                term *= beta[j] ** k * table.moment(j, k)
        total += coeff * term
    return total


def moments_match_up_to(
    table: MomentTable,
    beta: Sequence[float],
    beta0: Sequence[float],
    m: int,
) -> tuple[bool, Optional[int]]:
    """Compare projected moments of two coefficient vectors, orders 1..m.

    Returns ``(True, None)`` on agreement at every order, otherwise
    ``(False, first_mismatching_order)``.  Agreement at one order means
    the difference is below ``MATCH_TOL * max(1, |value|)``.
    """
    if m > table.m_max:
        raise OrderExceeded(f"order {m} exceeds table maximum {table.m_max}")
    for order in range(1, m + 1):
        lhs = projected_moment(table, beta, order)
        rhs = projected_moment(table, beta0, order)
        if abs(lhs - rhs) > MATCH_TOL * max(1.0, abs(rhs)):
            return False, order
    return True, None
