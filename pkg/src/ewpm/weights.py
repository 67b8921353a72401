"""Integer edge-weight schemes on the complete bipartite graph.

``d_ell`` truncates Euclidean lengths to ``ell`` fractional bits, ``w_tv`` is
the planar tie-breaking weight, and ``w_ell`` stacks the two so that the
distance order dominates and the planar weight only breaks ties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .geometry import PointSetInstance, squared_distance

__all__ = [
    "EdgeWeightAssignment",
    "EllParams",
    "d_ell_assignment",
    "w_tv_assignment",
    "w_ell_assignment",
    "choose_ell",
    "shift_nonnegative",
    "least_power_at_least",
]

SCHEMES = ("d_ell", "w_tv", "w_ell", "custom")


@dataclass(frozen=True)
class EdgeWeightAssignment:
    """``w[i][j]`` is the weight of edge ``(a_i, b_j)``."""

    w: Tuple[Tuple[int, ...], ...]
    scheme: str = "custom"
    ell: Optional[int] = None
    shift: int = 0
    multiplier: Optional[int] = None

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.w)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("weight table must be square and non-empty")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        object.__setattr__(self, "w", rows)

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]], **meta) -> "EdgeWeightAssignment":
        return cls(tuple(tuple(r) for r in table), **meta)

    @property
    def n(self) -> int:
        return len(self.w)

    def matching_weight(self, perm: Sequence[int]) -> int:
        w = self.w
        return sum(w[i][j] for i, j in enumerate(perm))

    def min_entry(self) -> int:
        return min(min(r) for r in self.w)

    def max_entry(self) -> int:
        return max(max(r) for r in self.w)


@dataclass(frozen=True)
class EllParams:
    ell: int
    n: int
    N: int
    delta: Fraction


def least_power_at_least(x) -> int:
    """Least ``t >= 0`` with ``2**t >= x`` for a positive rational ``x``."""
    x = Fraction(x)
    if x <= 1:
        return 0
    c = -(-x.numerator // x.denominator)
    return (c - 1).bit_length()


def choose_ell(n: int, N: int, delta) -> EllParams:
    """Bits of distance precision needed for both accuracy and isolation."""
    if n < 1 or N < 1:
        raise ValueError("n and N must be positive")
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    accuracy = max(1, least_power_at_least(Fraction(n) / delta))
    isolation = least_power_at_least(8 * n * N**4)
    return EllParams(max(accuracy, isolation), n, N, delta)


def d_ell_assignment(inst: PointSetInstance, ell: int) -> EdgeWeightAssignment:
    if ell < 1:
        raise ValueError("ell must be positive")
    table = tuple(
        tuple(math.isqrt(squared_distance(a, b) << (2 * ell)) for b in inst.b_points)
        for a in inst.a_points
    )
    return EdgeWeightAssignment(table, scheme="d_ell", ell=ell)


def w_tv_assignment(inst: PointSetInstance) -> EdgeWeightAssignment:
    table = tuple(
        tuple((b.y - a.y) * (b.x + a.x) for b in inst.b_points) for a in inst.a_points
    )
    return EdgeWeightAssignment(table, scheme="w_tv")


def w_ell_assignment(inst: PointSetInstance, ell: int) -> EdgeWeightAssignment:
    n, N = inst.n, inst.grid_bound
    mult = 2 * n * N * N + 1
    d = d_ell_assignment(inst, ell).w
    tv = w_tv_assignment(inst).w
    table = tuple(
        tuple(mult * d[i][j] + tv[i][j] for j in range(n)) for i in range(n)
    )
    return EdgeWeightAssignment(table, scheme="w_ell", ell=ell, multiplier=mult)


def shift_nonnegative(w: EdgeWeightAssignment) -> EdgeWeightAssignment:
    """Add ``max(0, -min entry)`` to every edge.

    Every perfect matching gains exactly ``n * C``, so minimizers are unchanged.
    """
    c = max(0, -w.min_entry())
    if c == 0:
        return w
    table = tuple(tuple(v + c for v in row) for row in w.w)
    return replace(w, w=table, shift=w.shift + c)
