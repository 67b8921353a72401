"""Exact integer-grid geometry.

Points live on an integer grid, predicates are evaluated with Python integers
and Euclidean lengths are kept symbolically as sums ``sum(c_s * sqrt(s))``
over squarefree radicands ``s``.  Numeric comparison of such sums goes
through dyadic interval brackets built from :func:`math.isqrt`, so nothing
in this module ever touches floating point on a decision path.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Mapping, NamedTuple, Optional, Tuple

import numpy as np

from .errors import (
    BoundsError,
    DegenerateInput,
    NotCrossing,
    PerturbationFailed,
    PrecisionExhausted,
)

__all__ = [
    "GridPoint",
    "PointSetInstance",
    "ExactLength",
    "Ordering",
    "PerturbationParams",
    "orientation",
    "has_collinear_triple",
    "default_k",
    "perturb",
    "integer_sqrt",
    "squared_distance",
    "squarefree_split",
    "edge_length",
    "compare_exact",
    "bracket_difference",
    "quad_diagonal_gap",
    "segments_cross",
    "random_instance",
]

DEFAULT_MAX_BITS = 4096


class GridPoint(NamedTuple):
    x: int
    y: int


Box = Tuple[int, int, int, int]


@dataclass(frozen=True)
class PointSetInstance:
    """Two equally sized point lists on an integer grid.

    Vertex indices used throughout the package run ``0..n-1`` over
    ``a_points`` followed by ``n..2n-1`` over ``b_points``.
    """

    a_points: Tuple[GridPoint, ...]
    b_points: Tuple[GridPoint, ...]
    grid_bound: int
    signed_box: Optional[Box] = None

    def __post_init__(self):
        a = tuple(GridPoint(int(p[0]), int(p[1])) for p in self.a_points)
        b = tuple(GridPoint(int(p[0]), int(p[1])) for p in self.b_points)
        object.__setattr__(self, "a_points", a)
        object.__setattr__(self, "b_points", b)
        if self.signed_box is not None:
            object.__setattr__(self, "signed_box", tuple(int(v) for v in self.signed_box))
        if len(a) != len(b) or not a:
            raise ValueError(f"sides must be non-empty and equal, got {len(a)} and {len(b)}")
        if self.grid_bound < 1:
            raise ValueError("grid_bound must be positive")
        lo_x, lo_y, hi_x, hi_y = self.bounds
        for side, pts in (("A", a), ("B", b)):
            for k, p in enumerate(pts):
                if not (lo_x <= p.x <= hi_x and lo_y <= p.y <= hi_y):
                    raise BoundsError(f"point {side}[{k}] = ({p.x}, {p.y}) outside {self.bounds}")

    @property
    def n(self) -> int:
        return len(self.a_points)

    @property
    def bounds(self) -> Box:
        if self.signed_box is not None:
            return self.signed_box
        return (0, 0, self.grid_bound, self.grid_bound)

    @property
    def points(self) -> Tuple[GridPoint, ...]:
        return self.a_points + self.b_points

    def zero_length_edges(self) -> list:
        """Edges (i, j) whose endpoints coincide."""
        return [
            (i, j)
            for i, a in enumerate(self.a_points)
            for j, b in enumerate(self.b_points)
            if a == b
        ]


def random_instance(n: int, N: int, rng: np.random.Generator, distinct: bool = True) -> PointSetInstance:
    """Uniform random instance on the ``[0, N]^2`` grid."""
    if distinct and 2 * n > (N + 1) ** 2:
        raise ValueError("grid too small for distinct points")
    pts: list = []
    seen = set()
    while len(pts) < 2 * n:
        p = (int(rng.integers(0, N + 1)), int(rng.integers(0, N + 1)))
        if distinct and p in seen:
            continue
        seen.add(p)
        pts.append(p)
    return PointSetInstance(tuple(pts[:n]), tuple(pts[n:]), N)


# -- predicates ---------------------------------------------------------------


def orientation(p, q, r) -> int:
    det = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return (det > 0) - (det < 0)


def has_collinear_triple(inst: PointSetInstance) -> Optional[Tuple[int, int, int]]:
    """Lexicographically smallest collinear index triple, or None."""
    pts = inst.points
    for i, j, k in combinations(range(len(pts)), 3):
        if orientation(pts[i], pts[j], pts[k]) == 0:
            return (i, j, k)
    return None


def segments_cross(s1, s2) -> bool:
    """True iff the open segments ``s1`` and ``s2`` intersect.

    Segments sharing an endpoint never cross.  Any other collinear triple among
    the four endpoints raises :class:`DegenerateInput`.
    """
    p1, q1 = s1
    p2, q2 = s2
    if p1 in (p2, q2) or q1 in (p2, q2):
        return False
    o1 = orientation(p1, q1, p2)
    o2 = orientation(p1, q1, q2)
    o3 = orientation(p2, q2, p1)
    o4 = orientation(p2, q2, q1)
    if 0 in (o1, o2, o3, o4):
        raise DegenerateInput(f"collinear endpoints in {s1} / {s2}")
    return o1 * o2 < 0 and o3 * o4 < 0


# -- perturbation -------------------------------------------------------------


@dataclass(frozen=True)
class PerturbationParams:
    K: int

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be a positive integer")


def default_k(n: int, N: int) -> int:
    return 16 * n * n * (N + n * n)


def perturb(inst: PointSetInstance, params: Optional[PerturbationParams] = None) -> PointSetInstance:
    """Move vertex ``i`` to ``(K*x + i, K*y + i*i)``.

    The image is the original perturbation ``(x + i/K, y + i^2/K)`` scaled by
    ``K`` so that coordinates stay integral.  Raises
    :class:`PerturbationFailed` if a collinear triple survives.
    """
    n = inst.n
    K = (params or PerturbationParams(default_k(n, inst.grid_bound))).K
    moved = [GridPoint(K * p.x + i, K * p.y + i * i) for i, p in enumerate(inst.points)]
    slack = (2 * n - 1) ** 2
    box = None
    if inst.signed_box is not None:
        lx, ly, hx, hy = inst.signed_box
        box = (K * lx, K * ly, K * hx + slack, K * hy + slack)
    out = PointSetInstance(tuple(moved[:n]), tuple(moved[n:]), K * inst.grid_bound + slack, box)
    bad = has_collinear_triple(out)
    if bad is not None:
        raise PerturbationFailed(f"collinear triple {bad} survives with K={K}")
    return out


# -- exact lengths ------------------------------------------------------------


def integer_sqrt(m: int) -> int:
    if m < 0:
        raise ValueError("integer_sqrt of a negative number")
    return math.isqrt(m)


def squared_distance(p, q) -> int:
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    return dx * dx + dy * dy


@lru_cache(maxsize=1 << 16)
def squarefree_split(m: int) -> Tuple[int, int]:
    """Return ``(c, s)`` with ``m == c*c*s`` and ``s`` squarefree.

    Trial division runs only up to ``m**(1/3)``; the cofactor left after that
    has at most two prime factors, so it is either a perfect square or
    squarefree.
    """
    if m < 0:
        raise ValueError("negative radicand")
    if m == 0:
        return (0, 1)
    c, s = 1, 1
    d = 2
    while d * d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            c *= d ** (e // 2)
            if e % 2:
                s *= d
        d += 1 if d == 2 else 2
    r = math.isqrt(m)
    if r * r == m:
        c *= r
    else:
        s *= m
    return (c, s)


class ExactLength:
    """Canonical sum of square roots ``sum(c * sqrt(s))``.

    Keys are squarefree, coefficients positive.  Two instances represent the
    same real number iff their term maps are identical, since distinct
    squarefree radicals are linearly independent over the rationals.
    """

    __slots__ = ("_terms", "_cache")

    def __init__(self, terms: Optional[Mapping[int, int]] = None):
        clean = {}
        for s, c in (terms or {}).items():
            if c < 0:
                raise ValueError("coefficients must be nonnegative")
            if c:
                cc, ss = squarefree_split(s)
                clean[ss] = clean.get(ss, 0) + c * cc
        self._terms = tuple(sorted(clean.items()))
        self._cache: dict = {}

    @classmethod
    def from_int(cls, k: int) -> "ExactLength":
        return cls({1: k})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def __add__(self, other: "ExactLength") -> "ExactLength":
        merged = dict(self._terms)
        for s, c in other._terms:
            merged[s] = merged.get(s, 0) + c
        out = ExactLength.__new__(ExactLength)
        out._terms = tuple(sorted(merged.items()))
        out._cache = {}
        return out

    def __radd__(self, other):
        if other == 0:
            return self
        return NotImplemented

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactLength) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(self._terms)

    def __repr__(self) -> str:
        return f"ExactLength({dict(self._terms)})"

    def scaled_bracket(self, p: int) -> Tuple[int, int]:
        """Integers ``(lo, hi)`` with ``lo <= 2**p * value <= hi``."""
        hit = self._cache.get(p)
        if hit is not None:
            return hit
        lo = 0
        loose = 0
        for s, c in self._terms:
            m = (c * c * s) << (2 * p)
            r = math.isqrt(m)
            lo += r
            if r * r != m:
                loose += 1
        self._cache[p] = (lo, lo + loose)
        return lo, lo + loose

    def bracket(self, bits: int) -> Tuple[Fraction, Fraction]:
        """Dyadic bracket of width at most ``2**-bits``."""
        p = bits + len(self._terms).bit_length()
        lo, hi = self.scaled_bracket(p)
        return Fraction(lo, 1 << p), Fraction(hi, 1 << p)

    def __float__(self) -> float:
        lo, hi = self.bracket(64)
        return float((lo + hi) / 2)


def edge_length(p, q) -> ExactLength:
    m = squared_distance(p, q)
    if m == 0:
        return ExactLength()
    c, s = squarefree_split(m)
    out = ExactLength.__new__(ExactLength)
    out._terms = ((s, c),)
    out._cache = {}
    return out


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def bracket_difference(a: ExactLength, b: ExactLength, bits: int) -> Tuple[Fraction, Fraction]:
    """Bracket of ``a - b`` with width at most ``2**-bits``."""
    p = bits + 1 + max(len(a._terms), len(b._terms), 1).bit_length()
    alo, ahi = a.scaled_bracket(p)
    blo, bhi = b.scaled_bracket(p)
    return Fraction(alo - bhi, 1 << p), Fraction(ahi - blo, 1 << p)


def compare_exact(a: ExactLength, b: ExactLength, max_bits: int = DEFAULT_MAX_BITS) -> Ordering:
    if max_bits < 64:
        raise ValueError("max_bits must be at least 64")
    if a._terms == b._terms:
        return Ordering.EQUAL
    bits = 64
    while bits <= max_bits:
        lo, hi = bracket_difference(a, b, bits)
        if hi < 0:
            return Ordering.LESS
        if lo > 0:
            return Ordering.GREATER
        bits *= 2
    raise PrecisionExhausted(f"{a!r} and {b!r} not separated at {max_bits} bits")


def quad_diagonal_gap(a1, b1, a2, b2, bits: int) -> Tuple[Fraction, Fraction]:
    """Bracket of ``|a1b1| + |a2b2| - |a1b2| - |a2b1|`` for crossing diagonals."""
    try:
        crossing = segments_cross((a1, b1), (a2, b2))
    except DegenerateInput as exc:
        raise NotCrossing(str(exc)) from exc
    if not crossing:
        raise NotCrossing(f"{a1}-{b1} and {a2}-{b2} do not cross")
    diag = edge_length(a1, b1) + edge_length(a2, b2)
    side = edge_length(a1, b2) + edge_length(a2, b1)
    return bracket_difference(diag, side, bits)
