"""Lower-bound instances: two matchings whose weights nearly coincide.

``construction1`` places ``n`` points on the line ``x = 0`` and ``n`` on
``x = n**4`` so that all ``n!`` matching weights are distinct yet crammed
into a window of width about ``n/2``.  ``unroll`` lays the alternating cycles
of a close pair out left to right and pins three far vertices below them,
which makes the lighter matching the global minimum while keeping the gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations, permutations
from typing import List, Tuple

from .engines import Matching
from .errors import CapExceeded, NoCycles, PrecisionExhausted
from .geometry import (
    DEFAULT_MAX_BITS,
    ExactLength,
    GridPoint,
    Ordering,
    PointSetInstance,
    bracket_difference,
    compare_exact,
    edge_length,
    squared_distance,
)
from .verification import VerificationReport

LOWERBOUND_CAP = 6


@dataclass(frozen=True)
class Construction1Instance:
    n: int
    q: int
    instance: PointSetInstance

    def delta(self, i: int, j: int) -> int:
        """Vertical offset of edge ``(u_i, v_j)`` with ``j`` zero-based."""
        return (j + 1) * self.n - i


@dataclass(frozen=True)
class ClosePair:
    m1: Matching
    m2: Matching
    gap_bracket: Tuple[Fraction, Fraction]
    bits: int


@dataclass(frozen=True)
class UnrolledInstance:
    instance: PointSetInstance
    m1_prime: Matching
    m2_prime: Matching
    ell: int
    q: int
    sequence: Tuple[Tuple[int, int], ...]
    y_trace: Tuple[int, ...]


def default_bits(n: int) -> int:
    return max(192, math.ceil(n * math.log2(max(n, 2))) + 64)


def construction1(n: int, cap: int = LOWERBOUND_CAP) -> Construction1Instance:
    if n < 2:
        raise ValueError("construction needs n >= 2")
    if n > cap:
        raise CapExceeded(f"n={n} exceeds cap {cap}")
    q = n**4
    a = tuple(GridPoint(0, i) for i in range(n))
    b = tuple(GridPoint(q, j * n) for j in range(1, n + 1))
    return Construction1Instance(n, q, PointSetInstance(a, b, q))


def _weights(inst: PointSetInstance) -> List[Tuple[Tuple[int, ...], ExactLength]]:
    lengths = [[edge_length(a, b) for b in inst.b_points] for a in inst.a_points]
    out = []
    for perm in permutations(range(inst.n)):
        total = ExactLength()
        for i, j in enumerate(perm):
            total = total + lengths[i][j]
        out.append((perm, total))
    return out


def check_distinct_weights(c1: Construction1Instance, cap: int = 5) -> VerificationReport:
    """All matching weights pairwise distinct, decided on canonical forms only."""
    if c1.n > cap:
        raise CapExceeded(f"n={c1.n} exceeds cap {cap}")
    weights = _weights(c1.instance)
    pairs = 0
    for (p, wp), (r, wr) in combinations(weights, 2):
        pairs += 1
        if wp == wr:
            return VerificationReport("distinct", False, witness=(Matching(p), Matching(r)),
                                      params={"n": c1.n})
    return VerificationReport("distinct", True, params={"n": c1.n},
                              details={"matchings": len(weights), "pairs": pairs})


def _sorted_weights(inst: PointSetInstance, max_bits: int):
    items = _weights(inst)
    key = cmp_to_key(lambda x, y: int(compare_exact(x[1], y[1], max_bits)))
    return sorted(items, key=key)


def close_pair(c1: Construction1Instance, bits: int = 0, max_bits: int = DEFAULT_MAX_BITS) -> ClosePair:
    """Adjacent pair (in weight order) with the globally smallest gap."""
    bits = bits or default_bits(c1.n)
    ranked = _sorted_weights(c1.instance, max_bits)
    for (_, x), (_, y) in zip(ranked, ranked[1:]):
        if x == y:
            raise PrecisionExhausted("two matchings share a weight")

    # gap_k < gap_m  <=>  w[k+1] + w[m] < w[m+1] + w[k]
    def cmp_gap(k, m):
        lhs = ranked[k + 1][1] + ranked[m][1]
        rhs = ranked[m + 1][1] + ranked[k][1]
        return int(compare_exact(lhs, rhs, max_bits))

    k = min(range(len(ranked) - 1), key=cmp_to_key(cmp_gap))
    (p1, w1), (p2, w2) = ranked[k], ranked[k + 1]
    return ClosePair(Matching(p1), Matching(p2), bracket_difference(w2, w1, bits), bits)


def unroll(c1: Construction1Instance, pair: ClosePair) -> UnrolledInstance:
    """Lay the alternating cycles of ``pair`` out as one zig-zag path."""
    p1, p2 = pair.m1.perm, pair.m2.perm
    n, q = c1.n, c1.q
    inv2 = {j: i for i, j in enumerate(p2)}
    pending = sorted(i for i in range(n) if p1[i] != p2[i])
    if not pending:
        raise NoCycles("the two matchings coincide")
    seq: List[Tuple[int, int]] = []
    left = set(pending)
    while left:
        # lowest remaining A index; A-vertex y equals its index
        start = min(left)
        a = start
        while True:
            left.discard(a)
            b = p1[a]
            seq.append((a, b))
            a = inv2[b]
            seq.append((a, b))
            if a == start:
                break
    ell = len(seq) // 2
    ys = [0]
    for k, (i, j) in enumerate(seq, 1):
        d = c1.delta(i, j)
        ys.append(ys[-1] + d if k % 2 else ys[-1] - d)
    t = [GridPoint(k * q, y) for k, y in enumerate(ys)]
    s0 = GridPoint(0, -2 * ell * q)
    s1 = GridPoint(ell * q, -2 * ell * q)
    s2 = GridPoint(2 * ell * q, -2 * ell * q)
    a_pts = tuple(t[0::2]) + (s1,)
    b_pts = tuple(t[1::2]) + (s0, s2)
    box = (0, -2 * ell * q, 2 * ell * q, max(ys))
    inst = PointSetInstance(a_pts, b_pts, max(2 * ell * q, max(ys) + 2 * ell * q), box)
    # A index of t_{2m} is m, B index of t_{2m+1} is m; s1 = A[ell+1], s0 = B[ell], s2 = B[ell+1]
    m1p = [0] * (ell + 2)
    m2p = [0] * (ell + 2)
    for m in range(ell):
        m1p[m] = m            # e_{2m+1} = (t_{2m}, t_{2m+1})
        m2p[m + 1] = m        # e_{2m+2} = (t_{2m+1}, t_{2m+2})
    m1p[ell] = ell + 1        # (t_{2ell}, s2)
    m1p[ell + 1] = ell        # (s1, s0)
    m2p[0] = ell              # (t_0, s0)
    m2p[ell + 1] = ell + 1    # (s1, s2)
    return UnrolledInstance(inst, Matching(m1p), Matching(m2p), ell, q, tuple(seq), tuple(ys))


def matching_weight(inst: PointSetInstance, m: Matching) -> ExactLength:
    total = ExactLength()
    for i, j in m.edges():
        total = total + edge_length(inst.a_points[i], inst.b_points[j])
    return total


def check_observations(c1: Construction1Instance, pair: ClosePair, u: UnrolledInstance, bits: int) -> dict:
    """Observations on the unrolled layout, each checked exactly."""
    inst = u.instance
    t = [inst.a_points[m // 2] if m % 2 == 0 else inst.b_points[m // 2] for m in range(2 * u.ell + 1)]
    lengths_kept = all(
        squared_distance(t[k - 1], t[k])
        == squared_distance(c1.instance.a_points[i], c1.instance.b_points[j])
        for k, (i, j) in enumerate(u.sequence, 1)
    )
    trace_ok = all(y >= 0 for y in u.y_trace) and u.y_trace[-1] == 0
    pts = inst.points
    q2 = u.q * u.q
    spread_ok = all(squared_distance(p, r) >= q2 for p, r in combinations(pts, 2))
    common = [e for e in pair.m1.edges() if pair.m2.perm[e[0]] == e[1]]
    common_w = ExactLength()
    for i, j in common:
        common_w = common_w + edge_length(c1.instance.a_points[i], c1.instance.b_points[j])
    pad = ExactLength.from_int(3 * u.ell * u.q)
    obs4 = (
        matching_weight(inst, u.m1_prime) + common_w
        == matching_weight(c1.instance, pair.m1) + pad
        and matching_weight(inst, u.m2_prime) + common_w
        == matching_weight(c1.instance, pair.m2) + pad
    )
    return {
        "lengths_kept": lengths_kept,
        "trace_ok": trace_ok,
        "spread_ok": spread_ok,
        "weights_shifted": obs4,
        "common_edges": len(common),
    }


def verify_theorem1(n: int, bits: int = 0, max_bits: int = DEFAULT_MAX_BITS) -> VerificationReport:
    """Unrolled instance has a unique minimum within ``1/(n-1)!`` of the runner-up."""
    if n > 5:
        raise CapExceeded("theorem check enumerates (ell+2)! matchings; n <= 5")
    bits = bits or default_bits(n)
    c1 = construction1(n)
    pair = close_pair(c1, bits, max_bits)
    u = unroll(c1, pair)
    ranked = _sorted_weights(u.instance, max_bits)
    (best_perm, best), (second_perm, second) = ranked[0], ranked[1]
    unique = best_perm == u.m1_prime.perm and compare_exact(best, second, max_bits) == Ordering.LESS
    gap_lo, gap_hi = bracket_difference(second, best, bits)
    bound = Fraction(1, math.factorial(n - 1))
    gap_ok = gap_hi <= bound
    margin_ok = all(
        compare_exact(w, best + ExactLength.from_int(1), max_bits) != Ordering.LESS
        for perm, w in ranked
        if perm not in (u.m1_prime.perm, u.m2_prime.perm)
    )
    obs = check_observations(c1, pair, u, bits)
    lx, ly, hx, hy = u.instance.bounds
    extent = max(hx - lx, hy - ly)
    box_ok = extent <= 3 * n**5
    details = {
        "ell": u.ell,
        "gap_lower": gap_lo,
        "gap_upper": gap_hi,
        "bound": bound,
        "runner_up": Matching(second_perm),
        "runner_up_is_m2": second_perm == u.m2_prime.perm,
        "margin_ok": margin_ok,
        "extent": extent,
        "n5": n**5,
        "box_ok": box_ok,
        **obs,
    }
    passed = unique and gap_ok and box_ok and all(
        obs[k] for k in ("lengths_kept", "trace_ok", "spread_ok", "weights_shifted")
    )
    witness = None
    if not passed:
        witness = {"minimum": Matching(best_perm), "expected": u.m1_prime, **details}
    return VerificationReport("theorem1", passed, witness=witness,
                              params={"n": n, "bits": bits}, details=details)
