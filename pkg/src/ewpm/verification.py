"""Mechanical checks of the structural facts the weight scheme relies on.

Everything here is brute force over small instances with exact or
interval-certified arithmetic: isolation of a weight table, crossing-freeness
of the union of near-minimum matchings, the uncrossing weight drop, planar
tie-breaking on that union, and the convex-quadrilateral gap on full grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from ._parallel import pmap
from .engines import DEFAULT_CAP, Matching, brute_force_min
from .errors import CapExceeded, NotCrossing, NotPerfectMatching, PrecisionExhausted
from .geometry import (
    DEFAULT_MAX_BITS,
    ExactLength,
    Ordering,
    PointSetInstance,
    bracket_difference,
    compare_exact,
    edge_length,
    segments_cross,
)
from .weights import EdgeWeightAssignment, w_tv_assignment

Edge = Tuple[int, int]


@dataclass
class VerificationReport:
    check: str
    passed: bool
    witness: Any = None
    params: Dict[str, Any] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.passed and self.witness is None:
            raise ValueError("a failing report needs a witness")


@dataclass
class NearMinUnion:
    instance: PointSetInstance
    threshold: Fraction
    optimum: Matching
    optimum_weight: ExactLength
    matchings: List[Matching]
    edges: FrozenSet[Edge]
    bits: int


# -- isolation ----------------------------------------------------------------


def check_isolation(w: EdgeWeightAssignment, workers: int = 1, cap: int = DEFAULT_CAP) -> VerificationReport:
    report = brute_force_min(w, workers=workers, cap=cap)
    params = {"n": w.n, "scheme": w.scheme, "ell": w.ell}
    if report.multiplicity == 1:
        return VerificationReport("isolation", True, params=params,
                                  details={"matching": report.matching, "weight": report.total_weight})
    minimizers = [
        p for p in permutations(range(w.n)) if w.matching_weight(p) == report.total_weight
    ][:2]
    return VerificationReport("isolation", False, witness=tuple(Matching(p) for p in minimizers),
                              params=params, details={"multiplicity": report.multiplicity})


# -- near-minimum union -------------------------------------------------------


def _grid_size(inst: PointSetInstance) -> int:
    lx, ly, hx, hy = inst.bounds
    return max(hx - lx, hy - ly, 1)


def _lengths(inst: PointSetInstance):
    return [[edge_length(a, b) for b in inst.b_points] for a in inst.a_points]


def _matching_length(lengths, perm) -> ExactLength:
    total = ExactLength()
    for i, j in enumerate(perm):
        total = total + lengths[i][j]
    return total


def _chunk_perms(n: int, first: int):
    rest = [j for j in range(n) if j != first]
    for tail in permutations(rest):
        yield (first,) + tail


def _chunk_min(args):
    inst, first, max_bits = args
    lengths = _lengths(inst)
    best_perm, best = None, None
    for perm in _chunk_perms(inst.n, first):
        total = _matching_length(lengths, perm)
        if best is None or compare_exact(total, best, max_bits) == Ordering.LESS:
            best_perm, best = perm, total
    return best_perm, best.terms


def _classify(total: ExactLength, wstar: ExactLength, threshold: Fraction, bits: int, max_bits: int):
    """True if ``total - wstar < threshold``, escalating precision as needed."""
    if total == wstar:
        return True
    b = bits
    while b <= max_bits:
        lo, hi = bracket_difference(total, wstar, b)
        if hi < threshold:
            return True
        if lo >= threshold:
            return False
        b *= 2
    return None


def _chunk_near(args):
    inst, first, wstar_terms, threshold, bits, max_bits = args
    lengths = _lengths(inst)
    wstar = ExactLength(wstar_terms)
    keep = []
    for perm in _chunk_perms(inst.n, first):
        verdict = _classify(_matching_length(lengths, perm), wstar, threshold, bits, max_bits)
        if verdict is None:
            raise PrecisionExhausted(f"matching {perm} straddles the near-minimum threshold")
        if verdict:
            keep.append(perm)
    return keep


def near_min_union(
    inst: PointSetInstance,
    bits: int = 128,
    max_bits: int = DEFAULT_MAX_BITS,
    workers: int = 1,
    cap: int = DEFAULT_CAP,
) -> NearMinUnion:
    """All matchings lighter than the optimum plus ``1/(8 N^4)`` and their edges."""
    n = inst.n
    if n > cap:
        raise CapExceeded(f"n={n} exceeds enumeration cap {cap}")
    N = _grid_size(inst)
    threshold = Fraction(1, 8 * N**4)
    mins = pmap(_chunk_min, [(inst, j, max_bits) for j in range(n)], workers)
    best_perm, best = None, None
    for perm, terms in mins:
        total = ExactLength(terms)
        if best is None or compare_exact(total, best, max_bits) == Ordering.LESS:
            best_perm, best = perm, total
    kept = pmap(
        _chunk_near,
        [(inst, j, best.terms, threshold, bits, max_bits) for j in range(n)],
        workers,
    )
    matchings = [Matching(p) for chunk in kept for p in chunk]
    edges = frozenset(e for m in matchings for e in m.edges())
    return NearMinUnion(inst, threshold, Matching(best_perm), best, matchings, edges, bits)


def _segment(inst: PointSetInstance, e: Edge):
    return (inst.a_points[e[0]], inst.b_points[e[1]])


def check_planarity(union: NearMinUnion, inst: Optional[PointSetInstance] = None) -> VerificationReport:
    """Pass iff no two union edges properly cross in the straight-line drawing."""
    inst = inst or union.instance
    edges = sorted(union.edges)
    params = {"n": inst.n, "edges": len(edges)}
    for e, f in combinations(edges, 2):
        if segments_cross(_segment(inst, e), _segment(inst, f)):
            return VerificationReport("planarity", False, witness=(e, f), params=params)
    return VerificationReport("planarity", True, params=params,
                              details={"matchings": len(union.matchings)})


def _matchings_within(n: int, edges: FrozenSet[Edge]):
    allowed = [sorted(j for (i, j) in edges if i == row) for row in range(n)]
    perm = [0] * n
    used = [False] * n

    def extend(i):
        if i == n:
            yield tuple(perm)
            return
        for j in allowed[i]:
            if not used[j]:
                used[j] = True
                perm[i] = j
                yield from extend(i + 1)
                used[j] = False

    yield from extend(0)


def check_wtv_uniqueness(union: NearMinUnion) -> VerificationReport:
    """Planar tie-breaking weight has a unique minimum on the union subgraph."""
    inst = union.instance
    tv = w_tv_assignment(inst)
    best, winners, count = None, [], 0
    for perm in _matchings_within(inst.n, union.edges):
        count += 1
        value = tv.matching_weight(perm)
        if best is None or value < best:
            best, winners = value, [perm]
        elif value == best:
            winners.append(perm)
    params = {"n": inst.n, "edges": len(union.edges), "perfect_matchings": count}
    if len(winners) == 1:
        return VerificationReport("wtv", True, params=params,
                                  details={"matching": Matching(winners[0]), "weight": best})
    return VerificationReport("wtv", False, witness=tuple(Matching(p) for p in winners[:2]),
                              params=params)


# -- uncrossing ---------------------------------------------------------------


def _swap(perm: Tuple[int, ...], a1: int, a2: int) -> Tuple[int, ...]:
    out = list(perm)
    out[a1], out[a2] = perm[a2], perm[a1]
    return tuple(out)


def _cycle_edges(p1: Sequence[int], p2: Sequence[int], start: int):
    """Alternating cycle of the symmetric difference through A-vertex ``start``.

    Returns the list of ``(edge, owner)`` pairs in traversal order beginning
    with the M1 edge at ``start``; ``owner`` is 1 or 2.
    """
    inv2 = {j: i for i, j in enumerate(p2)}
    out = []
    a = start
    while True:
        b = p1[a]
        out.append(((a, b), 1))
        a_next = inv2[b]
        out.append(((a_next, b), 2))
        a = a_next
        if a == start:
            return out


def uncross(
    m1: Matching, m2: Matching, e1: Edge, e2: Edge, inst: PointSetInstance
) -> Tuple[Matching, Matching]:
    """Rewire two matchings so the crossing pair ``e1``, ``e2`` becomes ``a1b2``, ``a2b1``.

    The multiset union of the outputs equals the multiset union of the inputs
    with ``e1``, ``e2`` replaced by the uncrossed pair.  When one matching
    holds both edges the swap happens inside that matching only.
    """
    p1, p2 = m1.perm, m2.perm
    (a1, b1), (a2, b2) = e1, e2
    if p1[a1] != b1 or p2[a2] != b2:
        raise ValueError("e1 must lie in m1 and e2 in m2")
    if a1 == a2 or b1 == b2 or not segments_cross(_segment(inst, e1), _segment(inst, e2)):
        raise NotCrossing(f"{e1} and {e2} do not cross")

    if p1[a2] == b2:
        out1, out2 = _swap(p1, a1, a2), p2
    elif p2[a1] == b1:
        out1, out2 = p1, _swap(p2, a1, a2)
    else:
        cyc1 = _cycle_edges(p1, p2, a1)
        on1 = {e for e, _ in cyc1}
        n = len(p1)
        new1 = dict(enumerate(p1))
        new2 = dict(enumerate(p2))
        if e2 in on1:
            # one cycle: split into the a1..a2 path and the b1..b2 path
            k2 = next(k for k, (e, _) in enumerate(cyc1) if e == e2)
            path_b = cyc1[1:k2]          # b1 -> ... -> b2
            path_a = cyc1[k2 + 1:]       # a2 -> ... -> a1
            for (a, b), owner in path_a:
                (new1 if owner == 1 else new2)[a] = b
            for (a, b), owner in path_b:
                (new2 if owner == 1 else new1)[a] = b
            new1[a1] = b2
            new2[a2] = b1
        else:
            cyc2 = _cycle_edges(p1, p2, a2)
            start = next(k for k, (e, _) in enumerate(cyc2) if e == e2)
            path1 = cyc1[1:]
            path2 = cyc2[start + 1:] + cyc2[:start]
            for (a, b), owner in path1:
                (new1 if owner == 1 else new2)[a] = b
            for (a, b), owner in path2:
                (new2 if owner == 1 else new1)[a] = b
            new1[a1] = b2
            new1[a2] = b1
        out1 = tuple(new1[i] for i in range(n))
        out2 = tuple(new2[i] for i in range(n))
    r1, r2 = Matching(out1), Matching(out2)
    before = sorted(m1.edges() + m2.edges())
    before.remove(e1)
    before.remove(e2)
    if sorted(before + [(a1, b2), (a2, b1)]) != sorted(r1.edges() + r2.edges()):
        raise NotPerfectMatching("uncrossing broke the edge multiset identity")
    return r1, r2


# -- quadrilateral gap --------------------------------------------------------


def _grid_segments(N: int) -> np.ndarray:
    pts = [(x, y) for x in range(N + 1) for y in range(N + 1)]
    return np.array([p + q for p, q in combinations(pts, 2)], dtype=np.int64)


def _orient(px, py, qx, qy, rx, ry):
    return np.sign((qx - px) * (ry - py) - (qy - py) * (rx - px))


def _gap_chunk(args):
    """Squared-length keys of every properly crossing segment pair in a row block."""
    segs, r0, r1 = args
    found: Dict[Tuple[int, int, int, int], Tuple] = {}
    x1, y1, x2, y2 = (segs[:, k] for k in range(4))
    for i in range(r0, r1):
        j = np.arange(i + 1, len(segs))
        if j.size == 0:
            continue
        ax, ay, bx, by = segs[i]
        cx, cy, dx, dy = x1[j], y1[j], x2[j], y2[j]
        o1 = _orient(ax, ay, bx, by, cx, cy)
        o2 = _orient(ax, ay, bx, by, dx, dy)
        o3 = _orient(cx, cy, dx, dy, ax, ay)
        o4 = _orient(cx, cy, dx, dy, bx, by)
        hit = (o1 * o2 < 0) & (o3 * o4 < 0)
        if not hit.any():
            continue
        cx, cy, dx, dy, jj = cx[hit], cy[hit], dx[hit], dy[hit], j[hit]
        d1 = np.full(jj.shape, (ax - bx) ** 2 + (ay - by) ** 2)
        d2 = (cx - dx) ** 2 + (cy - dy) ** 2
        dlo, dhi = np.minimum(d1, d2), np.maximum(d1, d2)
        # both pairs of opposite sides: (a-d, c-b) and (a-c, b-d)
        for sx1, sy1, sx2, sy2, tx1, ty1, tx2, ty2 in (
            (ax, ay, dx, dy, cx, cy, bx, by),
            (ax, ay, cx, cy, bx, by, dx, dy),
        ):
            s1 = (sx1 - sx2) ** 2 + (sy1 - sy2) ** 2
            s2 = (tx1 - tx2) ** 2 + (ty1 - ty2) ** 2
            keys = np.stack([dlo, dhi, np.minimum(s1, s2), np.maximum(s1, s2)], axis=1)
            uniq, first = np.unique(keys, axis=0, return_index=True)
            for key, k in zip(map(tuple, uniq.tolist()), first.tolist()):
                if key not in found:
                    found[key] = (int(i), int(jj[k]))
    return found


def _key_gap(key, p):
    """Scaled integer bracket of sqrt(d1) + sqrt(d2) - sqrt(s1) - sqrt(s2)."""
    d1, d2, s1, s2 = key
    lo_d = math.isqrt(d1 << 2 * p) + math.isqrt(d2 << 2 * p)
    lo_s = math.isqrt(s1 << 2 * p) + math.isqrt(s2 << 2 * p)
    return lo_d - lo_s - 2, lo_d + 2 - lo_s


def gap_scan(
    N: int,
    bits: int = 128,
    workers: int = 1,
    samples: Optional[int] = None,
    seed: int = 0,
) -> VerificationReport:
    """Minimum diagonal-versus-opposite-sides gap over crossing grid quadruples.

    Exhaustive over the ``[0, N]^2`` grid when ``N <= 8`` (or ``samples`` is
    None); otherwise ``samples`` random segment pairs are drawn.
    """
    if N < 1:
        raise ValueError("N must be positive")
    segs = _grid_segments(N)
    if samples is None and N > 8:
        samples = 200_000
    exhaustive = samples is None
    if exhaustive:
        block = 64
        tasks = [(segs, r, min(r + block, len(segs))) for r in range(0, len(segs), block)]
        found: Dict = {}
        for part in pmap(_gap_chunk, tasks, workers):
            for key, wit in part.items():
                found.setdefault(key, wit)
    else:
        rng = np.random.default_rng(seed)
        found = {}
        idx = rng.integers(0, len(segs), size=(samples, 2))
        for i, j in idx.tolist():
            if i == j:
                continue
            i, j = min(i, j), max(i, j)
            part = _gap_chunk((segs[[i, j]], 0, 1))
            for key in part:
                found.setdefault(key, (i, j))
    bound = Fraction(1, 4 * N**4)
    tolerance = Fraction(1, 1 << max(bits - 8, 0))
    p = bits + 2
    best = None
    for key in sorted(found):
        lo, hi = _key_gap(key, p)
        if best is None or lo < best[0]:
            best = (lo, hi, key)
    params = {"N": N, "bits": bits, "mode": "exhaustive" if exhaustive else f"sampled:{samples}"}
    if best is None:
        return VerificationReport("gap", True, params=params, details={"crossings": 0})
    lo, hi, key = best
    gap_lo, gap_hi = Fraction(lo, 1 << p), Fraction(hi, 1 << p)
    i, j = found[key]
    quad = (tuple(segs[i].tolist()), tuple(segs[j].tolist()))
    details = {
        "min_gap_lower": gap_lo,
        "min_gap_upper": gap_hi,
        "squared_lengths": key,
        "quadruple": quad,
        "bound": bound,
        "distinct_keys": len(found),
    }
    passed = gap_lo >= bound - tolerance
    return VerificationReport("gap", passed, witness=None if passed else details,
                              params=params, details=details)
