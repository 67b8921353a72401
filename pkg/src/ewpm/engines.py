"""Minimum-weight perfect matching engines and the end-to-end solver.

Three engines share one contract (integer weight table in, permutation out):

* ``brute_force_min`` enumerates all ``n!`` permutations and reports how many
  attain the minimum.
* ``hungarian_min`` is the classic O(n^3) potentials method on exact ints.
* ``mvv_min`` substitutes ``2**w`` into the biadjacency matrix and reads the
  unique minimum matching off the 2-adic valuations of the determinant and
  its ``n*n`` minors.  The minors are independent tasks.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from ._parallel import pmap
from .errors import (
    CapExceeded,
    FeasibilityExceeded,
    IsolationViolated,
    NotPerfectMatching,
    PerturbationFailed,
    SingularMatrix,
    WeightsNegative,
)
from .geometry import (
    ExactLength,
    Ordering,
    PerturbationParams,
    PointSetInstance,
    compare_exact,
    default_k,
    edge_length,
    has_collinear_triple,
    perturb,
)
from .weights import EdgeWeightAssignment, choose_ell, shift_nonnegative, w_ell_assignment

DEFAULT_CAP = 8
DEFAULT_BIT_CEILING = 1 << 24
# exponents above this switch mvv_min to truncated 2-adic elimination
EXACT_EXPONENT_LIMIT = 2048
ADIC_START_BITS = 64
ADIC_MAX_BITS = 1 << 14


@dataclass(frozen=True)
class Matching:
    """``perm[i] = j`` means edge ``(a_i, b_j)``."""

    perm: Tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(j) for j in self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise NotPerfectMatching(f"{perm} is not a permutation")
        object.__setattr__(self, "perm", perm)

    @property
    def n(self) -> int:
        return len(self.perm)

    def edges(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(enumerate(self.perm))

    def __str__(self) -> str:
        return ",".join(map(str, self.perm))


@dataclass
class EngineReport:
    matching: Matching
    total_weight: int
    engine: str
    multiplicity: Optional[int] = None
    valuation: Optional[int] = None
    certificates: Optional[Dict[Tuple[int, int], Optional[int]]] = None
    wall_ms: float = 0.0


# -- brute force --------------------------------------------------------------


def iter_matchings(n: int, cap: int = DEFAULT_CAP) -> Iterator[Tuple[int, ...]]:
    if n > cap:
        raise CapExceeded(f"n={n} exceeds enumeration cap {cap}")
    return permutations(range(n))


def enumerate_matchings(n: int, visitor: Callable[[Matching], None], cap: int = DEFAULT_CAP) -> None:
    """Call ``visitor`` on every perfect matching in lexicographic order."""
    for perm in iter_matchings(n, cap):
        visitor(Matching(perm))


def _brute_chunk(args):
    w, first = args
    n = len(w)
    rest = [j for j in range(n) if j != first]
    head = w[0][first]
    best = None
    best_perm = None
    count = 0
    for tail in permutations(rest):
        total = head
        for i, j in enumerate(tail, 1):
            total += w[i][j]
        if best is None or total < best:
            best, best_perm, count = total, (first,) + tail, 1
        elif total == best:
            count += 1
    return best, best_perm, count


def brute_force_min(w: EdgeWeightAssignment, workers: int = 1, cap: int = DEFAULT_CAP) -> EngineReport:
    """Exact minimum with lexicographic tie-break and its multiplicity."""
    n = w.n
    if n > cap:
        raise CapExceeded(f"n={n} exceeds enumeration cap {cap}")
    t0 = time.perf_counter()
    chunks = pmap(_brute_chunk, [(w.w, j) for j in range(n)], workers)
    best, best_perm, count = None, None, 0
    for value, perm, c in chunks:
        if best is None or value < best:
            best, best_perm, count = value, perm, c
        elif value == best:
            count += c
    return EngineReport(
        Matching(best_perm), best, "brute", multiplicity=count,
        wall_ms=(time.perf_counter() - t0) * 1e3,
    )


# -- Hungarian ----------------------------------------------------------------


def hungarian_min(w: EdgeWeightAssignment) -> EngineReport:
    t0 = time.perf_counter()
    cost = w.w
    n = w.n
    INF = float("inf")
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = INF
            j1 = 0
            row = cost[i0 - 1]
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    perm = [0] * n
    for j in range(1, n + 1):
        perm[p[j] - 1] = j - 1
    m = Matching(perm)
    return EngineReport(m, w.matching_weight(m.perm), "hungarian",
                        wall_ms=(time.perf_counter() - t0) * 1e3)


# -- determinants -------------------------------------------------------------


def bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free elimination."""
    a = [list(r) for r in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def v2(x: int) -> int:
    if x == 0:
        raise ValueError("v2(0) is undefined")
    return (x & -x).bit_length() - 1


def det_v2(D: Sequence[Sequence[int]]) -> Tuple[int, bool]:
    """2-adic valuation of ``det(D)`` and the odd-cofactor certificate."""
    det = bareiss_det(D)
    if det == 0:
        raise SingularMatrix("determinant is zero")
    v = v2(det)
    return v, bool((det >> v) & 1)


def mvv_build_matrix(w: EdgeWeightAssignment) -> List[List[int]]:
    if w.min_entry() < 0:
        raise WeightsNegative("apply shift_nonnegative before building the matrix")
    return [[1 << x for x in row] for row in w.w]


# Truncated 2-adic numbers: (v, u, p) stands for 2**v * (u + O(2**p)) with u
# odd; p == 0 means only "divisible by 2**v" is known.


def _adic_mul(a, b):
    v = a[0] + b[0]
    p = min(a[2], b[2])
    if p == 0:
        return (v, 0, 0)
    return (v, (a[1] * b[1]) & ((1 << p) - 1), p)


def _adic_sub(a, b):
    va, ua, pa = a
    vb, ub, pb = b
    top = min(va + pa, vb + pb)
    low = min(va, vb)
    width = top - low
    if width <= 0:
        return (top, 0, 0)
    mask = (1 << width) - 1
    val = 0
    if va - low < width:
        val += ua << (va - low)
    if vb - low < width:
        val -= ub << (vb - low)
    val &= mask
    if val == 0:
        return (top, 0, 0)
    t = v2(val)
    return (low + t, val >> t, width - t)


def _adic_det_valuation(entries) -> Optional[int]:
    """Valuation of det, or None if the working precision is insufficient."""
    m = [list(r) for r in entries]
    k = len(m)
    rows = list(range(k))
    cols = list(range(k))
    total = 0
    for _ in range(k):
        best = None
        floor = None
        for r in rows:
            for c in cols:
                v, _u, p = m[r][c]
                if p > 0:
                    if best is None or v < best[0]:
                        best = (v, r, c)
                elif floor is None or v < floor:
                    floor = v
        if best is None or (floor is not None and floor < best[0]):
            return None
        vp, pr, pc = best
        _, up, pp = m[pr][pc]
        inv = pow(up, -1, 1 << pp)
        total += vp
        rows.remove(pr)
        cols.remove(pc)
        for r in rows:
            vr, ur, prr = m[r][pc]
            fp = min(prr, pp)
            factor = (vr - vp, (ur * inv) & ((1 << fp) - 1), fp) if fp else (vr - vp, 0, 0)
            row_r, row_p = m[r], m[pr]
            for c in cols:
                row_r[c] = _adic_sub(row_r[c], _adic_mul(factor, row_p[c]))
    return total


def _exponent_det_valuation(exps: Sequence[Sequence[int]], mode: str) -> Optional[int]:
    """v2(det(2**exps)); None when the determinant is zero."""
    if not exps:
        return 0
    if mode == "adic":
        bits = ADIC_START_BITS
        while bits <= ADIC_MAX_BITS:
            entries = [[(e, 1, bits) for e in row] for row in exps]
            v = _adic_det_valuation(entries)
            if v is not None:
                return v
            bits *= 2
        if max(max(r) for r in exps) > EXACT_EXPONENT_LIMIT:
            raise IsolationViolated("2-adic elimination could not certify a nonzero determinant")
    det = bareiss_det([[1 << e for e in row] for row in exps])
    return v2(det) if det else None


def _minor_task(args):
    exps, i, j, mode = args
    sub = [[e for c, e in enumerate(row) if c != j] for r, row in enumerate(exps) if r != i]
    return _exponent_det_valuation(sub, mode)


def mvv_min(
    w: EdgeWeightAssignment,
    workers: int = 1,
    mode: str = "auto",
    bit_ceiling: int = DEFAULT_BIT_CEILING,
) -> EngineReport:
    """Isolated minimum matching from determinant valuations.

    ``mode`` is ``"exact"`` (Bareiss on the big-integer matrix), ``"adic"``
    (elimination on truncated 2-adic numbers with precision escalation) or
    ``"auto"`` (adic once exponents exceed ``EXACT_EXPONENT_LIMIT``).
    """
    t0 = time.perf_counter()
    if w.min_entry() < 0:
        raise WeightsNegative("apply shift_nonnegative before running mvv_min")
    need = w.max_entry() + 1
    if need > bit_ceiling:
        raise FeasibilityExceeded(
            f"matrix entries need {need} bits, ceiling is {bit_ceiling}", required_bits=need
        )
    if mode == "auto":
        mode = "adic" if w.max_entry() > EXACT_EXPONENT_LIMIT else "exact"
    if mode not in ("exact", "adic"):
        raise ValueError(f"unknown mode {mode!r}")
    n = w.n
    exps = w.w
    wstar = _exponent_det_valuation(exps, mode)
    if wstar is None:
        raise SingularMatrix("det(2^w) is zero")
    tasks = [(exps, i, j, mode) for i in range(n) for j in range(n)]
    minors = pmap(_minor_task, tasks, workers)
    certs: Dict[Tuple[int, int], Optional[int]] = {}
    chosen: Dict[int, List[int]] = {i: [] for i in range(n)}
    for (_, i, j, _), val in zip(tasks, minors):
        certs[(i, j)] = val
        if val is not None and val + exps[i][j] == wstar:
            chosen[i].append(j)
    if any(len(js) != 1 for js in chosen.values()):
        raise IsolationViolated(f"selected edges {chosen} are not a perfect matching")
    try:
        m = Matching(tuple(chosen[i][0] for i in range(n)))
    except NotPerfectMatching as exc:
        raise IsolationViolated(str(exc)) from exc
    total = w.matching_weight(m.perm)
    if total != wstar:
        raise IsolationViolated(f"matching weight {total} != valuation {wstar}")
    return EngineReport(m, total, "mvv", valuation=wstar, certificates=certs,
                        wall_ms=(time.perf_counter() - t0) * 1e3)


ENGINES = ("mvv", "hungarian", "brute")


def run_engine(engine: str, w: EdgeWeightAssignment, workers: int = 1, **kwargs) -> EngineReport:
    if engine == "mvv":
        return mvv_min(w, workers=workers, **kwargs)
    if engine == "hungarian":
        return hungarian_min(w)
    if engine == "brute":
        return brute_force_min(w, workers=workers)
    raise ValueError(f"unknown engine {engine!r}")


# -- end-to-end ---------------------------------------------------------------


def matching_length(inst: PointSetInstance, perm: Sequence[int]) -> ExactLength:
    total = ExactLength()
    for i, j in enumerate(perm):
        total = total + edge_length(inst.a_points[i], inst.b_points[j])
    return total


def exact_optimum(inst: PointSetInstance, cap: int = DEFAULT_CAP) -> Tuple[Matching, ExactLength]:
    """Brute-force Euclidean optimum under exact comparison."""
    n = inst.n
    lengths = [[edge_length(a, b) for b in inst.b_points] for a in inst.a_points]
    best_perm, best = None, None
    for perm in iter_matchings(n, cap):
        total = ExactLength()
        for i, j in enumerate(perm):
            total = total + lengths[i][j]
        if best is None or compare_exact(total, best) == Ordering.LESS:
            best_perm, best = perm, total
    return Matching(best_perm), best


@dataclass
class SolveResult:
    matching: Matching
    exact_weight_bracket: Tuple[Fraction, Fraction]
    delta: Fraction
    ell: int
    K: Optional[int]
    engine_report: EngineReport
    # filled when a brute-force optimum was available
    optimum_lower: Optional[Fraction] = None
    certified: Optional[bool] = None
    weight_bits: int = 0


def _origin_instance(inst: PointSetInstance) -> PointSetInstance:
    if inst.signed_box is None:
        return inst
    lx, ly, hx, hy = inst.signed_box
    shift = lambda p: (p.x - lx, p.y - ly)  # noqa: E731
    return PointSetInstance(
        tuple(map(shift, inst.a_points)), tuple(map(shift, inst.b_points)), max(hx - lx, hy - ly, 1)
    )


def perturb_for_delta(inst: PointSetInstance, delta: Fraction) -> Tuple[PointSetInstance, int]:
    """Perturb with ``K`` large enough that the two ``4n^3/K`` errors fit in ``delta/2``."""
    n = inst.n
    K = max(default_k(n, inst.grid_bound), -(-16 * n**3 // delta))
    K = int(K)
    while True:
        try:
            return perturb(inst, PerturbationParams(K)), K
        except PerturbationFailed:
            K *= 2


def solve_delta_ewpm(
    inst: PointSetInstance,
    delta,
    engine: str = "mvv",
    workers: int = 1,
    ell: Optional[int] = None,
    bits: int = 128,
    certify: bool = False,
    bit_ceiling: int = DEFAULT_BIT_CEILING,
) -> SolveResult:
    """Perfect matching whose Euclidean weight is below the optimum plus ``delta``."""
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    work = _origin_instance(inst)
    K = None
    target = delta
    if has_collinear_triple(work) is not None:
        work, K = perturb_for_delta(work, delta)
        # perturbed coordinates are scaled by K
        target = delta / 2 * K
    if ell is None:
        ell = choose_ell(work.n, work.grid_bound, target).ell
    weights = shift_nonnegative(w_ell_assignment(work, ell))
    kwargs = {"bit_ceiling": bit_ceiling} if engine == "mvv" else {}
    report = run_engine(engine, weights, workers=workers, **kwargs)
    length = matching_length(inst, report.matching.perm)
    result = SolveResult(
        report.matching, length.bracket(bits), delta, ell, K, report,
        weight_bits=weights.max_entry().bit_length(),
    )
    if certify:
        _, opt = exact_optimum(inst)
        result.optimum_lower = opt.bracket(bits)[0]
        result.certified = result.exact_weight_bracket[1] - result.optimum_lower < delta
    return result
