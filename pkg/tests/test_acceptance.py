"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (lines appear inline) or
``python3 tests/test_acceptance.py``.
"""

import os
import time
from fractions import Fraction
from itertools import permutations

import mpmath
import numpy as np
import pytest

from ewpm.engines import Matching
from ewpm.errors import DegenerateInput
from ewpm.experiments import (
    delta_records,
    engine_equivalence_records,
    full_well_equivalence_records,
    isolation_records,
    planarity_records,
    random_general_position,
)
from ewpm.geometry import ExactLength, bracket_difference, integer_sqrt, random_instance, segments_cross
from ewpm.io import instance_hash, parse_record, strip_timing
from ewpm.lowerbound import check_distinct_weights, construction1, matching_weight, verify_theorem1
from ewpm.verification import gap_scan, uncross

SEED = 20240601
_records = {}


@pytest.fixture(autouse=True)
def _mp_precision():
    with mpmath.workprec(300):
        yield


@pytest.fixture
def report(capsys):
    def emit(k, ok, msg, elapsed, limit):
        ok = bool(ok) and elapsed < limit
        line = f"CRITERION {k:>2}: {'PASS' if ok else 'FAIL'}  {msg}  ({elapsed:.1f}s, limit {limit:.0f}s)"
        with capsys.disabled():
            print("\n" + line)
        return ok

    return emit


def _all_pass(lines):
    return all(parse_record(line)["pass"] == "pass" for line in lines)


def _suite(name, workers):
    if name == "equivalence":
        return (engine_equivalence_records(100, SEED, workers)
                + full_well_equivalence_records(20, SEED, workers))
    if name == "delta":
        return delta_records(50, SEED, workers)
    return planarity_records(100, SEED, workers)


def _cached(name):
    if name not in _records:
        _records[name] = _suite(name, 1)
    return _records[name]


def test_criterion_01_quad_gap(report):
    t0 = time.perf_counter()
    reps = {N: gap_scan(N, bits=128) for N in (4, 8)}
    ok = all(r.passed and r.details["min_gap_lower"] >= Fraction(1, 4 * N**4) for N, r in reps.items())
    gaps = ", ".join(f"N={N} min>={float(r.details['min_gap_lower']):.6g} vs {float(r.details['bound']):.6g}"
                     for N, r in reps.items())
    assert report(1, ok, f"quadrilateral gap exhaustive: {gaps}", time.perf_counter() - t0, 300)


def test_criterion_02_isolation(report):
    t0 = time.perf_counter()
    lines = isolation_records(100, SEED)
    ok = len(lines) >= 100 and _all_pass(lines)
    bad = sum(parse_record(x)["pass"] != "pass" for x in lines)
    assert report(2, ok, f"W_ell isolation on {len(lines)} perturbed instances, {bad} with ties",
                  time.perf_counter() - t0, 300)


def test_criterion_03_engine_equivalence(report):
    t0 = time.perf_counter()
    lines = _cached("equivalence")
    bad = sum(parse_record(x)["pass"] != "pass" for x in lines)
    ok = len(lines) >= 120 and bad == 0
    assert report(3, ok, f"mvv = hungarian = brute on {len(lines)} tables (20 full W_ell), {bad} mismatches",
                  time.perf_counter() - t0, 600)


def test_criterion_04_delta_guarantee(report):
    t0 = time.perf_counter()
    lines = _cached("delta")
    ok = len(lines) >= 50 and _all_pass(lines)
    worst = Fraction(-1)
    for line in lines:
        rec = parse_record(line)
        excess = Fraction(rec["weight_upper"]) - Fraction(rec["optimum_lower"])
        worst = max(worst, excess)
        ok = ok and excess < Fraction(1, 100)
    # independent oracle: regenerate the same instances, brute force in 300-bit mpmath
    rng = np.random.default_rng(SEED)
    for k, line in enumerate(lines):
        rec = parse_record(line)
        n = 1 + k % 6
        inst = random_instance(n, int(rng.integers(max(2, n), 33)), rng)
        ok = ok and instance_hash(inst) == rec["instance"]
        opt = min(_mp_weight(inst, p) for p in permutations(range(n)))
        got = _mp_weight(inst, tuple(int(v) for v in rec["matching"].split(",")))
        ok = ok and got - opt < mpmath.mpf(1) / 100
        ok = ok and Fraction(rec["weight_lower"]) <= Fraction(str(got + mpmath.mpf(2) ** -200))
    assert report(4, ok, f"{len(lines)} solves within 1/100, worst excess {float(worst):.3g}",
                  time.perf_counter() - t0, 600)


def test_criterion_05_union_planarity(report):
    t0 = time.perf_counter()
    lines = _cached("planarity")
    multi = sum(int(parse_record(x)["near_min"]) > 1 for x in lines)
    ok = len(lines) >= 100 and _all_pass(lines)
    assert report(5, ok, f"near-min unions planar with unique W_TV minimum on {len(lines)} instances "
                         f"({multi} with several matchings)", time.perf_counter() - t0, 600)


def _mp_weight(inst, perm):
    return mpmath.fsum(mpmath.sqrt((a.x - inst.b_points[j].x) ** 2 + (a.y - inst.b_points[j].y) ** 2)
                       for a, j in zip(inst.a_points, perm))


def _crossing_configs(count, N, rng):
    """Yield (inst, m1, m2, e1, e2); half inside one matching, half across two."""
    made = 0
    while made < count:
        inst = random_general_position(int(rng.integers(3, 7)), N, rng)
        n = inst.n
        p1 = tuple(rng.permutation(n).tolist())
        p2 = p1 if made % 2 == 0 else tuple(rng.permutation(n).tolist())
        for a1 in range(n):
            a2 = int(rng.integers(0, n))
            e1, e2 = (a1, p1[a1]), (a2, p2[a2])
            if a1 == a2 or e1[1] == e2[1]:
                continue
            try:
                crossing = segments_cross((inst.a_points[a1], inst.b_points[e1[1]]),
                                          (inst.a_points[a2], inst.b_points[e2[1]]))
            except DegenerateInput:
                continue
            if crossing:
                made += 1
                yield inst, Matching(p1), Matching(p2), e1, e2
                break


def test_criterion_06_uncrossing(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    N = 16
    bound = Fraction(1, 4 * N**4)
    count, worst, ok = 0, None, True
    for inst, m1, m2, e1, e2 in _crossing_configs(120, N, rng):
        r1, r2 = uncross(m1, m2, e1, e2, inst)
        if m1 == m2:
            before, after = matching_weight(inst, m1), matching_weight(inst, r1)
        else:
            before = matching_weight(inst, m1) + matching_weight(inst, m2)
            after = matching_weight(inst, r1) + matching_weight(inst, r2)
        lo, _ = bracket_difference(before, after, 128)
        ok = ok and lo >= bound
        worst = lo if worst is None else min(worst, lo)
        count += 1
    assert report(6, ok and count >= 100, f"{count} uncrossings, smallest certified drop "
                  f"{float(worst):.4g} >= {float(bound):.3g}", time.perf_counter() - t0, 120)


def test_criterion_07_distinctness(report):
    t0 = time.perf_counter()
    reps = [check_distinct_weights(construction1(n)) for n in (2, 3, 4)]
    ok = all(r.passed for r in reps)
    pairs = "/".join(str(r.details.get("pairs")) for r in reps)
    assert report(7, ok, f"two-line construction weights distinct for n=2,3,4 ({pairs} pairs)",
                  time.perf_counter() - t0, 120)


def test_criterion_08_theorem1(report):
    t0 = time.perf_counter()
    parts, ok = [], True
    for n in (3, 4):
        rep = verify_theorem1(n, bits=max(192, 64 * n))
        d = rep.details
        ok = ok and rep.passed and rep.params["bits"] >= 192 and d["box_ok"]
        parts.append(f"n={n} gap<={float(d['gap_upper']):.3g} (bound {d['bound']}), extent {d['extent']}"
                     f" <= 3n^5={3 * n**5}")
    assert report(8, ok, "; ".join(parts), time.perf_counter() - t0, 900)


def test_criterion_09_d_ell_bracket(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    N = 1 << 12
    pts = rng.integers(0, N + 1, size=(10_000, 4)).tolist()
    ells = rng.integers(1, 41, size=10_000).tolist()
    ok = True
    for (x1, y1, x2, y2), ell in zip(pts, ells):
        m = (x1 - x2) ** 2 + (y1 - y2) ** 2
        d_ell = integer_sqrt(m << (2 * ell))
        lo, hi = ExactLength({m: 1} if m else {}).bracket(ell + 64)
        scale = 1 << ell
        # 2^l d - 1 < d_l <= 2^l d
        ok = ok and hi * scale - 1 < d_ell and d_ell <= lo * scale
    assert report(9, ok, "10^4 random edges, l in 1..40: 2^l d - 1 < d_l <= 2^l d",
                  time.perf_counter() - t0, 60)


def test_criterion_10_determinism(report):
    t0 = time.perf_counter()
    counts = sorted({1, 2, os.cpu_count() or 1})
    ok = True
    for name in ("equivalence", "delta", "planarity"):
        base = [strip_timing(x) for x in _cached(name)]
        for w in counts:
            if w == 1:
                continue
            ok = ok and [strip_timing(x) for x in _suite(name, w)] == base
    assert report(10, ok, f"criteria 3-5 byte-identical for workers {counts}",
                  time.perf_counter() - t0, 1800)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
