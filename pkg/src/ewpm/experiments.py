"""Seeded batch experiments that emit result records.

These back the ``bench`` subcommand and the acceptance suite.  Each batch
takes a ``workers`` argument that is threaded into the engines; the records
they return are independent of it apart from ``wall_ms``.
"""

from __future__ import annotations

import time
from fractions import Fraction
from typing import List

import numpy as np

from .engines import (
    brute_force_min,
    hungarian_min,
    mvv_min,
    solve_delta_ewpm,
)
from .geometry import PointSetInstance, has_collinear_triple, perturb, random_instance
from .io import format_record, instance_hash
from .verification import check_isolation, check_planarity, check_wtv_uniqueness, near_min_union
from .weights import EdgeWeightAssignment, choose_ell, shift_nonnegative, w_ell_assignment


def _ms(t0: float) -> float:
    return (time.perf_counter() - t0) * 1e3


def random_isolating_table(n: int, rng: np.random.Generator) -> EdgeWeightAssignment:
    """Random weights in ``[0, 4n^2]``, redrawn until the minimum is unique."""
    while True:
        w = EdgeWeightAssignment.from_table(rng.integers(0, 4 * n * n + 1, size=(n, n)).tolist())
        if brute_force_min(w).multiplicity == 1:
            return w


def random_general_position(n: int, N: int, rng: np.random.Generator) -> PointSetInstance:
    while True:
        inst = random_instance(n, N, rng)
        if has_collinear_triple(inst) is None:
            return inst


def random_perturbed(n: int, N: int, rng: np.random.Generator) -> PointSetInstance:
    return perturb(random_instance(n, N, rng))


def engine_equivalence_records(count: int = 100, seed: int = 0, workers: int = 1, max_n: int = 6) -> List[str]:
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = 1 + k % max_n
        w = random_isolating_table(n, rng)
        t0 = time.perf_counter()
        b = brute_force_min(w, workers=workers)
        h = hungarian_min(w)
        m = mvv_min(w, workers=workers)
        same = b.matching == h.matching == m.matching
        out.append(format_record({
            "command": "equivalence", "engine": "mvv|hungarian|brute",
            "matching": m.matching, "pass": same,
            "witness": None if same else f"{b.matching}|{h.matching}|{m.matching}",
            "weight": m.total_weight, "valuation": m.valuation, "wall_ms": _ms(t0),
        }))
    return out


def full_well_equivalence_records(count: int = 20, seed: int = 0, workers: int = 1) -> List[str]:
    """MVV on the complete W_ell table against brute force, n <= 3 on a 4x4 grid."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = 2 + k % 2
        inst = random_general_position(n, 4, rng)
        ell = choose_ell(n, 4, 1).ell
        w = shift_nonnegative(w_ell_assignment(inst, ell))
        t0 = time.perf_counter()
        b = brute_force_min(w, workers=workers)
        m = mvv_min(w, workers=workers)
        same = b.matching == m.matching and b.multiplicity == 1
        out.append(format_record({
            "command": "equivalence-well", "instance": instance_hash(inst), "engine": "mvv|brute",
            "ell": ell, "matching": m.matching, "pass": same,
            "witness": None if same else f"{b.matching}|{m.matching}", "wall_ms": _ms(t0),
        }))
    return out


def isolation_records(count: int = 100, seed: int = 0, workers: int = 1) -> List[str]:
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = 2 + k % 4
        N = int(rng.integers(4, 17))
        inst = random_perturbed(n, N, rng)
        ell = choose_ell(n, inst.grid_bound, 1).ell
        t0 = time.perf_counter()
        rep = check_isolation(w_ell_assignment(inst, ell), workers=workers)
        out.append(format_record({
            "command": "verify-isolation", "instance": instance_hash(inst), "engine": "brute",
            "ell": ell, "matching": rep.details.get("matching"), "pass": rep.passed,
            "witness": rep.witness, "wall_ms": _ms(t0),
        }))
    return out


def delta_records(count: int = 50, seed: int = 0, workers: int = 1, delta=Fraction(1, 100),
                  engine: str = "hungarian") -> List[str]:
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = 1 + k % 6
        N = int(rng.integers(max(2, n), 33))
        inst = random_instance(n, N, rng)
        t0 = time.perf_counter()
        res = solve_delta_ewpm(inst, delta, engine=engine, workers=workers, certify=True)
        lo, hi = res.exact_weight_bracket
        out.append(format_record({
            "command": "solve", "instance": instance_hash(inst), "engine": engine,
            "ell": res.ell, "K": res.K, "matching": res.matching,
            "weight_lower": lo, "weight_upper": hi, "pass": res.certified,
            "witness": None if res.certified else f"optimum_lower={res.optimum_lower}",
            "optimum_lower": res.optimum_lower, "delta": delta, "wall_ms": _ms(t0),
        }))
    return out


def planarity_records(count: int = 100, seed: int = 0, workers: int = 1) -> List[str]:
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = 2 + k % 4
        N = int(rng.integers(4, 17))
        inst = random_perturbed(n, N, rng)
        t0 = time.perf_counter()
        union = near_min_union(inst, workers=workers)
        plan = check_planarity(union)
        tv = check_wtv_uniqueness(union)
        ok = plan.passed and tv.passed
        out.append(format_record({
            "command": "verify-planarity", "instance": instance_hash(inst), "engine": "brute",
            "matching": union.optimum, "pass": ok,
            "witness": None if ok else f"{plan.witness}|{tv.witness}",
            "union_edges": len(union.edges), "near_min": len(union.matchings),
            "wall_ms": _ms(t0),
        }))
    return out
