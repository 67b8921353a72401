from fractions import Fraction
from itertools import permutations

import mpmath
import numpy as np
import pytest

from ewpm.geometry import ExactLength, PointSetInstance, has_collinear_triple, random_instance, squared_distance
from ewpm.weights import (
    EdgeWeightAssignment,
    choose_ell,
    d_ell_assignment,
    least_power_at_least,
    shift_nonnegative,
    w_ell_assignment,
    w_tv_assignment,
)


def one_edge(a, b, N=8):
    return PointSetInstance((a,), (b,), N)


@pytest.mark.parametrize("a, b, ell, expected", [
    ((0, 0), (3, 4), 3, 40),
    ((0, 0), (1, 1), 2, 5),
    ((0, 0), (2, 1), 4, 35),
])
def test_d_ell_examples(a, b, ell, expected):
    assert d_ell_assignment(one_edge(a, b), ell).w == ((expected,),)


@pytest.mark.parametrize("a, b, expected", [
    ((0, 0), (2, 3), 6),
    ((1, 5), (2, 3), -6),
    ((0, 0), (4, 0), 0),
])
def test_w_tv_examples(a, b, expected):
    assert w_tv_assignment(one_edge(a, b)).w == ((expected,),)


@pytest.mark.parametrize("n, N, delta, ell", [
    (3, 4, Fraction(1, 8), 13),
    (1, 1, Fraction(1), 3),
    (4, 16, Fraction(1, 100), 21),
])
def test_choose_ell_examples(n, N, delta, ell):
    assert choose_ell(n, N, delta).ell == ell


def test_least_power_matches_float_log():
    for num in range(1, 300):
        for den in (1, 3, 7, 64):
            x = Fraction(num, den)
            t = least_power_at_least(x)
            assert 2**t >= x and (t == 0 or 2 ** (t - 1) < x)


def test_w_ell_formula():
    # n=2, N=4: multiplier 2*2*16+1 = 65
    inst = PointSetInstance(((0, 0), (1, 3)), ((4, 1), (2, 2)), 4)
    ell = 5
    w = w_ell_assignment(inst, ell)
    assert w.multiplier == 65 and w.ell == ell
    d = d_ell_assignment(inst, ell).w
    tv = w_tv_assignment(inst).w
    for i in range(2):
        for j in range(2):
            assert w.w[i][j] == 65 * d[i][j] + tv[i][j]
    assert 65 * 10 - 3 == 647
    assert w_ell_assignment(PointSetInstance(((0, 0),), ((0, 0),), 1), 1).w == ((0,),)


def test_shift_examples():
    w = EdgeWeightAssignment.from_table([[-6, 0], [3, 5]])
    s = shift_nonnegative(w)
    assert s.w == ((0, 6), (9, 11)) and s.shift == 6
    w = EdgeWeightAssignment.from_table([[1, 2], [3, 4]])
    assert shift_nonnegative(w) is w


def _argmins(w):
    values = {p: w.matching_weight(p) for p in permutations(range(w.n))}
    best = min(values.values())
    return {p for p, v in values.items() if v == best}


@pytest.mark.parametrize("seed", range(20))
def test_shift_preserves_argmin(seed):
    rng = np.random.default_rng(seed)
    w = EdgeWeightAssignment.from_table(rng.integers(-20, 20, size=(3, 3)).tolist())
    assert _argmins(w) == _argmins(shift_nonnegative(w))


@pytest.mark.parametrize("seed", range(10))
def test_d_ell_bracket_random_edges(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(4, 100, rng)
    for ell in (1, 7, 23, 40):
        d = d_ell_assignment(inst, ell).w
        for i, a in enumerate(inst.a_points):
            for j, b in enumerate(inst.b_points):
                lo, hi = ExactLength({squared_distance(a, b): 1}).bracket(ell + 64)
                assert d[i][j] <= lo * 2**ell and hi * 2**ell < d[i][j] + 1


@pytest.mark.parametrize("seed", range(30))
def test_refinement(seed):
    """Heavier d_ell matching is heavier under W_ell."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    N = int(rng.integers(max(3, n), 17))
    inst = random_instance(n, N, rng)
    ell = int(rng.integers(1, 12))
    d = d_ell_assignment(inst, ell)
    W = w_ell_assignment(inst, ell)
    perms = list(permutations(range(n)))
    dv = [d.matching_weight(p) for p in perms]
    wv = [W.matching_weight(p) for p in perms]
    for x in range(len(perms)):
        for y in range(len(perms)):
            if dv[x] > dv[y]:
                assert wv[x] > wv[y]


@pytest.mark.parametrize("seed", range(40))
def test_isolation_small(seed):
    rng = np.random.default_rng(1000 + seed)
    n = int(rng.integers(2, 6))
    N = int(rng.integers(max(3, n), 17))
    while True:
        inst = random_instance(n, N, rng)
        if has_collinear_triple(inst) is None:
            break
    ell = choose_ell(n, N, 1).ell
    assert len(_argmins(w_ell_assignment(inst, ell))) == 1


@pytest.mark.parametrize("seed", range(10))
def test_bit_budget(seed):
    rng = np.random.default_rng(seed)
    n, N = 4, 16
    inst = random_instance(n, N, rng)
    ell = choose_ell(n, N, Fraction(1, 100)).ell
    W = w_ell_assignment(inst, ell)
    with mpmath.workprec(200):
        bound = 2**ell * mpmath.sqrt(2) * N * (2 * n * N * N + 1) + 2 * N * N
    assert max(abs(v) for row in W.w for v in row) <= bound
