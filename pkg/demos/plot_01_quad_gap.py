"""
Crossing diagonals on a small grid
==================================

Two segments that properly cross are always longer, together, than a pair
of opposite sides of the quadrilateral they span.  On an integer grid the
excess never drops below ``1/(4 N^4)``.  Here we scan every crossing pair
on a few grids and compare the smallest excess with that floor.
"""

from fractions import Fraction

from ewpm import quad_diagonal_gap
from ewpm.verification import gap_scan

# the unit square: diagonals 2*sqrt(2), sides 2
lo, hi = quad_diagonal_gap((0, 0), (1, 1), (0, 1), (1, 0), bits=64)
print("unit square gap in", float(lo), float(hi))

for N in (1, 2, 4, 6):
    rep = gap_scan(N, bits=128)
    d = rep.details
    print(f"N={N}: min gap {float(d['min_gap_lower']):.6f}  floor {float(d['bound']):.2e}  "
          f"squared lengths {d['squared_lengths']}  pass={rep.passed}")

# the floor is loose by orders of magnitude at these sizes
rep = gap_scan(6)
print("slack factor at N=6:", float(rep.details["min_gap_lower"] / Fraction(1, 4 * 6**4)))
