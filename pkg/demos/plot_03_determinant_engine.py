"""
Reading a matching off determinant valuations
=============================================

Replace each weight ``w`` by ``2^w``.  If the minimum matching is unique,
the power of two dividing the determinant equals its weight, and an edge
belongs to it exactly when its minor has the matching valuation.
"""

import numpy as np

from ewpm import brute_force_min, det_v2, hungarian_min, mvv_build_matrix, mvv_min
from ewpm.experiments import random_isolating_table

w = random_isolating_table(4, np.random.default_rng(1))
print("weights:\n", np.array(w.w))

D = mvv_build_matrix(w)
v, odd = det_v2(D)
print("v2(det) =", v)

r = mvv_min(w)
print("minor valuations:")
for (i, j), val in sorted(r.certificates.items()):
    mark = "*" if val + w.w[i][j] == v else " "
    print(f"  {mark} edge ({i},{j}): v2(minor) = {val}")

print("mvv      ", r.matching, r.total_weight)
print("hungarian", hungarian_min(w).matching)
print("brute    ", brute_force_min(w).matching)
