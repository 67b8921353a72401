"""
Near-minimum matchings never cross
==================================

Collect every perfect matching within ``1/(8N^4)`` of the optimum.  Their
union has no crossing edges, and on that planar union the tie-break weight
picks a single matching.  A square gives a two-matching union.
"""

import numpy as np

from ewpm import PointSetInstance
from ewpm.experiments import random_perturbed
from ewpm.verification import check_planarity, check_wtv_uniqueness, near_min_union

square = PointSetInstance(((0, 0), (1, 1)), ((1, 0), (0, 1)), 1)
u = near_min_union(square)
print("square: near-minimum matchings", [str(m) for m in u.matchings])
print("  planar:", check_planarity(u).passed,
      " tie-break winner:", check_wtv_uniqueness(u).details["matching"])

rng = np.random.default_rng(0)
sizes = []
for _ in range(20):
    inst = random_perturbed(int(rng.integers(2, 6)), 8, rng)
    u = near_min_union(inst)
    assert check_planarity(u).passed and check_wtv_uniqueness(u).passed
    sizes.append(len(u.edges))
print("20 perturbed instances, union edge counts:", sizes)
