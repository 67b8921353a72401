"""
Two matchings that almost weigh the same
========================================

Points on two vertical lines far apart produce ``n!`` distinct matching
weights squeezed into a window of width about ``n/2``, so two of them are
very close.  Unrolling their alternating cycle into a zig-zag keeps that
gap while making the lighter one the global minimum.
"""

from ewpm.lowerbound import close_pair, construction1, unroll, verify_theorem1

for n in (2, 3, 4):
    c1 = construction1(n)
    pair = close_pair(c1)
    lo, hi = pair.gap_bracket
    print(f"n={n}: closest pair {pair.m1} / {pair.m2}, gap in [{float(lo):.3e}, {float(hi):.3e}]")

c1 = construction1(3)
u = unroll(c1, close_pair(c1))
print("zig-zag heights:", u.y_trace)
print("points:", u.instance.points)

for n in (3, 4):
    rep = verify_theorem1(n)
    d = rep.details
    print(f"n={n}: unique minimum={rep.passed}, runner-up gap <= {float(d['gap_upper']):.3e}, "
          f"bound {d['bound']}, extent {d['extent']}")
