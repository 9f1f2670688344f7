"""
Triangle strip sums
===================

Summing slab energies over a stack of thinning strips gives a series that is
nondecreasing in the number of strips and stays under 2 omega (R - 2R ln(l/2)).
"""

from nlphase.kernel_exact import triangle_strip_bound, triangle_strip_limit, triangle_strip_sum

R, l = 1.0, 1.0
for H in (1, 10, 100, 1000, 10_000):
    print(f"H = {H:6d}: {triangle_strip_sum(R, l, H):.6f}")
print(f"limit {triangle_strip_limit(R, l):.6f}, bound {triangle_strip_bound(R, l):.6f}")
