"""
Cube counting and reflection chains
===================================

Two combinatorial ingredients of the compactness argument.  Lattice cube
counts times r^(N-1) stay bounded for sets of finite perimeter and blow up
for fine checkerboards.  Reflection chains compare section overlaps by exact
counting.
"""

from nlphase.bounds_lab import reflection_chain_suite
from nlphase.experiments import census_scaling, rows_to_csv

print(rows_to_csv(census_scaling()))

report = reflection_chain_suite(trials=1000, seed=0)
print(f"reflection chains: {report.failures} failures in {len(report.trials)} trials")
worst = min(report.trials, key=lambda t: t.lhs - t.rhs)
print(f"tightest trial: lhs {worst.lhs:.4f}, rhs {worst.rhs:.4f}")
