"""
Descending the discrete energy
==============================

A random field on a 32 x 32 grid relaxes under gradient descent with an
Armijo line search.  The potential term pushes values into the wells and the
nonlocal term penalizes the jumps that remain.
"""

import numpy as np

from nlphase.functional import PhaseField, eval_F, minimize_F, sharp_sets
from nlphase.geometry import Box, Grid

grid = Grid.uniform(Box((0.0, 0.0), (1.0, 1.0)), 32)
rng = np.random.default_rng(5)
u0 = PhaseField(grid, rng.random(grid.counts))

eps = 0.5
print("initial:", eval_F(u0, eps))
res = minimize_F(u0, eps, max_iter=200)
print(f"accepted steps {res.accepted}, converged {res.converged}")
print("energies:", [round(e, 5) for e in res.energies[:: max(1, len(res.energies) // 8)]])
print("final:", eval_F(res.field, eps))

lower, upper = sharp_sets(res.field)
print(f"near alpha: {lower.measure:.3f}, near beta: {upper.measure:.3f}")
