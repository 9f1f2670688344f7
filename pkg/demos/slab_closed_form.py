"""
Two parallel layers: closed form against quadrature
===================================================

The pair energy of the layers (-l/2, -d/2) and (d/2, l/2), per unit of
lateral area, has a logarithmic closed form.  Two constants are in
circulation for it; a graded midpoint quadrature decides between them.
"""

from nlphase.kernel_exact import PRINTED, SlabPairConfig, slab_energy_per_area, slab_H_profile
from nlphase.kernel_quad import QuadSpec, cylinder_slab_oracle

# The R = 1 cylinder over the upper layer has unit base, so its energy
# against the (truncated) lower layer is a per-area value.
spec = QuadSpec(resolution=64)
print(f"{'d':>5} {'adjudicated':>12} {'printed':>10} {'oracle':>10} {'tail':>9}")
for d in (0.4, 0.2, 0.1):
    cfg = SlabPairConfig(d, 1.0, 2)
    est = cylinder_slab_oracle(1.0, cfg, spec)
    print(f"{d:5.2f} {slab_energy_per_area(cfg):12.6f} {slab_energy_per_area(cfg, PRINTED):10.6f} "
          f"{est.value:10.6f} {est.tail:9.1e}")

# The antipodal profile behind the closed form is even and vanishes at (l-d)/4.
cfg = SlabPairConfig(0.2, 1.0, 2)
for a in (0.0, 0.1, 0.19, cfg.fold):
    print(f"H({a:.3f}) = {slab_H_profile(cfg, a):.5f}")
