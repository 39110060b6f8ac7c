"""Cube measures and cube seminorms on a cyclic rotation.

Run: python demos/04_cube_measures.py
"""
import numpy as np

from ergolab import cube_measures as cm
from ergolab.cube import all_cube_isometries
from ergolab.gowers import gowers_norm_closed
from ergolab.harmonic import GroupFunction

rng = np.random.default_rng(4)
Z7 = cm.FiniteSystem.rotation(7)

# mu^[k] is built by relatively independent self-joinings. On Z/7 it is the
# uniform measure on the cubes (x + eps.t)_eps, 7^(k+1) of them.
for k in range(4):
    mu = cm.build_cube_measure(Z7, k)
    print(f"k={k}: support {mu.support_size}, distinct weights {sorted({float(w) for w in np.round(mu.weights, 12)})}")

# The seminorm of f computed from mu^[k] is the Gowers norm of f.
f = GroupFunction.random(7, rng)
for k in (1, 2, 3):
    print(k, cm.hk_seminorm(Z7, f.values, k), cm.hk_seminorm_recursive(Z7, f.values, k),
          gowers_norm_closed(f, k))

# mu^[3] is invariant under all 48 isometries of the 3-cube and all side maps.
mu3 = cm.build_cube_measure(cm.FiniteSystem.rotation(5), 3)
print("isometries preserving mu^[3]:",
      sum(cm.apply_cube_symmetry(mu3, s).equals(mu3) for s in all_cube_isometries(3)))
print("side maps preserving mu^[3]:",
      sum(cm.apply_side_transformation(mu3, i, b).equals(mu3) for i in (1, 2, 3) for b in (0, 1)))

# Three routes to the mu^[2] integral.
fs = [GroupFunction.random(7, rng).values for _ in range(4)]
print(cm.mu2_explicit(Z7, *fs), cm.mu2_via_mus(Z7, *fs), cm.build_cube_measure(Z7, 2).integrate(fs))
