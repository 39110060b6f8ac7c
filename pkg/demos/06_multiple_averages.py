"""Full-period multiple averages on Z/N and the seminorm bounds.

Run: python demos/06_multiple_averages.py
"""
import numpy as np

from ergolab import averages as av
from ergolab import cube_measures as cm
from ergolab.gowers import gowers_norm_closed
from ergolab.harmonic import GroupFunction

rng = np.random.default_rng(6)
Z16 = cm.FiniteSystem.rotation(16)

# For a periodic system, the average over one full period is the limit.
fs = [GroupFunction.random(16, rng, "sign").values for _ in range(3)]
series = av.linear_average(Z16, fs, 64)
print(av.series_to_csv(series))
print("bound slack, random signs on Z/16:", av.semiprog_bound_check(Z16, fs))

# Cubic recurrence: the average measure of the cube intersections is at
# least mu(A)^4 (k = 2).
print("A={0,2} in Z/4:", av.cubic_recurrence_value(cm.FiniteSystem.rotation(4), [0, 2], 2), ">= 1/16")

# Polynomial averages: n and n^2 together.
Z13 = cm.FiniteSystem.rotation(13)
chi = GroupFunction.character(13, 1).values
s = av.polynomial_average(Z13, [chi, chi], av.FURSTENBERG_WEISS, 13)
print("|average of chi(x+n) chi(x+n^2)| on Z/13:", np.abs(s.final).max())

# The first slot of the linear bound (multiplier 1) fails on Z/4 with k = 3.
f1 = np.array([-1, 1, -1, -1], dtype=complex)
f2 = np.array([1, -1, -1, -1], dtype=complex)
Z4 = cm.FiniteSystem.rotation(4)
avg = av.linear_average(Z4, [f1, f2, f1], 4).final
print("Z/4: ||average|| =", Z4.l2_norm(avg), " but 1 * ||f1||_3 =", gowers_norm_closed(GroupFunction(f1), 3))
