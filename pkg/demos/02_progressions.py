"""Counting arithmetic progressions and the von Neumann bound.

Run: python demos/02_progressions.py
"""
import numpy as np

from ergolab import GroupFunction, ap_form, ap_form_fft3, count_aps, von_neumann_gap
from ergolab.gowers import gowers_norm_closed

rng = np.random.default_rng(2)

# Exhaustive counts. Cyclic progressions wrap around; interval_count keeps
# only those inside {0, ..., N-1}.
print(count_aps([0, 4, 8], 3, 32).to_json())

# Lambda_3 by direct summation and through the Fourier transform.
fs = [GroupFunction.random(101, rng) for _ in range(3)]
print("direct ", ap_form(fs))
print("Fourier", ap_form_fft3(*fs))

# For odd N the count is controlled by the smallest U^2 norm.
gaps = [von_neumann_gap([GroupFunction.random(15, rng, "sign") for _ in range(3)]) for _ in range(200)]
print("worst von Neumann gap on Z/15:", min(gaps))

# For even N the bound can fail, since y -> 2y is not invertible.
f0 = GroupFunction([-1, -1, 1, 1, -1, -1, 1, 1])
f1 = GroupFunction([-1, 1, -1, 1, -1, 1, -1, 1])
f2 = GroupFunction([-1, 1, 1, -1, -1, 1, 1, -1])
print("Z/8: |Lambda_3| =", abs(ap_form([f0, f1, f2])),
      " min U^2 =", min(gowers_norm_closed(f, 2) for f in (f0, f1, f2)))
