"""Orbits of the skew map and of the Heisenberg nilsystem.

Run: python demos/03_nilsystems.py [outdir]
"""
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from ergolab import nilmanifolds as nil

out = Path(sys.argv[1]) if len(sys.argv) > 1 else None

# Skew map T(x, y) = (x + a, y + 2x + a). With a rational the orbit is periodic
# and exact.
sk = nil.SkewSystem(Fraction(1, 4))
p = nil.SkewPoint(Fraction(0), Fraction(0))
for _ in range(4):
    print(p)
    p = sk.step(p)

# With the golden rotation, e(y) averages out slowly (a quadratic Weyl sum).
golden = nil.SkewSystem(nil.GOLDEN, declared_ergodic=True)
s = nil.birkhoff_series(golden, nil.SkewPoint(0.3, 0.7), nil.e_y, 10**6)
for N, v in zip(s.checkpoints[-5:], s.values[-5:]):
    print(f"N={N:>8}  |A_N|={abs(v):.5f}")

# Heisenberg group: noncommutative, but 2-step nilpotent.
H = nil.HeisenbergElement
g, h = H(1, 0, 0), H(0, 1, 0)
print("gh =", nil.heisenberg_mul(g, h), " hg =", nil.heisenberg_mul(h, g))
print("[g, h] =", nil.commutator(g, h))

heis = nil.HeisenbergSystem(H(nil.GOLDEN, np.sqrt(2) - 1, 0.1), declared_ergodic=True)
pts = heis.orbit(nil.HeisenbergPoint(0, 0, 0), 200_000)
print("mean of e(z) along the orbit:", abs(nil.e_z(*pts.T).mean()))

if out is not None:
    out.mkdir(parents=True, exist_ok=True)
    nil.orbit_to_csv(pts[:10_000], out / "heisenberg_orbit.csv")
    nil.series_to_csv(s, out / "skew_e_y_series.csv")
    print("wrote", out)
