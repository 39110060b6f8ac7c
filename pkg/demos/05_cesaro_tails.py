"""Cauchy tails of linear multiple averages along a skew-map orbit.

The tail at checkpoint N_j is max |A_M - A_{N_j}| over N_{j-1} < M <= N_j.
With e(x) in every slot (a Kronecker observable) the tails shrink steadily.
With e(y) the products are quadratic Weyl sums: the averages still converge,
but the tail between doubling checkpoints is driven by fluctuations and is
usually not monotone.

Run: python demos/05_cesaro_tails.py
"""
import numpy as np

from ergolab import nilmanifolds as nil
from ergolab.averages import OrbitSource, linear_average
from ergolab.verify import cauchy_tail_decreasing

system = nil.SkewSystem(nil.GOLDEN, declared_ergodic=True)
rng = np.random.default_rng(12)
starts = [nil.SkewPoint(*rng.random(2)) for _ in range(10)]

for name, obs in (("e(x)", nil.e_x), ("e(y)", nil.e_y)):
    for k in (2, 3):
        hits = 0
        for p in starts:
            s = linear_average(OrbitSource(system, p), [obs] * k, 2**20)
            hits += cauchy_tail_decreasing(s, 14, 20)
        print(f"{name}, k={k}: tail decreasing over 2^14..2^20 for {hits}/{len(starts)} starts")

s = linear_average(OrbitSource(system, starts[0]), [nil.e_x] * 2, 2**20)
for N, t in zip(s.checkpoints[-7:], s.cauchy_tail[-7:]):
    print(f"N={N:>8}  tail={t:.3e}")
