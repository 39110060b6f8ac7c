"""Gowers norms on Z/NZ computed three ways.

Run: python demos/01_gowers_norms.py
"""
import numpy as np

from ergolab import GroupFunction, gowers_norm_closed, gowers_norm_recursive, u2_via_fourier

rng = np.random.default_rng(1)

# A random function with |f| <= 1 on Z/64: the recursive, closed and Fourier
# evaluations of U^2 agree to rounding.
f = GroupFunction.random(64, rng)
print("U^2 recursive", gowers_norm_recursive(f, 2))
print("U^2 closed   ", gowers_norm_closed(f, 2))
print("U^2 Fourier  ", u2_via_fourier(f))

# The norms increase with k.
print("U^1..U^4:", [round(gowers_norm_recursive(f, k), 6) for k in range(1, 5)])

# Indicator of a single point in Z/4: only x = t1 = t2 = 0 contributes,
# so U^2 = (1/64)^(1/4).
delta = GroupFunction.indicator(4, [0])
print("U^2(1_{0}) on Z/4 =", gowers_norm_closed(delta, 2), "vs", 64 ** -0.25)

# Characters have U^2 = 1: a single Fourier coefficient of modulus one.
print("U^2 of a character:", u2_via_fourier(GroupFunction.character(31, 5)))
