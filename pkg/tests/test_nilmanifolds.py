import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ergolab import nilmanifolds as nil
from ergolab.errors import InputError

H = nil.HeisenbergElement
coord = st.floats(-10, 10, allow_nan=False)
elements = st.builds(H, coord, coord, coord)


def close(g, h, tol=1e-12):
    return all(abs(a - b) <= tol for a, b in zip(g.as_tuple(), h.as_tuple()))


class TestSkew:
    def test_fixed_point(self):
        assert nil.skew_step(nil.SkewPoint(0, 0), 0) == nil.SkewPoint(0, 0)

    def test_quarter_rotation(self):
        q = Fraction(1, 4)
        p = nil.skew_step(nil.SkewPoint(0, 0), q)
        assert (p.x, p.y) == (q, q)
        p = nil.skew_step(p, q)
        assert (p.x, p.y) == (Fraction(1, 2), 0)

    def test_vector_orbit_matches_steps(self):
        sysm = nil.SkewSystem(nil.GOLDEN)
        pts = sysm.orbit(nil.SkewPoint(0.1, 0.7), 5000)
        p = nil.SkewPoint(0.1, 0.7)
        for j in range(5000):
            d = np.abs(pts[j] - [p.x, p.y])
            assert np.all(np.minimum(d, 1 - d) < 1e-9)
            p = sysm.step(p)

    def test_rational_orbit_is_periodic(self):
        sysm = nil.SkewSystem(Fraction(1, 5))
        p0 = nil.SkewPoint(Fraction(0), Fraction(0))
        p = p0
        for _ in range(5):
            p = sysm.step(p)
        assert p == p0

    def test_ergodicity_is_declared_not_inferred(self):
        assert nil.SkewSystem(0.3).metadata()["declared_ergodic"] is None
        assert nil.SkewSystem(nil.GOLDEN, declared_ergodic=True).metadata()["declared_ergodic"] is True


class TestHeisenberg:
    def test_products(self):
        assert nil.heisenberg_mul(H(1, 0, 0), H(0, 1, 0)) == H(1, 1, 1)
        assert nil.heisenberg_mul(H(0, 1, 0), H(1, 0, 0)) == H(1, 1, 0)
        g = H(0.3, -2, 5)
        assert nil.heisenberg_mul(g, nil.IDENTITY) == g

    def test_inverses(self):
        assert nil.heisenberg_inverse(H(1, 0, 0)) == H(-1, 0, 0)
        assert nil.heisenberg_inverse(H(1, 1, 1)) == H(-1, -1, 0)
        assert nil.heisenberg_inverse(nil.IDENTITY) == nil.IDENTITY

    def test_commutator(self):
        assert nil.commutator(H(1, 0, 0), H(0, 1, 0)) == H(0, 0, 1)
        g = H(0.2, 0.9, -1.5)
        assert close(nil.commutator(g, g), nil.IDENTITY)

    @given(elements, elements, elements)
    def test_associative(self, g, h, k):
        lhs = nil.heisenberg_mul(nil.heisenberg_mul(g, h), k)
        rhs = nil.heisenberg_mul(g, nil.heisenberg_mul(h, k))
        assert close(lhs, rhs, 1e-10)

    @given(elements)
    def test_inverse_law(self, g):
        assert close(nil.heisenberg_mul(g, nil.heisenberg_inverse(g)), nil.IDENTITY, 1e-10)

    @given(elements, elements, elements)
    def test_two_step(self, g, h, k):
        c = nil.commutator(nil.commutator(g, h), k)
        assert close(c, nil.IDENTITY, 1e-10)

    def test_exact_with_fractions(self):
        g, h, k = H(Fraction(1, 3), Fraction(2, 7), Fraction(5, 2)), H(2, Fraction(-1, 5), 1), H(0, 3, Fraction(1, 9))
        assert nil.commutator(nil.commutator(g, h), k) == nil.IDENTITY
        assert nil.heisenberg_mul(nil.heisenberg_mul(g, h), k) == nil.heisenberg_mul(g, nil.heisenberg_mul(h, k))


class TestReduction:
    def test_reduced_is_fixed(self):
        assert nil.reduce_mod_lattice(H(0.5, 0.5, 0.5)) == nil.HeisenbergPoint(0.5, 0.5, 0.5)

    def test_x_shift(self):
        assert nil.reduce_mod_lattice(H(1.25, 0, 0)) == nil.HeisenbergPoint(0.25, 0, 0)

    @given(elements, st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6))
    def test_lattice_invariance(self, g, a, b, c):
        p = nil.reduce_mod_lattice(g)
        q = nil.reduce_mod_lattice(nil.lattice_translate(g, a, b, c))
        for u, v in zip((p.x, p.y, p.z), (q.x, q.y, q.z)):
            d = abs(u - v)
            assert min(d, 1 - d) <= 1e-9

    def test_exact_lattice_invariance(self):
        g = H(Fraction(7, 3), Fraction(-5, 4), Fraction(11, 6))
        p = nil.reduce_mod_lattice(g)
        for lam in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-2, 3, 5)]:
            assert nil.reduce_mod_lattice(nil.lattice_translate(g, *lam)) == p

    def test_domain_enforced(self):
        with pytest.raises(InputError):
            nil.HeisenbergPoint(1.0, 0, 0)

    def test_snap_near_one(self):
        assert nil.frac(1 - 1e-14) == 0


class TestNilStep:
    def test_identity_translation(self):
        p = nil.HeisenbergPoint(0.1, 0.2, 0.3)
        assert nil.nil_step(p, nil.IDENTITY) == p

    def test_central_translation_wraps(self):
        t = H(0, 0, Fraction(1, 2))
        p = nil.HeisenbergPoint(0, 0, 0)
        assert nil.nil_step(nil.nil_step(p, t), t) == p

    def test_vector_orbit_matches_steps(self):
        sysm = nil.HeisenbergSystem(H(nil.GOLDEN, math.sqrt(2) - 1, 0.3))
        p = nil.HeisenbergPoint(0.4, 0.9, 0.05)
        pts = sysm.orbit(p, 10_000)
        for j in range(10_000):
            d = np.abs(pts[j] - [p.x, p.y, p.z])
            assert np.all(np.minimum(d, 1 - d) < 1e-9), j
            p = sysm.step(p)


class TestBirkhoff:
    def test_constant(self):
        s = nil.birkhoff_series(nil.SkewSystem(nil.GOLDEN), nil.SkewPoint(0.3, 0.1), nil.OBSERVABLES["one"], 1000)
        np.testing.assert_allclose(s.values, 1)

    def test_fixed_point(self):
        s = nil.birkhoff_series(nil.SkewSystem(0.0), nil.SkewPoint(0, 0), nil.e_y, 4096)
        np.testing.assert_allclose(s.values, 1)
        assert np.all(s.cauchy_tail <= 1e-15)

    def test_golden_equidistribution(self):
        s = nil.birkhoff_series(nil.SkewSystem(nil.GOLDEN), nil.SkewPoint(0.2, 0.6), nil.e_y, 10**6)
        assert abs(s.final) <= 0.02

    def test_step_callable_matches_vector_path(self):
        sysm = nil.SkewSystem(nil.GOLDEN)
        start = nil.SkewPoint(0.2, 0.6)
        a = nil.birkhoff_series(sysm, start, nil.e_y, 300)
        b = nil.birkhoff_series(sysm.step, start, lambda p: nil.e_y(p.x, p.y), 300)
        np.testing.assert_allclose(a.values, b.values, atol=1e-9)

    def test_checkpoints(self):
        np.testing.assert_array_equal(nil.doubling_checkpoints(10), [1, 2, 4, 8, 10])
        np.testing.assert_array_equal(nil.doubling_checkpoints(8), [1, 2, 4, 8])


class TestCSV:
    def test_orbit_header(self):
        text = nil.orbit_to_csv(nil.SkewSystem(Fraction(1, 4)).orbit(nil.SkewPoint(0, 0), 3))
        assert text.splitlines() == ["n,x,y", "0,0,0", "1,0.25,0.25", "2,0.5,0"]

    def test_heisenberg_orbit_header(self):
        pts = nil.HeisenbergSystem(H(0.5, 0.25, 0)).orbit(nil.HeisenbergPoint(0, 0, 0), 2)
        assert nil.orbit_to_csv(pts).splitlines()[0] == "n,x,y,z"

    def test_series_round_trips(self):
        s = nil.birkhoff_series(nil.SkewSystem(nil.GOLDEN), nil.SkewPoint(0.2, 0.6), nil.e_y, 100)
        rows = nil.series_to_csv(s).splitlines()
        assert rows[0] == "N,re,im,abs"
        last = rows[-1].split(",")
        assert int(last[0]) == 100
        assert complex(float(last[1]), float(last[2])) == s.final
