import numpy as np
import pytest
from hypothesis import given, strategies as st

from ergolab import harmonic as hm
from ergolab.errors import InputError
from strategies import bounded_functions


class TestMean:
    def test_constant(self):
        assert hm.mean(hm.GroupFunction.constant(8)) == 1

    def test_alternating(self):
        assert hm.mean(hm.GroupFunction([1, -1])) == 0

    def test_indicator(self):
        assert hm.mean(hm.GroupFunction.indicator(4, [0, 2])) == 0.5


class TestShift:
    def test_zero_shift(self, rng):
        f = hm.GroupFunction.random(7, rng)
        assert hm.shift(f, 0) == f

    def test_rotates_left(self):
        f = hm.GroupFunction([1, 2, 3])
        np.testing.assert_array_equal(hm.shift(f, 1).values, [2, 3, 1])

    @given(bounded_functions(), st.integers(-50, 50), st.integers(-50, 50))
    def test_group_action(self, f, s, t):
        assert hm.shift(hm.shift(f, s), t) == hm.shift(f, s + t)

    @given(bounded_functions(), st.integers(-50, 50))
    def test_preserves_mean(self, f, t):
        assert abs(hm.mean(hm.shift(f, t)) - hm.mean(f)) <= 1e-12


class TestFourier:
    def test_constant_is_delta_at_zero(self):
        c = hm.fourier_transform(hm.GroupFunction.constant(8)).coefficients
        np.testing.assert_allclose(c, np.eye(8)[0], atol=1e-15)

    @pytest.mark.parametrize("N", [4, 5, 16])
    def test_character_is_delta(self, N):
        c = hm.fourier_transform(hm.GroupFunction.character(N, 3)).coefficients
        np.testing.assert_allclose(c, np.eye(N)[3 % N], atol=1e-14)

    def test_naive_matches_fft(self, rng):
        for N in (1, 2, 7, 16, 33):
            f = hm.GroupFunction.random(N, rng)
            np.testing.assert_allclose(hm.fourier_transform(f).coefficients,
                                       hm.fourier_transform(f, naive=True).coefficients, atol=1e-13)

    def test_parseval_n16(self, rng):
        f = hm.GroupFunction.random(16, rng)
        lhs = np.sum(np.abs(hm.fourier_transform(f, naive=True).coefficients) ** 2)
        assert lhs == pytest.approx(np.mean(np.abs(f.values) ** 2), abs=1e-14)

    @given(bounded_functions(max_N=64))
    def test_inversion(self, f):
        back = hm.inverse_fourier_transform(hm.fourier_transform(f))
        np.testing.assert_allclose(back.values, f.values, atol=1e-12)


class TestPointwise:
    def test_identity(self, rng):
        f = hm.GroupFunction.random(6, rng)
        assert hm.pointwise_multiply(f, hm.GroupFunction.constant(6)) == f

    def test_conjugate_involution(self, rng):
        f = hm.GroupFunction.random(6, rng)
        assert hm.conjugate(hm.conjugate(f)) == f

    def test_modulus(self, rng):
        f = hm.GroupFunction.random(6, rng)
        np.testing.assert_allclose(hm.pointwise_multiply(f, hm.conjugate(f)).values, np.abs(f.values) ** 2)

    def test_group_mismatch(self):
        with pytest.raises(InputError):
            hm.pointwise_multiply(hm.GroupFunction.constant(3), hm.GroupFunction.constant(4))


class TestValues:
    def test_immutable(self):
        f = hm.GroupFunction([1, 2])
        with pytest.raises(ValueError):
            f.values[0] = 5

    def test_empty_group_rejected(self):
        with pytest.raises(InputError):
            hm.GroupFunction([])


class TestCSV:
    def test_round_trip_is_exact(self, rng, tmp_path):
        f = hm.GroupFunction.random(9, rng)
        path = tmp_path / "f.csv"
        hm.group_function_to_csv(f, path)
        assert path.read_text().splitlines()[0] == "index,re,im"
        assert hm.group_function_from_csv(path) == f

    def test_bad_row_is_named(self):
        with pytest.raises(InputError, match="row 3"):
            hm.group_function_from_csv("index,re,im\n0,1,0\n1,x,0\n")

    def test_index_order_enforced(self):
        with pytest.raises(InputError):
            hm.group_function_from_csv("index,re,im\n1,1,0\n0,1,0\n")
