import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ergolab import progressions as pg
from ergolab.errors import InputError
from ergolab.gowers import gowers_norm_closed
from ergolab.harmonic import GroupFunction
from strategies import function_lists


def one(N):
    return GroupFunction.constant(N)


class TestForm:
    @pytest.mark.parametrize("ell", [2, 3, 5])
    def test_constants(self, ell):
        assert pg.ap_form([one(7)] * ell) == pytest.approx(1)

    def test_point_indicator_z5(self):
        f = GroupFunction.indicator(5, [0])
        assert pg.ap_form([f] * 3) == pytest.approx(1 / 25)

    def test_even_indicator_z4(self):
        f = GroupFunction.indicator(4, [0, 2])
        assert pg.ap_form([f] * 3) == pytest.approx(1 / 4)

    def test_fft3_constants_and_character(self):
        assert pg.ap_form_fft3(one(9), one(9), one(9)) == pytest.approx(1)
        chi = GroupFunction.character(9, 2)
        assert abs(pg.ap_form_fft3(chi, one(9), one(9))) < 1e-14

    @given(function_lists(3, max_N=64))
    def test_fft3_matches_direct(self, fs):
        assert pg.ap_form_fft3(*fs) == pytest.approx(pg.ap_form(fs), abs=1e-9)

    def test_fft3_large_n(self, rng):
        fs = [GroupFunction.random(512, rng) for _ in range(3)]
        assert pg.ap_form_fft3(*fs) == pytest.approx(pg.ap_form(fs), abs=1e-9)

    def test_mixed_groups_rejected(self):
        with pytest.raises(InputError):
            pg.ap_form([one(3), one(4), one(3)])


class TestCounts:
    @pytest.mark.parametrize("ell", [2, 3, 4])
    def test_full_set(self, ell):
        rep = pg.count_aps(range(7), ell, 7)
        assert rep.nondegenerate_count == 7 * 6

    @pytest.mark.parametrize("N,ell", [(5, 3), (7, 4), (11, 2)])
    def test_singleton_prime(self, N, ell):
        assert pg.count_aps([0], ell, N).nondegenerate_count == 0

    def test_even_pair_z4(self):
        rep = pg.count_aps([0, 2], 3, 4)
        assert (rep.nondegenerate_count, rep.inclusive_count) == (2, 4)
        assert rep.lambda_value == pytest.approx(0.25)

    def test_interval_count_excludes_wraparound(self):
        # {0, 4, 8} in Z/32: 0,4,8 is a genuine progression; 8,0,24 style wraps are not
        rep = pg.count_aps([0, 4, 8], 3, 32)
        assert rep.interval_count == 1
        assert rep.nondegenerate_count == 2

    @given(st.integers(2, 30), st.integers(2, 5), st.data())
    def test_inclusive_is_n2_lambda(self, N, ell, data):
        A = data.draw(st.sets(st.integers(0, N - 1), min_size=1))
        rep = pg.count_aps(A, ell, N)
        assert round(rep.lambda_value * N * N) == rep.inclusive_count
        assert rep.inclusive_count - rep.nondegenerate_count == len(A)

    def test_json_round_trip(self):
        rep = pg.count_aps([1, 3, 5, 6], 3, 11)
        again = pg.APReport.from_json(rep.to_json())
        assert again == rep
        keys = set(json.loads(rep.to_json()))
        assert {"N", "ell", "set_size", "nondegenerate_count", "inclusive_count", "lambda_value"} <= keys


class TestVonNeumann:
    def test_constants_equality(self):
        assert pg.von_neumann_gap([one(8)] * 3) == pytest.approx(0, abs=1e-15)

    def test_random_signs_z16(self, rng):
        for _ in range(50):
            fs = [GroupFunction.random(16, rng, "sign") for _ in range(3)]
            assert pg.von_neumann_gap(fs) >= -1e-9

    def test_character_slot(self):
        chi = GroupFunction.character(9, 1)
        assert abs(pg.ap_form([chi, one(9), one(9)])) < 1e-14
        assert gowers_norm_closed(chi, 2) == pytest.approx(1)

    @pytest.mark.parametrize("N", [5, 7, 9, 15])
    def test_odd_order_holds(self, N, rng):
        for _ in range(30):
            fs = [GroupFunction.random(N, rng, "sign") for _ in range(3)]
            assert pg.von_neumann_gap(fs) >= -1e-9

    def test_even_order_counterexample(self):
        """The bound needs 2 to be invertible mod N; on Z/8 it fails.

        Documented known failure, kept so that a change in either side of the
        inequality is noticed.
        """
        f0 = GroupFunction([-1, -1, 1, 1, -1, -1, 1, 1])
        f1 = GroupFunction([-1, 1, -1, 1, -1, 1, -1, 1])
        f2 = GroupFunction([-1, 1, 1, -1, -1, 1, 1, -1])
        assert abs(pg.ap_form([f0, f1, f2])) == pytest.approx(1)
        assert min(gowers_norm_closed(f, 2) for f in (f0, f1, f2)) == pytest.approx(0.8408964, abs=1e-6)
        assert pg.von_neumann_gap([f0, f1, f2]) == pytest.approx(0.8408964 - 1, abs=1e-6)

    def test_unbounded_rejected(self):
        with pytest.raises(InputError):
            pg.von_neumann_gap([GroupFunction.constant(4, 2.0), one(4), one(4)])


class TestSplit:
    def test_half_indicator(self):
        m, g = pg.mean_uniform_split(GroupFunction.indicator(6, [0, 1, 2]))
        assert m == 0.5
        np.testing.assert_allclose(np.abs(g.values), 0.5)

    def test_constant(self):
        m, g = pg.mean_uniform_split(GroupFunction.constant(5, 0.3))
        assert m == pytest.approx(0.3) and np.allclose(g.values, 0)

    def test_multilinear_expansion(self, rng):
        f = GroupFunction.indicator(13, rng.choice(13, 6, replace=False))
        m, g = pg.mean_uniform_split(f)
        parts = [GroupFunction.constant(13, m), g]
        total = sum(pg.ap_form([parts[a], parts[b], parts[c]])
                    for a in (0, 1) for b in (0, 1) for c in (0, 1))
        assert total == pytest.approx(pg.ap_form([f] * 3), abs=1e-9)


def test_empirical_min_density_is_labelled(rng):
    out = pg.empirical_min_density_form(17, 3, 0.4, 5, rng)
    assert out["normative"] is False
    assert 0 <= out["min_lambda"] <= 1
