import numpy as np
import pytest

from ergolab import cube
from ergolab.errors import InputError


def test_lexicographic_indexing():
    assert cube.vertex_bits(1, 3) == (0, 0, 1)
    assert cube.vertex_index((1, 0, 0)) == 4
    assert [str(v) for v in cube.vertices(2)] == ["00", "01", "10", "11"]
    assert cube.CubeVertex.parse("101").index == 5


def test_bit_matrix_and_weights():
    np.testing.assert_array_equal(cube.bit_matrix(2), [[0, 0], [0, 1], [1, 0], [1, 1]])
    np.testing.assert_array_equal(cube.popcounts(3), [0, 1, 1, 2, 1, 2, 2, 3])


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_isometry_group_order(k):
    isos = cube.all_cube_isometries(k)
    import math
    assert len({tuple(s) for s in isos}) == 2**k * math.factorial(k)
    assert all(cube.is_cube_isometry(s, k) for s in isos)


def test_non_isometry_detected():
    # swapping 00 and 01 only breaks adjacency with 11
    assert not cube.is_cube_isometry([1, 0, 2, 3], 2)


def test_swap_and_flip():
    np.testing.assert_array_equal(cube.cube_isometry(2, (1, 0)), [0, 2, 1, 3])
    np.testing.assert_array_equal(cube.cube_isometry(2, flips=(1, 0)), [2, 3, 0, 1])


def test_sides():
    np.testing.assert_array_equal(cube.side(2, 1, 1), [False, False, True, True])
    np.testing.assert_array_equal(cube.side(2, 2, 0), [True, False, True, False])
    with pytest.raises(InputError):
        cube.side(2, 3, 0)
