import math

import numpy as np
import pytest

from toricforms.lvalues import eigen_data, nonvanishing_count
from toricforms.manin import build_space


def test_level_11_newform():
    (e,) = eigen_data(11)
    # a_p of the elliptic curve 11a: y^2 + y = x^3 - x^2 - 10x - 20
    assert np.allclose(e.coefficients[[1, 2, 4, 6, 10, 12]].real, [-2, -1, 1, -2, 1, 4], atol=1e-9)
    assert abs(e.l_value - 0.2538418608559106) < 1e-9
    assert e.fe_error < 1e-10


def test_point_counts_give_eigenvalues():
    # a_p = p + 1 - #E(F_p) for 11a, counted directly
    (e,) = eigen_data(11)
    for p in (2, 3, 5, 7, 13, 17):
        pts = 1 + sum(1 for x in range(p) for y in range(p) if (y * y + y - (x**3 - x * x - 10 * x - 20)) % p == 0)
        assert abs(e.coefficients[p - 1].real - (p + 1 - pts)) < 1e-9


@pytest.mark.parametrize("l", [11, 13, 14, 15, 16, 17])
def test_nonvanishing_counts(l):
    data = eigen_data(l)
    assert len(data) == build_space(l, "S+").dim
    for e in data:
        assert e.fe_error < 1e-8
        assert abs(e.coefficients[0] - 1) < 1e-9
        # Ramanujan bound on a_p for p not dividing l
        for p in (2, 3, 5, 7):
            if l % p:
                assert abs(e.coefficients[p - 1]) <= 2 * math.sqrt(p) + 1e-8
    assert nonvanishing_count(l) == len(data)


def test_empty_space():
    assert eigen_data(7) == []
    assert nonvanishing_count(7) == 0
