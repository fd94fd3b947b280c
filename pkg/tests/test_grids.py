import numpy as np
import pytest

from hank2a.grids import build_grid, liquid_grid


def test_degenerate_range_rejected():
    with pytest.raises(ValueError):
        build_grid(0.0, 0.0, 10)


def test_two_nodes_are_endpoints():
    assert np.allclose(build_grid(-1.5, 7.0, 2), [-1.5, 7.0])


def test_matches_double_exponential_formula():
    xmin, xmax, n = 0.0, 100.0, 90
    g = build_grid(xmin, xmax, n)
    u = np.linspace(0.0, np.log(1 + np.log(1 + xmax - xmin)), n)
    oracle = xmin + np.exp(np.exp(u) - 1.0) - 1.0
    assert np.allclose(g, oracle, atol=1e-12)
    assert np.all(np.diff(g) > 0)
    assert g[0] == xmin and g[-1] == xmax


def test_liquid_grid_contains_limit_and_zero():
    g = liquid_grid(-1.45, 600.0, 40)
    assert g[0] == -1.45
    assert 0.0 in g
    assert len(g) == 45
    i0 = int(np.where(g == 0.0)[0][0])
    # the cluster hugs zero: five extra nodes inside the base-gap neighborhood
    assert np.all(np.abs(g[i0 - 2: i0 + 4]) < 1.0)
    assert np.all(np.diff(g) > 0)


def test_liquid_grid_nonnegative_min():
    g = liquid_grid(0.0, 10.0, 20)
    assert g[0] == 0.0 and len(g) == 20
