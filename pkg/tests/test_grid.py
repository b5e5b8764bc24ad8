import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamspec.grid import (
    Grid1D,
    WeightedNorm,
    grid_with_spacing,
    inner_product,
    make_grid,
    second_derivative,
    weighted_norm,
    weighted_norm_stacked,
)


def test_points_are_symmetric_and_pinned():
    g = make_grid(40, 801)
    x = g.points
    assert x[0] == -40.0 and x[-1] == 40.0
    np.testing.assert_array_equal(x, -x[::-1])
    assert x[g.center] == 0.0
    assert g.spacing == pytest.approx(0.1)


def test_points_are_read_only():
    g = make_grid(1, 5)
    with pytest.raises(ValueError):
        g.points[0] = 3.0


@pytest.mark.parametrize("L, N", [(0.0, 11), (-1.0, 11), (np.inf, 11), (1.0, 2), (1.0, 4.5)])
def test_rejects_bad_parameters(L, N):
    with pytest.raises(ValueError):
        Grid1D(L, N)


def test_grid_with_spacing():
    g = grid_with_spacing(40, 0.05)
    assert g.n_points == 1601
    assert g.spacing == pytest.approx(0.05)


def test_trapezoid_integrates_gaussian():
    g = make_grid(10, 401)
    assert inner_product(np.exp(-g.points**2 / 2), np.exp(-g.points**2 / 2), g).real == pytest.approx(np.sqrt(np.pi), rel=1e-12)


def test_inner_product_conjugates_second_argument():
    g = make_grid(1, 3)
    u = np.array([1j, 0, 0])
    # end weights are h/2 = 1/2
    assert inner_product(u, u, g) == pytest.approx(0.5)
    assert inner_product(u, np.ones(3), g) == pytest.approx(0.5j)


def test_inner_product_shape_mismatch():
    g = make_grid(1, 5)
    with pytest.raises(ValueError):
        inner_product(np.ones(5), np.ones(4), g)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.floats(-3, 3), st.floats(-3, 3))
def test_inner_product_sesquilinear(seed, a, b):
    g = make_grid(3, 31)
    r = np.random.default_rng(seed)
    u, v, w = (r.standard_normal(31) + 1j * r.standard_normal(31) for _ in range(3))
    lhs = inner_product(a * u + b * v, w, g)
    assert lhs == pytest.approx(a * inner_product(u, w, g) + b * inner_product(v, w, g), abs=1e-9)
    assert inner_product(u, w, g) == pytest.approx(np.conj(inner_product(w, u, g)))


def test_weighted_norm_of_constant():
    # int (1 + x^2)^{-2} dx = pi / 2 on the real line
    g = make_grid(400, 80001)
    assert weighted_norm(np.ones(g.n_points), 2, g) ** 2 == pytest.approx(np.pi / 2, rel=1e-5)


def test_weighted_norm_s0_is_l2():
    g = make_grid(5, 51)
    u = np.sin(g.points)
    assert weighted_norm(u, 0, g) == pytest.approx(np.sqrt(inner_product(u, u, g).real))
    assert WeightedNorm.on(g, 0)(u, g) == pytest.approx(weighted_norm(u, 0, g))


def test_stacked_norm_is_pythagorean():
    g = make_grid(5, 51)
    u, v = np.cos(g.points), np.exp(-g.points**2)
    expected = np.hypot(weighted_norm(u, 1, g), weighted_norm(v, 1, g))
    assert weighted_norm_stacked(np.concatenate([u, v]), 1, g) == pytest.approx(expected)


def test_second_derivative_second_order():
    errs = []
    for n in (101, 201, 401):
        g = make_grid(np.pi, n)
        D = second_derivative(g)
        u = np.sin(g.points)  # vanishes at both ends, so Dirichlet truncation is exact
        errs.append(np.max(np.abs((D @ u)[1:-1] - u[1:-1])))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 1.95)


def test_second_derivative_is_positive_definite():
    g = make_grid(1, 21)
    lam = np.linalg.eigvalsh(second_derivative(g).matrix)
    assert lam.min() > 0
