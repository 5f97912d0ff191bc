import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wentzell.errors import ContractError
from wentzell.mesh import (FieldPair, NormSuite, apply_boundary_laplacian, apply_bulk_laplacian,
                           boundary_forward_difference, boundary_inner, build_grid,
                           green_residual, norms, normal_derivative, poincare_constant)


def radial(grid, f):
    return np.repeat(f(grid.r)[:, None], grid.Ntheta, axis=1).astype(complex)


def random_field(grid, rng, vanish_outer=False):
    u = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    if vanish_outer:
        u[-1] = 0.0
    return u


def test_node_counts_and_spacing():
    g = build_grid(1, 2, 8, 16)
    assert g.shape == (9, 16)
    assert g.dr == pytest.approx(0.125)


def test_odd_angular_count_rejected():
    with pytest.raises(ContractError):
        build_grid(1, 2, 8, 15)


def test_bulk_weights_sum_to_annulus_area():
    g = build_grid(1, 2, 64, 128)
    assert g.weights.sum() == pytest.approx(3 * np.pi, rel=1e-3)


def test_laplacian_of_r_squared_is_exact():
    g = build_grid(1, 2, 12, 24)
    lap = apply_bulk_laplacian(g, radial(g, lambda r: r**2))
    np.testing.assert_allclose(lap[1:-1], 4.0, atol=1e-10)


def test_laplacian_of_log_r_converges_at_second_order():
    errs = []
    for n in (16, 32, 64):
        g = build_grid(1, 2, n, 16)
        errs.append(np.max(np.abs(apply_bulk_laplacian(g, radial(g, np.log))[1:-1])))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 1.8)


def test_angular_symbol_of_laplacian():
    g = build_grid(1, 2, 8, 64)
    u = np.exp(3j * g.theta)[None, :] * np.ones((g.Nr + 1, 1))
    lap = apply_bulk_laplacian(g, u)
    symbol = (2 - 2 * np.cos(3 * g.dtheta)) / g.dtheta**2
    r = g.r[1:-1, None]
    np.testing.assert_allclose(lap[1:-1], -symbol / r**2 * u[1:-1], atol=1e-12)
    assert symbol == pytest.approx(9, rel=1e-2)


def test_boundary_laplacian_constant_and_modes():
    g = build_grid(1, 2, 8, 32)
    assert np.max(np.abs(apply_boundary_laplacian(g, np.full(32, 2.5 + 1j)))) == 0.0
    for m in (1, 4, 9):
        e = np.exp(1j * m * g.theta)
        lam = -(2 - 2 * np.cos(m * g.dtheta)) / (g.R1 * g.dtheta) ** 2
        np.testing.assert_allclose(apply_boundary_laplacian(g, e), lam * e, atol=1e-11)


def test_boundary_summation_by_parts():
    g = build_grid(1, 2, 8, 32)
    rng = np.random.default_rng(1)
    for _ in range(10):
        u = rng.normal(size=32) + 1j * rng.normal(size=32)
        v = rng.normal(size=32) + 1j * rng.normal(size=32)
        lhs = boundary_inner(g, apply_boundary_laplacian(g, u), v) + boundary_inner(
            g, boundary_forward_difference(g, u), boundary_forward_difference(g, v))
        assert abs(lhs) <= 1e-13 * (abs(boundary_inner(g, u, v)) / g.dtheta**2 + 1)


def test_normal_derivative_signs_and_exactness():
    g = build_grid(1, 2, 10, 16)
    np.testing.assert_allclose(normal_derivative(g, radial(g, lambda r: r), "inner"), -1.0,
                               atol=1e-12)
    np.testing.assert_allclose(normal_derivative(g, radial(g, lambda r: r**2), "outer"), 4.0,
                               atol=1e-10)
    with pytest.raises(ContractError):
        normal_derivative(g, radial(g, lambda r: r), "middle")


@settings(max_examples=25, deadline=None)
@given(st.integers(8, 14), st.sampled_from([16, 24, 32]), st.integers(0, 2**31 - 1))
def test_green_identity_holds_to_rounding(nr, nt, seed):
    g = build_grid(1, 2.5, nr, nt)
    rng = np.random.default_rng(seed)
    assert green_residual(g, random_field(g, rng), random_field(g, rng)) <= 1e-12


def test_zero_pair_norms():
    g = build_grid(1, 2, 8, 16)
    assert norms(NormSuite(g), FieldPair.zeros(g)) == (0.0, 0.0, 0.0)


def test_dual_norm_cauchy_schwarz():
    g = build_grid(1, 2, 8, 16)
    suite = NormSuite(g)
    rng = np.random.default_rng(7)
    for _ in range(50):
        f = random_field(g, rng, True)
        v = random_field(g, rng, True)
        assert abs(suite.h_inner(f, v)) <= suite.v_dual_norm(f) * suite.v_norm(v) * (1 + 1e-12)


def test_riesz_map_represents_h_pairing():
    g = build_grid(1, 2, 8, 16)
    suite = NormSuite(g)
    rng = np.random.default_rng(3)
    f, v = random_field(g, rng, True), random_field(g, rng, True)
    r = suite.riesz(f)
    assert suite.v_inner(r, v) == pytest.approx(suite.h_inner(f, v), rel=1e-12)
    np.testing.assert_allclose(suite.riesz_image(r), f[:-1].ravel(), atol=1e-10)


def test_v_norm_requires_dirichlet_trace():
    g = build_grid(1, 2, 8, 16)
    with pytest.raises(ContractError):
        NormSuite(g).v_norm(np.ones(g.shape))


def test_modes_are_mass_orthonormal_and_sorted():
    g = build_grid(1, 2, 8, 16)
    suite = NormSuite(g)
    lam, E = suite.modes(10)
    assert np.all(np.diff(lam) >= -1e-12)
    np.testing.assert_allclose(E.T @ (suite.mass[:, None] * E), np.eye(10), atol=1e-10)


def test_poincare_bound_holds():
    g = build_grid(1, 2, 8, 16)
    C = poincare_constant(g)
    suite = NormSuite(g)
    rng = np.random.default_rng(5)
    for _ in range(10):
        u = random_field(g, rng, True)
        x = u[:-1].ravel()
        grad2 = np.vdot(x, suite.bulk_stiffness @ x).real
        assert suite.h_norm(u) ** 2 <= C * grad2 * (1 + 1e-10)


def test_trace_identification():
    g = build_grid(1, 2, 8, 16)
    u = np.ones(g.shape)
    with pytest.raises(ContractError):
        FieldPair.from_parts(u, np.zeros(16))
    assert np.all(FieldPair.from_parts(u, np.ones(16)).boundary == 1)
