"""Carleman module tests.  Symbolic differentiation (sympy, evaluated in mpmath
at 40 digits) is the independent oracle for the operators and the conjugation."""
import logging

import mpmath
import numpy as np
import pytest
import sympy as sp

from wentzell.carleman import (BesselMode, BoundaryFrame, BoundaryObservation, BumpFunction,
                               CarlemanCoefficients, CarlemanQuadrature, InteriorObservation,
                               QuadratureResolution, RadialProfile, WeightedFunction, ZeroFunction,
                               boundary_operator, bulk_operator, carleman_sides, carleman_sweep,
                               conjugated_decomposition, default_family, empirical_constants,
                               make_test_function, schrodinger_operators)
from wentzell.errors import ContractError
from wentzell.geometry import CarlemanParams, ConvexBody, weight_eval
from wentzell.pde import make_preset
from wentzell.pde.io import read_csv

mpmath.mp.dps = 40
X, Y, Tt = sp.symbols("x y t", real=True)
OMEGA_ROT = 0.7  # rotation_drift default


def sym_wave(R2=2.0, k=(1.5, -0.7), omega=0.5):
    return (R2**2 - X**2 - Y**2) * sp.exp(sp.I * (k[0] * X + k[1] * Y)) * sp.exp(-sp.I * omega * Tt)


def sym_weight(s, lam, alpha, T):
    """``s phi`` for the unit circle body, where ``psi = |x|^2``."""
    g = Tt * (T - Tt)
    return s * (alpha - sp.exp(lam * (X**2 + Y**2))) / g


def sym_L(v, d):
    drift = (-OMEGA_ROT * Y, OMEGA_ROT * X)
    return (sp.I * sp.diff(v, Tt) + d * (sp.diff(v, X, 2) + sp.diff(v, Y, 2))
            + sp.I * (drift[0] * sp.diff(v, X) + drift[1] * sp.diff(v, Y)))


def sym_N_unit_circle(v, d, delta):
    """``N`` on ``|x| = 1``: ``d_nu = -d_r`` and ``Lap_G = d_theta^2``."""
    dth = lambda f: -Y * sp.diff(f, X) + X * sp.diff(f, Y)
    dr = X * sp.diff(v, X) + Y * sp.diff(v, Y)
    return (sp.I * sp.diff(v, Tt) + d * dr + delta * dth(dth(v))
            + sp.I * OMEGA_ROT * dth(v))


def mp_eval(expr, pts, times):
    f = sp.lambdify((X, Y, Tt), expr, modules="mpmath")
    return np.array([complex(f(mpmath.mpf(x), mpmath.mpf(y), mpmath.mpf(t)))
                     for (x, y), t in zip(pts, times)])


@pytest.fixture(scope="module")
def rotation():
    return CarlemanCoefficients.from_coefficient_set(make_preset("rotation_drift", 1.0, 2.0))


def sample(rng, n, R1=1.0, R2=2.0, T=1.0):
    ang = rng.uniform(0, 2 * np.pi, n)
    rad = rng.uniform(R1 + 0.02, R2 - 0.02, n)
    pts = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=-1)
    bnd = np.stack([np.cos(ang), np.sin(ang)], axis=-1) * R1
    return pts, bnd, rng.uniform(0.05 * T, 0.95 * T, n)


# ---------------------------------------------------------------------------
# operators


def test_bulk_and_boundary_operators_match_symbolic(rotation):
    w = BumpFunction(2.0, "wave", omega=0.5)
    v = sym_wave()
    rng = np.random.default_rng(0)
    pts, bnd, ts = sample(rng, 12)
    L_ref = mp_eval(sym_L(v, 1.0), pts, ts)
    N_ref = mp_eval(sym_N_unit_circle(v, 1.0, 2.0), bnd, ts)
    body = ConvexBody.circle(1.0)
    for i in range(len(ts)):
        L, N = schrodinger_operators(rotation, w, pts[i:i + 1], ts[i], body, bnd[i:i + 1])
        assert L[0] == pytest.approx(L_ref[i], rel=1e-11, abs=1e-11)
        assert N[0] == pytest.approx(N_ref[i], rel=1e-11, abs=1e-11)


def test_zero_function_gives_zero_operators(rotation):
    x = np.array([[1.5, 0.2]])
    L, N = schrodinger_operators(rotation, ZeroFunction(), x, 0.3, ConvexBody.circle(1.0),
                                 np.array([[1.0, 0.0]]))
    assert L[0] == 0 and N[0] == 0


def test_radial_profile_closed_form():
    c = CarlemanCoefficients(1.0, 2.0)
    f = RadialProfile(2.0, 1.0)
    x = np.array([[1.3, 0.4], [-0.2, 1.7]])
    t = 0.3
    r = np.hypot(x[:, 0], x[:, 1])
    # i v_t + Lap v with v = (r - R2) t (T - t): Lap = t(T-t)/r
    expected = 1j * (r - 2.0) * (1.0 - 2 * t) + t * (1 - t) / r
    np.testing.assert_allclose(bulk_operator(c, f.jet(x, t), x, t), expected, rtol=1e-13)
    # finite-difference cross-check of the Laplacian
    h = 1e-4
    lap = sum((f(x + h * e, t) - 2 * f(x, t) + f(x - h * e, t)) / h**2 for e in np.eye(2))
    np.testing.assert_allclose(lap, t * (1 - t) / r, rtol=1e-6)


def test_bessel_mode_solves_both_equations():
    m = BesselMode(1.0, 2.0, 1.0, 2.0, m=2, n=1)
    c = CarlemanCoefficients(1.0, 2.0)
    rng = np.random.default_rng(3)
    pts, bnd, ts = sample(rng, 30)
    body = ConvexBody.circle(1.0)
    scale = np.max(np.abs(m.jet(pts, 0.3).value))
    for t in (0.1, 0.6):
        L, N = schrodinger_operators(c, m, pts, t, body, bnd)
        assert np.max(np.abs(L)) <= 1e-6 * scale
        assert np.max(np.abs(N)) <= 1e-6 * scale
    assert m.check_boundary(2.0)


def test_laplace_beltrami_on_ellipse_against_parametrisation():
    a, b = 2.0, 1.0
    body = ConvexBody.ellipse(a, b)
    tau = sp.symbols("tau", real=True)
    f = sp.sin(X) * sp.exp(Y / 2) + X * Y**2
    gx, gy = a * sp.cos(tau), b * sp.sin(tau)
    speed = sp.sqrt(sp.diff(gx, tau) ** 2 + sp.diff(gy, tau) ** 2)
    ft = f.subs({X: gx, Y: gy})
    lb = sp.diff(sp.diff(ft, tau) / speed, tau) / speed
    lb_fn = sp.lambdify(tau, lb, "numpy")

    class Fn(BumpFunction):
        def jet(self, x, t):
            from wentzell.carleman.testfunctions import Jet

            xs, ys = x[..., 0], x[..., 1]
            val = np.sin(xs) * np.exp(ys / 2) + xs * ys**2
            gx_ = np.cos(xs) * np.exp(ys / 2) + ys**2
            gy_ = 0.5 * np.sin(xs) * np.exp(ys / 2) + 2 * xs * ys
            hxx = -np.sin(xs) * np.exp(ys / 2)
            hxy = 0.5 * np.cos(xs) * np.exp(ys / 2) + 2 * ys
            hyy = 0.25 * np.sin(xs) * np.exp(ys / 2) + 2 * xs
            hess = np.stack([np.stack([hxx, hxy], -1), np.stack([hxy, hyy], -1)], -2)
            z = np.zeros_like(val)
            return Jet(val + 0j, np.stack([gx_, gy_], -1) + 0j, hess + 0j, z + 0j)

    taus = np.linspace(0, 2 * np.pi, 23, endpoint=False)
    pts = np.stack([a * np.cos(taus), b * np.sin(taus)], axis=-1)
    frame = BoundaryFrame.on_body(body, pts)
    got = frame.laplace_beltrami(Fn(3.0).jet(pts, 0.0))
    np.testing.assert_allclose(got.real, lb_fn(taus), rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize("s,lam", [(1.0, 0.5), (5.0, 1.0)])
def test_conjugation_identity_against_symbolic(rotation, s, lam):
    params = CarlemanParams.create(ConvexBody.circle(1.0), lam, s, 1.0, 2.0)
    w = BumpFunction(2.0, "wave", omega=0.5)
    sphi = sym_weight(s, lam, params.alpha, 1.0)
    v = sp.exp(sphi) * sym_wave()
    L_conj = sym_L(v, 1.0) * sp.exp(-sphi)
    N_conj = sym_N_unit_circle(v, 1.0, 2.0) * sp.exp(-sphi)
    rng = np.random.default_rng(int(10 * s + lam))
    pts, bnd, ts = sample(rng, 8)
    ref_L = mp_eval(L_conj, pts, ts)
    ref_N = mp_eval(N_conj, bnd, ts)
    for i in range(len(ts)):
        dec = conjugated_decomposition(params, rotation, w, pts[i:i + 1], ts[i], bnd[i:i + 1])
        got_L = (dec.P1 + dec.P2 + dec.R)[0]
        got_N = (dec.Q1 + dec.Q2 + dec.RG)[0]
        assert abs(got_L - ref_L[i]) <= 1e-8 * abs(ref_L[i])
        assert abs(got_N - ref_N[i]) <= 1e-8 * abs(ref_N[i])


def test_zero_function_gives_zero_decomposition(rotation):
    params = CarlemanParams.create(ConvexBody.circle(1.0), 1.0, 2.0, 1.0, 2.0)
    dec = conjugated_decomposition(params, rotation, ZeroFunction(), np.array([[1.5, 0.0]]), 0.5,
                                   np.array([[1.0, 0.0]]))
    for part in (dec.P1, dec.P2, dec.R, dec.Q1, dec.Q2, dec.RG):
        assert np.all(part == 0)


def test_weighted_jet_applies_operator_after_conjugation(rotation):
    params = CarlemanParams.create(ConvexBody.ellipse(1.2, 0.9), 1.0, 3.0, 1.0, 2.5)
    w = BumpFunction(2.5, "linear", omega=2.0)
    rng = np.random.default_rng(1)
    ang = rng.uniform(0, 2 * np.pi, 40)
    x = np.stack([1.8 * np.cos(ang), 1.8 * np.sin(ang)], axis=-1)
    xg = params.body.boundary_at_angle(ang)
    dec = conjugated_decomposition(params, rotation, w, x, 0.4, xg)
    wf = WeightedFunction(w, params)
    L = bulk_operator(rotation, wf.jet(x, 0.4), x, 0.4)
    N = boundary_operator(rotation, wf.jet(xg, 0.4), xg, 0.4, BoundaryFrame.on_body(params.body, xg))
    np.testing.assert_allclose(dec.P1 + dec.P2 + dec.R, L, rtol=1e-10)
    np.testing.assert_allclose(dec.Q1 + dec.Q2 + dec.RG, N, rtol=1e-10)


# ---------------------------------------------------------------------------
# test functions


def test_family_vanishes_on_outer_circle():
    for f in default_family(2.0):
        assert f.check_boundary(2.0)
    assert not RadialProfile(2.0, 1.0).check_boundary(3.0)


def test_unknown_test_function_rejected():
    with pytest.raises(ContractError):
        make_test_function("nope", 2.0)
    with pytest.raises(ContractError):
        BumpFunction(2.0, "spiky")


# ---------------------------------------------------------------------------
# quadrature of the two sides


@pytest.fixture(scope="module")
def unit_annulus():
    return CarlemanParams.create(ConvexBody.circle(1.0), 1.0, 1.0, 1.0, 2.0)


def test_zero_test_function_gives_zero_ratio(unit_annulus):
    e = carleman_sides(unit_annulus, CarlemanCoefficients(1.0, 2.0), ZeroFunction())
    assert all(v == 0.0 for v in e.terms.values())
    assert e.ratio == 0.0


def test_weight_vanishes_at_time_endpoints(unit_annulus):
    p = unit_annulus
    t = 1e-6 * p.T
    x = np.array([[2.0, 0.0]])  # largest psi, so smallest phi
    w = weight_eval(p, x, t)
    assert (np.exp(-2 * p.s * w.phi) * w.theta**3)[0] <= 1e-30


def test_ratios_finite_on_small_grid(unit_annulus, rotation):
    for s in (2.0, 8.0):
        for lam in (0.5, 2.0):
            p = unit_annulus.with_(s=s, lam=lam)
            for f in default_family(2.0):
                e = carleman_sides(p, rotation, f)
                assert np.isfinite(e.ratio) and e.ratio > 0
                assert e.lhs > 0 and e.rhs > 0


def test_delta_not_above_d_is_flagged(unit_annulus, caplog):
    c = CarlemanCoefficients(2.0, 1.0)
    with caplog.at_level(logging.WARNING):
        e = carleman_sides(unit_annulus, c, BumpFunction(2.0))
    assert e.delta_gt_d is False
    assert "delta <= d" in caplog.text


def test_interior_observation_variant(unit_annulus):
    obs = InteriorObservation(0.3)
    q = CarlemanQuadrature(unit_annulus, QuadratureResolution(), 0.3)
    assert q.omega_mask(0.3).any() and not q.omega_mask(0.3).all()
    e = carleman_sides(unit_annulus, CarlemanCoefficients(1.0, 2.0), BumpFunction(2.0), obs,
                       quadrature=q)
    assert e.observation == "interior"
    assert e.terms["rhs_obs"] > 0 and np.isfinite(e.ratio)


def test_observation_band_must_fit(unit_annulus):
    with pytest.raises(ContractError):
        CarlemanQuadrature(unit_annulus, QuadratureResolution(), 1.5)


def test_quadrature_doubling_changes_integrals_below_one_percent(unit_annulus, rotation):
    p = unit_annulus.with_(s=4.0, lam=1.0)
    res = QuadratureResolution()
    for f in default_family(2.0):
        a = carleman_sides(p, rotation, f, resolution=res)
        b = carleman_sides(p, rotation, f, resolution=res.doubled())
        floor = 1e-12 * (b.lhs + b.rhs)
        for k, v in b.terms.items():
            if abs(v) > floor:
                assert abs(a.terms[k] - v) <= 1e-2 * abs(v), k


# ---------------------------------------------------------------------------
# sweeps


def test_empirical_constants_on_synthetic_table():
    s = np.array([1.0, 2.0, 4.0])
    lam = np.array([0.5, 1.0, 2.0, 3.0])
    table = np.array([[9.0, 5.0, 3.0, 2.0],
                      [6.0, 1.0, 1.0, 1.0],
                      [5.0, 1.0, 1.0, 1.0]])
    s0, lam0, C = empirical_constants(table, s, lam)
    assert (s0, lam0, C) == (2.0, 1.0, 1.0)


def test_sweep_contract(unit_annulus):
    c = CarlemanCoefficients(1.0, 2.0)
    with pytest.raises(ContractError):
        carleman_sweep(unit_annulus, c, default_family(2.0)[:2], [1, 2, 4, 8], [0.5, 1, 2])
    with pytest.raises(ContractError):
        carleman_sweep(unit_annulus, c, default_family(2.0), [1, 2], [0.5, 1, 2])


def test_small_sweep_writes_csv(unit_annulus, tmp_path):
    coarse = QuadratureResolution(n_angle=16, order=3, inner_panels=2)
    res = carleman_sweep(unit_annulus, CarlemanCoefficients(1.0, 2.0), default_family(2.0),
                         [2, 4, 8, 16], [0.5, 1, 2], resolution=coarse,
                         csv_path=tmp_path / "sweep.csv", workers=2)
    header, rows = read_csv(tmp_path / "sweep.csv")
    assert len(rows) == 36 and "ratio" in header and "delta_gt_d" in header
    assert all(float(r[header.index("ratio")]) >= 0 for r in rows)
    assert res.delta_gt_d and np.all(np.isfinite(res.max_ratio))
    assert res.summary()["C"] == res.C
