import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wentzell.errors import CertificationError, ContractError, WeightDomainError
from wentzell.geometry import (CarlemanParams, ConvexBody, gamma_star, max_exp_weight,
                               minkowski_gauge, psi_derivatives, strong_convexity_certificate,
                               weight_eval)


def gauge_by_bisection(inside, x, lo=1e-6, hi=100.0, iters=200):
    """Smallest lam with x / lam inside the body."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if inside(np.asarray(x) / mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def ellipse_inside(a, b):
    return lambda p: (p[0] / a) ** 2 + (p[1] / b) ** 2 <= 1.0


def test_circle_gauge_is_norm_scaled():
    assert minkowski_gauge(ConvexBody.circle(1.0), np.array([2.0, 0.0])) == pytest.approx(2.0)


def test_ellipse_gauge_on_boundary():
    assert minkowski_gauge(ConvexBody.ellipse(2, 1), np.array([2.0, 0.0])) == pytest.approx(1.0)


def test_ellipse_gauge_matches_bisection():
    body = ConvexBody.ellipse(2, 1)
    x = np.array([2.0, 2.0])
    oracle = gauge_by_bisection(ellipse_inside(2, 1), x)
    assert oracle == pytest.approx(np.sqrt(5), abs=1e-10)
    assert minkowski_gauge(body, x) == pytest.approx(oracle, abs=1e-10)


def test_circle_gauge_derivatives():
    mu, g, h = ConvexBody.circle(1.0).gauge_derivatives(np.array([3.0, 0.0]))
    assert mu == pytest.approx(3.0)
    np.testing.assert_allclose(g, [1.0, 0.0], atol=1e-14)
    np.testing.assert_allclose(h, [[0.0, 0.0], [0.0, 1.0 / 3.0]], atol=1e-14)


def test_ellipse_gradient_matches_central_differences():
    body = ConvexBody.ellipse(2, 1)
    x = np.array([0.0, 2.0])
    mu, g, _ = body.gauge_derivatives(x)
    h = 1e-5
    fd = np.array([(minkowski_gauge(body, x + h * e) - minkowski_gauge(body, x - h * e)) / (2 * h)
                   for e in np.eye(2)])
    assert mu == pytest.approx(2.0)
    np.testing.assert_allclose(g, [0.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(fd, g, rtol=1e-6, atol=1e-6)


def _wobbly_body(eps=0.08):
    # r(t) = 1 + eps cos 3t, strongly convex for small eps
    def curve(t):
        r = 1 + eps * np.cos(3 * t)
        return np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)

    def dcurve(t):
        r, dr = 1 + eps * np.cos(3 * t), -3 * eps * np.sin(3 * t)
        return np.stack([dr * np.cos(t) - r * np.sin(t), dr * np.sin(t) + r * np.cos(t)], axis=-1)

    def d2curve(t):
        r, dr, d2r = 1 + eps * np.cos(3 * t), -3 * eps * np.sin(3 * t), -9 * eps * np.cos(3 * t)
        return np.stack([d2r * np.cos(t) - 2 * dr * np.sin(t) - r * np.cos(t),
                         d2r * np.sin(t) + 2 * dr * np.cos(t) - r * np.sin(t)], axis=-1)

    return ConvexBody.parametric(curve, dcurve, d2curve)


@pytest.mark.parametrize("body", [ConvexBody.circle(1.3), ConvexBody.ellipse(2, 1),
                                  _wobbly_body()], ids=["circle", "ellipse", "parametric"])
def test_gauge_is_one_on_the_boundary(body):
    tau = np.linspace(0, 2 * np.pi, 97, endpoint=False)
    np.testing.assert_allclose(minkowski_gauge(body, body.boundary(tau)[0]), 1.0, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 6.0), st.floats(0, 2 * np.pi), st.floats(0.1, 5.0))
def test_gauge_is_positively_homogeneous(r, ang, c):
    body = ConvexBody.ellipse(2, 1)
    x = r * np.array([np.cos(ang), np.sin(ang)])
    assert minkowski_gauge(body, c * x) == pytest.approx(c * minkowski_gauge(body, x), rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.3, 4.0), st.floats(0, 2 * np.pi))
def test_parametric_gauge_gradient_by_differences(r, ang):
    body = _wobbly_body()
    x = r * np.array([np.cos(ang), np.sin(ang)])
    _, g, hess = body.gauge_derivatives(x)
    h = 1e-5
    fd = np.array([(minkowski_gauge(body, x + h * e) - minkowski_gauge(body, x - h * e)) / (2 * h)
                   for e in np.eye(2)])
    np.testing.assert_allclose(fd, g, rtol=1e-6, atol=1e-6)
    # homogeneity of degree one: the Hessian kills the radial direction
    np.testing.assert_allclose(hess @ x, 0.0, atol=1e-8)


def test_non_convex_curve_is_rejected():
    def curve(t):
        r = 1 + 0.5 * np.cos(3 * t)
        return np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)

    def dcurve(t):
        r, dr = 1 + 0.5 * np.cos(3 * t), -1.5 * np.sin(3 * t)
        return np.stack([dr * np.cos(t) - r * np.sin(t), dr * np.sin(t) + r * np.cos(t)], axis=-1)

    def d2curve(t):
        r, dr, d2r = 1 + 0.5 * np.cos(3 * t), -1.5 * np.sin(3 * t), -4.5 * np.cos(3 * t)
        return np.stack([d2r * np.cos(t) - 2 * dr * np.sin(t) - r * np.cos(t),
                         d2r * np.sin(t) + 2 * dr * np.cos(t) - r * np.sin(t)], axis=-1)

    with pytest.raises((CertificationError, ContractError)):
        ConvexBody.parametric(curve, dcurve, d2curve)


def test_invalid_sizes_rejected():
    with pytest.raises(ContractError):
        ConvexBody.circle(-1.0)
    with pytest.raises(ContractError):
        ConvexBody.ellipse(1.0, 0.0)


def test_theta_at_unit_level():
    params = CarlemanParams.create(ConvexBody.circle(1.0), lam=1.0, s=1.0, T=2.0, outer_radius=2.0)
    w = weight_eval(params, np.array([1.0, 0.0]), 1.0)
    assert w.theta == pytest.approx(np.e)


def test_phi_with_explicit_alpha():
    params = CarlemanParams(ConvexBody.circle(1.0), 0.5, 1.0, 2.0, 8.0, 2.0)
    w = weight_eval(params, np.array([1.0, 0.0]), 1.0)
    assert w.phi == pytest.approx(8.0 - np.exp(0.5))


def test_alpha_must_dominate_the_weight():
    body = ConvexBody.circle(1.0)
    with pytest.raises(ContractError):
        CarlemanParams(body, 1.0, 1.0, 1.0, 0.5 * max_exp_weight(body, 1.0, 2.0), 2.0)


def test_weights_undefined_at_time_endpoints():
    params = CarlemanParams.create(ConvexBody.circle(1.0), 1.0, 1.0, 1.0, 2.0)
    for t in (0.0, 1.0):
        with pytest.raises(WeightDomainError):
            weight_eval(params, np.array([1.5, 0.0]), t)


@settings(max_examples=50, deadline=None)
@given(st.floats(1.05, 1.95), st.floats(0, 2 * np.pi), st.floats(0.05, 0.95),
       st.sampled_from([0.5, 1.0, 2.0]))
def test_weight_gradient_identities(r, ang, t, lam):
    params = CarlemanParams.create(ConvexBody.ellipse(1.0, 0.8), lam, 1.0, 1.0, 2.0)
    x = r * np.array([np.cos(ang), np.sin(ang)])
    w = weight_eval(params, x, t)
    np.testing.assert_allclose(w.grad_phi + lam * w.theta * w.grad_psi, 0.0, atol=1e-13 * w.theta)
    np.testing.assert_allclose(w.grad_theta - lam * w.theta * w.grad_psi, 0.0,
                               atol=1e-13 * w.theta)


def test_psi_hessian_for_unit_circle():
    _, _, h = psi_derivatives(ConvexBody.circle(1.0), np.array([[1.5, 0.2], [-0.3, 1.7]]))
    np.testing.assert_allclose(h, np.broadcast_to(2 * np.eye(2), h.shape), atol=1e-12)


def test_gamma_star_circle_is_whole_outer_circle():
    gs = gamma_star(ConvexBody.circle(1.0), 2.0, 64)
    assert gs.outer_mask.all()
    np.testing.assert_allclose(gs.outer_dnu_psi, 4.0, rtol=1e-12)
    assert not gs.inner_mask.any()
    np.testing.assert_allclose(gs.inner_dnu_psi, -2.0, rtol=1e-12)


def test_gamma_star_ellipse_in_large_circle():
    gs = gamma_star(ConvexBody.ellipse(2, 1), 6.0, 256)
    assert gs.outer_mask.all()
    assert not gs.inner_mask.any()


def test_convexity_certificate_circle():
    cert = strong_convexity_certificate(ConvexBody.circle(1.0))
    assert cert.min_curvature == pytest.approx(1.0)
    assert cert.min_hess_psi_eig == pytest.approx(2.0)


def test_convexity_certificate_ellipse_dense():
    cert = strong_convexity_certificate(ConvexBody.ellipse(2, 1), samples=256, radial_levels=40)
    assert cert.min_hess_psi_eig > 0
    assert cert.min_curvature > 0
    assert cert.min_hess_mu_eig > -1e-9
