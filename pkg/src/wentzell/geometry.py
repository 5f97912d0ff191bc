"""Strongly convex bodies, their Minkowski gauge and the Carleman weights.

The body Omega_1 contains the origin and its boundary is the inner boundary
Gamma_1 of the annular domain.  The weight ``psi = mu**2`` is built from the
gauge ``mu`` of the body; ``theta`` and ``phi`` add the time singularity at
``t = 0`` and ``t = T``.

Points are arrays of shape ``(..., 2)``; every evaluator is vectorised over
the leading axes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import CertificationError, ContractError, WeightDomainError

log = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _dot(a, b):
    return np.sum(a * b, axis=-1)


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """A strongly convex planar body containing the origin.

    Use the constructors :meth:`circle`, :meth:`ellipse` and
    :meth:`parametric`; they validate the invariants.  A parametric body is
    given by a closed counter-clockwise curve ``tau -> gamma(tau)`` on
    ``[0, 2 pi)`` together with its first two derivatives.
    """

    kind: str
    params: tuple = ()
    curve: Optional[Callable] = None
    dcurve: Optional[Callable] = None
    d2curve: Optional[Callable] = None
    contains_origin: bool = True
    _table: Optional[tuple] = field(default=None, repr=False)

    # -- constructors ---------------------------------------------------
    @classmethod
    def circle(cls, radius: float) -> "ConvexBody":
        if not radius > 0:
            raise ContractError(f"circle radius must be positive, got {radius}")
        return cls("circle", (float(radius),))

    @classmethod
    def ellipse(cls, a: float, b: float) -> "ConvexBody":
        if not (a > 0 and b > 0):
            raise ContractError(f"ellipse semi-axes must be positive, got {(a, b)}")
        return cls("ellipse", (float(a), float(b)))

    @classmethod
    def parametric(cls, curve, dcurve, d2curve, n_check: int = 2048) -> "ConvexBody":
        tau = np.linspace(0.0, TWO_PI, n_check, endpoint=False)
        g = np.asarray(curve(tau), dtype=float)
        dg = np.asarray(dcurve(tau), dtype=float)
        d2g = np.asarray(d2curve(tau), dtype=float)
        # polar angle must increase monotonically and wind once around 0
        dtheta = _cross(g, dg) / _dot(g, g)
        if np.any(np.hypot(g[:, 0], g[:, 1]) == 0) or np.any(dtheta <= 0):
            bad = tau[np.argmin(dtheta)]
            raise ContractError(
                f"polar angle of the boundary curve is not monotone (tau={bad:.6g}); "
                "the body must contain the origin"
            )
        ang = np.unwrap(np.arctan2(g[:, 1], g[:, 0]))
        g_end = np.asarray(curve(np.array([TWO_PI])), dtype=float)[0]
        last = ang[-1] + np.angle(
            complex(*g_end) / complex(*g[-1])
        )
        if abs(last - ang[0] - TWO_PI) > 1e-6:
            raise ContractError("boundary curve must wind exactly once around the origin")
        kappa = _cross(dg, d2g) / np.hypot(dg[:, 0], dg[:, 1]) ** 3
        if np.any(kappa <= 0):
            i = int(np.argmin(kappa))
            raise CertificationError(
                f"boundary curvature {kappa[i]:.3g} <= 0 at tau={tau[i]:.6g}",
                angle=float(tau[i]),
            )
        table = (np.append(tau, TWO_PI), np.append(ang, ang[0] + TWO_PI))
        return cls("parametric", (), curve, dcurve, d2curve, True, table)

    # -- boundary -------------------------------------------------------
    def boundary(self, tau):
        """Boundary point, derivative and second derivative at parameter ``tau``."""
        tau = np.asarray(tau, dtype=float)
        c, s = np.cos(tau), np.sin(tau)
        if self.kind == "circle":
            (R,) = self.params
            a = b = R
        elif self.kind == "ellipse":
            a, b = self.params
        else:
            return (
                np.asarray(self.curve(tau), dtype=float),
                np.asarray(self.dcurve(tau), dtype=float),
                np.asarray(self.d2curve(tau), dtype=float),
            )
        g = np.stack([a * c, b * s], axis=-1)
        dg = np.stack([-a * s, b * c], axis=-1)
        return g, dg, -g

    def curvature(self, tau):
        _, dg, d2g = self.boundary(tau)
        return _cross(dg, d2g) / np.hypot(dg[..., 0], dg[..., 1]) ** 3

    def boundary_at_angle(self, angle):
        """Boundary point on the ray of polar angle ``angle``."""
        angle = np.asarray(angle, dtype=float)
        ray = np.stack([np.cos(angle), np.sin(angle)], axis=-1)
        return ray / self.gauge(ray)[..., None]

    # -- polar angle inversion for parametric bodies ---------------------
    def _invert_angle(self, angle):
        taus, angs = self._table
        a0 = angs[0]
        target = a0 + np.mod(np.asarray(angle, dtype=float) - a0, TWO_PI)
        i = np.clip(np.searchsorted(angs, target) - 1, 0, len(taus) - 2)
        lo, hi = taus[i], taus[i + 1]
        ref = angs[i]
        tau = lo + (hi - lo) * (target - ref) / (angs[i + 1] - ref)
        for _ in range(60):
            g, dg, _ = self.boundary(tau)
            cur = ref + np.angle(
                (g[..., 0] + 1j * g[..., 1]) * np.exp(-1j * ref)
            )
            f = cur - target
            lo = np.where(f < 0, tau, lo)
            hi = np.where(f > 0, tau, hi)
            deriv = _cross(g, dg) / _dot(g, g)
            step = f / deriv
            new = tau - step
            outside = (new <= lo) | (new >= hi)
            new = np.where(outside, 0.5 * (lo + hi), new)
            done = np.abs(new - tau) <= 1e-12 * np.maximum(1.0, np.abs(tau))
            tau = new
            if np.all(done):
                break
        return tau

    def _radial_function(self, angle):
        """``f = 1/rho`` and its first two angle derivatives (parametric only)."""
        tau = self._invert_angle(angle)
        g, dg, d2g = self.boundary(tau)
        gg = _dot(g, g)
        rho = np.sqrt(gg)
        gdg = _dot(g, dg)
        rho_t = gdg / rho
        rho_tt = (_dot(dg, dg) + _dot(g, d2g)) / rho - gdg**2 / rho**3
        th_t = _cross(g, dg) / gg
        th_tt = _cross(g, d2g) / gg - 2.0 * _cross(g, dg) * gdg / gg**2
        r1 = rho_t / th_t
        r2 = (rho_tt * th_t - rho_t * th_tt) / th_t**3
        f = 1.0 / rho
        f1 = -r1 / rho**2
        f2 = -r2 / rho**2 + 2.0 * r1**2 / rho**3
        return f, f1, f2

    # -- gauge ----------------------------------------------------------
    def gauge(self, x):
        """Minkowski gauge ``mu(x) = inf {l > 0 : x in l * body}``."""
        x = np.asarray(x, dtype=float)
        if self.kind == "circle":
            return np.hypot(x[..., 0], x[..., 1]) / self.params[0]
        if self.kind == "ellipse":
            a, b = self.params
            return np.hypot(x[..., 0] / a, x[..., 1] / b)
        r = np.hypot(x[..., 0], x[..., 1])
        f, _, _ = self._radial_function(np.arctan2(x[..., 1], x[..., 0]))
        return np.where(r > 0, r * f, 0.0)

    def gauge_derivatives(self, x):
        """Return ``(mu, grad mu, D^2 mu)`` at points away from the origin."""
        x = np.asarray(x, dtype=float)
        if self.kind in ("circle", "ellipse"):
            if self.kind == "circle":
                a = b = self.params[0]
            else:
                a, b = self.params
            mu = np.hypot(x[..., 0] / a, x[..., 1] / b)
            scaled = np.stack([x[..., 0] / a**2, x[..., 1] / b**2], axis=-1)
            grad = scaled / mu[..., None]
            diag = np.zeros(x.shape[:-1] + (2, 2))
            diag[..., 0, 0] = 1.0 / a**2
            diag[..., 1, 1] = 1.0 / b**2
            hess = (diag - grad[..., :, None] * grad[..., None, :]) / mu[..., None, None]
            return mu, grad, hess
        r = np.hypot(x[..., 0], x[..., 1])
        ang = np.arctan2(x[..., 1], x[..., 0])
        f, f1, f2 = self._radial_function(ang)
        er = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        et = np.stack([-np.sin(ang), np.cos(ang)], axis=-1)
        mu = r * f
        grad = f[..., None] * er + f1[..., None] * et
        hess = ((f + f2) / r)[..., None, None] * et[..., :, None] * et[..., None, :]
        return mu, grad, hess

    def inner_normal_data(self, x):
        """Outward normal of the annulus (pointing into the body) on Gamma_1."""
        _, grad, _ = self.gauge_derivatives(x)
        return -grad / np.linalg.norm(grad, axis=-1)[..., None]

    def max_radius(self, n: int = 4096) -> float:
        ang = np.linspace(0.0, TWO_PI, n, endpoint=False)
        pts = self.boundary_at_angle(ang)
        return float(np.max(np.hypot(pts[:, 0], pts[:, 1])))


def minkowski_gauge(body: ConvexBody, x):
    return body.gauge(x)


def gauge_derivatives(body: ConvexBody, x):
    return body.gauge_derivatives(x)


# ---------------------------------------------------------------------------
# Carleman weights


@dataclass(frozen=True)
class CarlemanParams:
    body: ConvexBody
    lam: float
    s: float
    T: float
    alpha: float
    outer_radius: float

    def __post_init__(self):
        for name in ("lam", "s", "T"):
            if not getattr(self, name) > 0:
                raise ContractError(f"{name} must be positive")
        if not self.outer_radius > self.body.max_radius():
            raise ContractError("outer radius must enclose the body")
        bound = max_exp_weight(self.body, self.lam, self.outer_radius)
        if not self.alpha >= bound + 1e-9:
            raise ContractError(
                f"alpha={self.alpha:.6g} must exceed max e^(lambda psi)={bound:.6g}"
            )

    @classmethod
    def create(cls, body, lam, s, T, outer_radius, alpha=None, alpha_margin=0.1):
        if alpha is None:
            alpha = (1.0 + alpha_margin) * max_exp_weight(body, lam, outer_radius)
        return cls(body, float(lam), float(s), float(T), float(alpha), float(outer_radius))

    def with_(self, **kw):
        """Copy with some of ``lam``, ``s`` replaced; ``alpha`` keeps its margin."""
        vals = dict(body=self.body, lam=self.lam, s=self.s, T=self.T,
                    outer_radius=self.outer_radius)
        margin = kw.pop("alpha_margin", None)
        if margin is None:
            margin = self.alpha / max_exp_weight(self.body, self.lam, self.outer_radius) - 1.0
        vals.update(kw)
        return CarlemanParams.create(alpha_margin=margin, **vals)


def max_exp_weight(body: ConvexBody, lam: float, outer_radius: float, n: int = 4096) -> float:
    # psi = mu^2 increases along rays, so the maximum sits on the outer circle
    ang = np.linspace(0.0, TWO_PI, n, endpoint=False)
    pts = outer_radius * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    return float(np.max(np.exp(lam * body.gauge(pts) ** 2)))


@dataclass
class WeightBundle:
    psi: np.ndarray
    grad_psi: np.ndarray
    hess_psi: np.ndarray
    lap_psi: np.ndarray
    theta: np.ndarray
    grad_theta: np.ndarray
    phi: np.ndarray
    grad_phi: np.ndarray
    hess_phi: np.ndarray
    lap_phi: np.ndarray
    dt_phi: np.ndarray
    dt_theta: np.ndarray


def psi_derivatives(body: ConvexBody, x):
    """``(psi, grad psi, D^2 psi)`` for ``psi = mu^2``."""
    mu, gmu, hmu = body.gauge_derivatives(x)
    psi = mu**2
    grad_psi = 2.0 * mu[..., None] * gmu
    hess_psi = 2.0 * gmu[..., :, None] * gmu[..., None, :] + 2.0 * mu[..., None, None] * hmu
    return psi, grad_psi, hess_psi


def weight_eval(params: CarlemanParams, x, t, psi_data=None) -> WeightBundle:
    """Evaluate psi, theta, phi and their derivatives at ``(x, t)``.

    ``psi_data`` may carry a precomputed :func:`psi_derivatives` result for
    ``x``, which saves the gauge evaluation when sweeping over time.
    """
    t = np.asarray(t, dtype=float)
    T = params.T
    if np.any(t <= 0) or np.any(t >= T):
        raise WeightDomainError("weights are defined only for 0 < t < T")
    lam, alpha = params.lam, params.alpha
    psi, grad_psi, hess_psi = psi_data if psi_data is not None else psi_derivatives(params.body, x)
    lap_psi = np.trace(hess_psi, axis1=-2, axis2=-1)

    g = t * (T - t)
    dg = T - 2.0 * t
    e = np.exp(lam * psi)
    theta = e / g
    phi = (alpha - e) / g
    lam_e_g = lam * e / g
    grad_theta = lam_e_g[..., None] * grad_psi
    grad_phi = -lam_e_g[..., None] * grad_psi
    outer = grad_psi[..., :, None] * grad_psi[..., None, :]
    hess_phi = -lam_e_g[..., None, None] * (lam * outer + hess_psi)
    lap_phi = -lam_e_g * (lam * np.sum(grad_psi**2, axis=-1) + lap_psi)
    dt_phi = -(alpha - e) * dg / g**2
    dt_theta = -e * dg / g**2
    return WeightBundle(psi, grad_psi, hess_psi, lap_psi, theta, grad_theta, phi,
                        grad_phi, hess_phi, lap_phi, dt_phi, dt_theta)


@dataclass
class GammaStar:
    angles: np.ndarray
    outer_mask: np.ndarray
    inner_mask: np.ndarray
    outer_dnu_psi: np.ndarray
    inner_dnu_psi: np.ndarray


def gamma_star(params_or_body, outer_radius: float, n_angles: int = 64) -> GammaStar:
    """Classify boundary nodes by the sign of the normal derivative of psi.

    Nodes sit at equispaced polar angles on the outer circle and on the body
    boundary.  A node belongs to Gamma_* when ``d_nu psi >= 0``.
    """
    body = getattr(params_or_body, "body", params_or_body)
    ang = np.linspace(0.0, TWO_PI, n_angles, endpoint=False)
    ray = np.stack([np.cos(ang), np.sin(ang)], axis=-1)

    outer = outer_radius * ray
    mu, gmu, _ = body.gauge_derivatives(outer)
    dnu_out = _dot(2.0 * mu[:, None] * gmu, ray)

    inner = body.boundary_at_angle(ang)
    mu_i, gmu_i, _ = body.gauge_derivatives(inner)
    nu_i = -gmu_i / np.linalg.norm(gmu_i, axis=-1)[:, None]
    dnu_in = _dot(2.0 * mu_i[:, None] * gmu_i, nu_i)
    return GammaStar(ang, dnu_out >= 0, dnu_in >= 0, dnu_out, dnu_in)


@dataclass
class ConvexityCertificate:
    min_curvature: float
    min_curvature_angle: float
    min_hess_psi_eig: float
    min_hess_mu_eig: float


def strong_convexity_certificate(body: ConvexBody, samples: int = 256,
                                 outer_radius: Optional[float] = None,
                                 radial_levels: int = 40) -> ConvexityCertificate:
    """Sampled lower bounds on boundary curvature and on the Hessian of psi.

    The gauge is homogeneous of degree one, so its Hessian always annihilates
    the radial direction; only its semi-definiteness is checked.  The
    positive-definiteness test is carried by ``D^2 psi``.
    """
    if samples < 64:
        raise ContractError("sample count must be at least 64")
    tau = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    kappa = body.curvature(tau)
    i = int(np.argmin(kappa))
    if kappa[i] <= 0:
        raise CertificationError(
            f"non-positive curvature {kappa[i]:.3g} at angle {tau[i]:.6g}", angle=float(tau[i])
        )
    if outer_radius is None:
        outer_radius = 2.0 * body.max_radius()
    inner = body.boundary_at_angle(tau)
    levels = np.linspace(0.0, 1.0, radial_levels)
    rin = np.hypot(inner[:, 0], inner[:, 1])
    radii = rin[None, :] + levels[:, None] * (outer_radius - rin[None, :])
    pts = radii[..., None] * np.stack([np.cos(tau), np.sin(tau)], axis=-1)[None]
    mu, gmu, hmu = body.gauge_derivatives(pts)
    hpsi = 2.0 * gmu[..., :, None] * gmu[..., None, :] + 2.0 * mu[..., None, None] * hmu
    eig_psi = np.linalg.eigvalsh(hpsi).min()
    eig_mu = np.linalg.eigvalsh(hmu).min()
    if eig_mu < -1e-9:
        log.warning("Hessian of the gauge has a negative eigenvalue %.3g", eig_mu)
    if eig_psi <= 0:
        raise CertificationError(f"D^2 psi is not positive definite (min eig {eig_psi:.3g})")
    return ConvexityCertificate(float(kappa[i]), float(tau[i]), float(eig_psi), float(eig_mu))
