"""Quadrature of both sides of the Carleman inequalities.

The weight ``exp(-2 s phi)`` is extremely peaked: in space it concentrates
in a layer of width ``~ 1 / (s lam theta |grad psi|)`` at the outer circle,
in time around ``T/2``.  Both directions therefore use composite
Gauss-Legendre panels graded geometrically toward the peak.  Integrals are
reported multiplied by ``exp(2 s phi_min)`` (``phi_min`` the minimum of
``phi`` over the closed space-time cylinder) so that nothing underflows;
``log_scale`` records the factor.  Ratios are unaffected.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import ContractError
from ..geometry import CarlemanParams, max_exp_weight, psi_derivatives, weight_eval
from .operators import BoundaryFrame, CarlemanCoefficients, boundary_operator, bulk_operator
from .testfunctions import TestFunction

log = logging.getLogger(__name__)

TERM_NAMES = (
    "bulk_v", "bulk_grad", "bulk_dpsi",
    "gamma_v", "gamma_dnu", "gamma_tangential", "gamma_tangential_weighted",
    "rhs_L", "rhs_N", "rhs_obs",
)


@dataclass(frozen=True)
class QuadratureResolution:
    n_angle: int = 32
    order: int = 4  # Gauss-Legendre points per panel
    inner_panels: int = 4
    radial_levels: int = 26
    time_levels: int = 14
    eps: float = 1e-3  # time window [eps T, (1 - eps) T]

    def doubled(self):
        return replace(self, n_angle=2 * self.n_angle, order=2 * self.order,
                       inner_panels=2 * self.inner_panels)


@dataclass(frozen=True)
class BoundaryObservation:
    kind: str = "boundary"


@dataclass(frozen=True)
class InteriorObservation:
    """``omega = {x in Omega : dist(x, Gamma*) <= eps}``."""

    eps: float = 0.25
    kind: str = "interior"


def _gl_panels(edges, order):
    x, w = np.polynomial.legendre.leggauss(order)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (b - a) * x + 0.5 * (a + b)
    weights = 0.5 * (b - a) * w
    return nodes.ravel(), weights.ravel()


def _graded_edges(levels, length):
    """Panel edges on ``[0, length]`` graded geometrically toward ``length``."""
    k = np.arange(levels + 1)
    edges = length * (1.0 - 2.0 ** (-k.astype(float)))
    return np.append(edges, length)


@dataclass
class _Nodes:
    x: np.ndarray
    w: np.ndarray
    psi: tuple


class CarlemanQuadrature:
    """Space-time nodes on ``Omega = {|x| < R2} minus body`` and its boundary."""

    def __init__(self, params: CarlemanParams, resolution: QuadratureResolution,
                 split_width: float | None = None):
        body, R2 = params.body, params.outer_radius
        self.params, self.res = params, resolution
        n = resolution.n_angle
        ang = 2 * np.pi * np.arange(n) / n
        dang = 2 * np.pi / n
        ray = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        et = np.stack([-np.sin(ang), np.cos(ang)], axis=-1)
        mu, gmu, _ = body.gauge_derivatives(ray)
        rho1 = 1.0 / mu
        drho1 = -np.sum(gmu * et, axis=-1) / mu**2
        gap = R2 - np.max(rho1)
        eps_split = 0.25 * gap if split_width is None else float(split_width)
        if not 0 < eps_split < gap:
            raise ContractError("observation band must fit between the body and the outer circle")
        self.split = R2 - eps_split

        # bulk: uniform panels on [rho1, R2 - eps], graded panels on [R2 - eps, R2]
        ti, wi = _gl_panels(np.linspace(0.0, 1.0, resolution.inner_panels + 1), resolution.order)
        to, wo = _gl_panels(_graded_edges(resolution.radial_levels, eps_split), resolution.order)
        span = self.split - rho1
        r_in = rho1[:, None] + span[:, None] * ti[None, :]
        w_in = span[:, None] * wi[None, :]
        r_out = np.broadcast_to(self.split + to, (n, to.size))
        w_out = np.broadcast_to(wo, (n, wo.size))
        r = np.concatenate([r_in, r_out], axis=1)
        wr = np.concatenate([w_in, w_out], axis=1)
        x = r[..., None] * ray[:, None, :]
        self.bulk = _Nodes(x.reshape(-1, 2), (wr * r * dang).ravel(),
                           psi_derivatives(body, x.reshape(-1, 2)))
        self.bulk_radius = r.ravel()

        xg = rho1[:, None] * ray
        self.gamma1 = _Nodes(xg, np.hypot(rho1, drho1) * dang, psi_derivatives(body, xg))
        self.frame = BoundaryFrame.on_body(body, xg)
        x0 = R2 * ray
        self.gamma0 = _Nodes(x0, np.full(n, R2 * dang), psi_derivatives(body, x0))
        self.outer_normal = ray
        dnu_psi0 = np.sum(self.gamma0.psi[1] * ray, axis=-1)
        self.gamma_star = dnu_psi0 >= 0.0
        self.gamma1_dnu_psi = self.frame.dnu(self.gamma1.psi[1])

        T, eps = params.T, resolution.eps
        half = 0.5 * T - eps * T
        tl, wl = _gl_panels(_graded_edges(resolution.time_levels, half), resolution.order)
        self.times = np.concatenate([eps * T + tl, T - eps * T - tl[::-1]])
        self.time_weights = np.concatenate([wl, wl[::-1]])
        self.phi_min = 4.0 * (params.alpha - max_exp_weight(body, params.lam, R2)) / T**2

    def omega_mask(self, eps):
        """Bulk nodes within distance ``eps`` of Gamma*."""
        if np.all(self.gamma_star):
            return (self.params.outer_radius - self.bulk_radius) <= eps * (1 + 1e-12)
        pts = self.gamma0.x[self.gamma_star]
        if pts.size == 0:
            return np.zeros(self.bulk_radius.shape, bool)
        dist = np.min(np.linalg.norm(self.bulk.x[:, None, :] - pts[None], axis=-1), axis=1)
        return dist <= eps


@dataclass
class CarlemanEntry:
    s: float
    lam: float
    test: str
    observation: str
    terms: dict
    lhs: float
    rhs: float
    ratio: float
    delta_gt_d: bool
    log_scale: float = 0.0
    meta: dict = field(default_factory=dict)

    def row(self):
        return ([self.s, self.lam, self.test, self.observation]
                + [self.terms[k] for k in TERM_NAMES]
                + [self.lhs, self.rhs, self.ratio, self.delta_gt_d, self.log_scale])


ROW_HEADER = (["s", "lambda", "test", "observation"] + list(TERM_NAMES)
              + ["lhs", "rhs", "ratio", "delta_gt_d", "log_scale"])


def carleman_sides(params: CarlemanParams, coeffs: CarlemanCoefficients, test: TestFunction,
                   observation=None, resolution: QuadratureResolution | None = None,
                   quadrature: CarlemanQuadrature | None = None) -> CarlemanEntry:
    """Evaluate every term of the boundary or interior-observation inequality."""
    observation = observation or BoundaryObservation()
    resolution = resolution or QuadratureResolution()
    interior = observation.kind == "interior"
    if quadrature is None:
        quadrature = CarlemanQuadrature(params, resolution,
                                        observation.eps if interior else None)
    q = quadrature
    if not coeffs.delta_gt_d:
        log.warning("delta <= d: the Gamma_1 tangential term is not controlled (run tagged)")
    s, lam, d, delta = params.s, params.lam, coeffs.d, coeffs.delta
    omega = q.omega_mask(observation.eps) if interior else None
    acc = dict.fromkeys(TERM_NAMES, 0.0)
    phi_ref = q.phi_min
    # Gamma_1 is the level set psi = 1, accumulated on its own scale first
    phi_ref_g = 4.0 * (params.alpha - np.exp(lam)) / params.T**2
    gamma_terms = ("gamma_v", "gamma_dnu", "gamma_tangential", "gamma_tangential_weighted",
                   "rhs_N")

    for t, wt in zip(q.times, q.time_weights):
        # bulk
        wb = weight_eval(params, q.bulk.x, t, psi_data=q.bulk.psi)
        E = np.exp(-2.0 * s * (wb.phi - phi_ref)) * q.bulk.w * wt
        j = test.jet(q.bulk.x, t)
        v2 = np.abs(j.value) ** 2
        g2 = np.sum(np.abs(j.grad) ** 2, axis=-1)
        th = wb.theta
        big = s**3 * lam**4 * th**3 * v2
        grad = s * lam * th * g2
        acc["bulk_v"] += np.sum(E * big)
        acc["bulk_grad"] += np.sum(E * grad)
        acc["bulk_dpsi"] += np.sum(E * s * lam**2 * th
                                   * np.abs(np.sum(wb.grad_psi * j.grad, axis=-1)) ** 2)
        acc["rhs_L"] += np.sum(E * np.abs(bulk_operator(coeffs, j, q.bulk.x, t)) ** 2)
        if interior:
            acc["rhs_obs"] += np.sum((E * (big + grad))[omega])

        # Gamma_1
        wg = weight_eval(params, q.gamma1.x, t, psi_data=q.gamma1.psi)
        Eg = np.exp(-2.0 * s * (wg.phi - phi_ref_g)) * q.gamma1.w * wt
        jg = test.jet(q.gamma1.x, t)
        thg = wg.theta
        tang2 = np.sum(np.abs(q.frame.tangential(jg.grad)) ** 2, axis=-1)
        acc["gamma_v"] += np.sum(Eg * s**3 * lam**3 * thg**3 * np.abs(jg.value) ** 2)
        acc["gamma_dnu"] += np.sum(Eg * s * lam * thg * np.abs(q.frame.dnu(jg.grad)) ** 2)
        acc["gamma_tangential"] += np.sum(Eg * s * lam * thg * tang2)
        acc["gamma_tangential_weighted"] += np.sum(
            Eg * d * (delta - d) * np.abs(q.gamma1_dnu_psi) * s * lam * thg * tang2)
        acc["rhs_N"] += np.sum(
            Eg * np.abs(boundary_operator(coeffs, jg, q.gamma1.x, t, q.frame)) ** 2)

        # Gamma* on Gamma_0
        if not interior:
            w0 = weight_eval(params, q.gamma0.x, t, psi_data=q.gamma0.psi)
            E0 = np.exp(-2.0 * s * (w0.phi - phi_ref)) * q.gamma0.w * wt
            j0 = test.jet(q.gamma0.x, t)
            dnu = np.sum(j0.grad * q.outer_normal, axis=-1)
            acc["rhs_obs"] += np.sum((E0 * s * lam * w0.theta * np.abs(dnu) ** 2)[q.gamma_star])

    shift = np.exp(-2.0 * s * (phi_ref_g - phi_ref))
    for k in gamma_terms:
        acc[k] *= shift
    terms = {k: float(v) for k, v in acc.items()}
    lhs = terms["bulk_v"] + terms["bulk_grad"] + terms["gamma_v"] + terms["gamma_dnu"] \
        + terms["gamma_tangential"]
    if not interior:
        lhs += terms["bulk_dpsi"]
    rhs = terms["rhs_L"] + terms["rhs_N"] + terms["rhs_obs"]
    ratio = 0.0 if rhs == 0.0 and lhs == 0.0 else (np.inf if rhs == 0.0 else lhs / rhs)
    return CarlemanEntry(s, lam, test.name, observation.kind, terms, lhs, rhs, float(ratio),
                         coeffs.delta_gt_d, float(-2.0 * s * phi_ref))
