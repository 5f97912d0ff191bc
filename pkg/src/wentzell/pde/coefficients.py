"""Coefficient sets for the reduced Wentzell system and a small preset library.

The reduced system has a real drift ``r`` and complex potentials::

    i y_t + d Lap y + i r . grad y + q0 y = 0                    in Omega
    i y_t - d dnu y + delta Lap_G y + i r . grad_G y + qG0 y = 0 on Gamma_1

Fields are callables ``f(x, t)`` with ``x`` of shape ``(..., 2)``.  On
Gamma_1 (the inner circle of the annulus) the outward normal is ``-x/|x|``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from ..errors import ContractError

log = logging.getLogger(__name__)


def _zero(x, t):
    return np.zeros(np.shape(x)[:-1])


def _zero_vec(x, t):
    return np.zeros(np.shape(x))


def inner_normal(x):
    x = np.asarray(x, dtype=float)
    return -x / np.hypot(x[..., 0], x[..., 1])[..., None]


@dataclass(frozen=True)
class CoefficientSet:
    d: float
    delta: float
    drift: Callable = _zero_vec
    div_drift: Optional[Callable] = _zero
    div_gamma_drift: Optional[Callable] = _zero
    q0: Callable = _zero
    q_gamma0: Callable = _zero
    time_dependent: bool = False
    name: str = "custom"
    divergence_fallback: bool = False

    def __post_init__(self):
        if not (self.d > 0 and self.delta > 0):
            raise ContractError("d and delta must be positive")

    @property
    def delta_gt_d(self) -> bool:
        return self.delta > self.d

    def potentials(self, x, t):
        return np.asarray(self.q0(x, t), dtype=complex)

    def is_conservative(self, points, t=0.0, tol=1e-14) -> bool:
        """Zero drift and real potentials at the sampled points."""
        r = np.asarray(self.drift(points, t))
        q = np.asarray(self.q0(points, t), dtype=complex)
        qg = np.asarray(self.q_gamma0(points[0], t), dtype=complex)
        return (np.max(np.abs(r)) <= tol and np.max(np.abs(q.imag)) <= tol
                and np.max(np.abs(qg.imag)) <= tol)

    def check_inflow(self, R1, R2, n=256, t=0.0, tol=1e-12) -> bool:
        """``r . nu <= 0`` on both boundary circles."""
        ang = np.linspace(0, 2 * np.pi, n, endpoint=False)
        ray = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        out = np.sum(self.drift(R2 * ray, t) * ray, axis=-1)
        inn = -np.sum(self.drift(R1 * ray, t) * ray, axis=-1)
        return bool(np.all(out <= tol) and np.all(inn <= tol))


def adjoint_coefficients(coeffs: CoefficientSet) -> CoefficientSet:
    """Potentials of the backward adjoint system.

    ``q = i div r + conj(q0)`` and ``qG = i divG rG - i r.nu + conj(qG0)``;
    ``d``, ``delta`` and the drift are unchanged.
    """
    if coeffs.div_drift is None or coeffs.div_gamma_drift is None:
        raise ContractError("adjoint coefficients need divergence data for the drift")
    c = coeffs

    def q(x, t):
        return 1j * c.div_drift(x, t) + np.conj(c.q0(x, t))

    def qg(x, t):
        rnu = np.sum(c.drift(x, t) * inner_normal(x), axis=-1)
        return 1j * c.div_gamma_drift(x, t) - 1j * rnu + np.conj(c.q_gamma0(x, t))

    return replace(coeffs, q0=q, q_gamma0=qg, name=f"adjoint({coeffs.name})")


def finite_difference_divergence(drift: Callable, h: float = 1e-6) -> Callable:
    """Central-difference divergence, for drifts supplied without one."""

    def div(x, t):
        x = np.asarray(x, dtype=float)
        e0 = np.array([h, 0.0])
        e1 = np.array([0.0, h])
        return ((drift(x + e0, t)[..., 0] - drift(x - e0, t)[..., 0])
                + (drift(x + e1, t)[..., 1] - drift(x - e1, t)[..., 1])) / (2 * h)

    return div


# ---------------------------------------------------------------------------
# general first-order form and the gauge change of variables


@dataclass(frozen=True)
class GaugeField:
    """Real gauge ``pi`` with derivatives: ``value, grad, hess, dt`` callables."""

    value: Callable
    grad: Callable
    hess: Callable
    dt: Callable = _zero


@dataclass(frozen=True)
class GeneralCoefficients:
    """First-order coefficients ``q1 = d grad pi - i r``, ``qG1 = delta gradG pi - i r``.

    The original system reads ``i y_t + d Lap y - q1 . grad y + q0 y = 0`` with
    the matching Gamma_1 row.
    """

    reduced_drift: CoefficientSet
    gauge: GaugeField

    @property
    def d(self):
        return self.reduced_drift.d

    @property
    def delta(self):
        return self.reduced_drift.delta

    def q1(self, x, t):
        return self.d * self.gauge.grad(x, t) - 1j * self.reduced_drift.drift(x, t)

    def q0(self, x, t):
        return self.reduced_drift.q0(x, t)


def _gauge_boundary_terms(gauge: GaugeField, x, t, R1):
    nu = inner_normal(x)
    g = gauge.grad(x, t)
    H = gauge.hess(x, t)
    dnu = np.sum(g * nu, axis=-1)
    tang = g - dnu[..., None] * nu
    lap = np.trace(H, axis1=-2, axis2=-1)
    nHn = np.einsum("...i,...ij,...j->...", nu, H, nu)
    # Lap_G = Lap - d_nu nu - (div nu) d_nu with div nu = -1/R1 on the circle
    lap_g = lap - nHn + dnu / R1
    return dnu, tang, lap_g


def reduce_gauge(general: GeneralCoefficients, R1: float) -> CoefficientSet:
    """Coefficients of the equation solved by ``y~ = exp(-pi/2) y``."""
    base = general.reduced_drift
    d, delta, gauge = base.d, base.delta, general.gauge

    def q0(x, t):
        g = gauge.grad(x, t)
        lap = np.trace(gauge.hess(x, t), axis1=-2, axis2=-1)
        r = base.drift(x, t)
        return (base.q0(x, t) + 0.5j * gauge.dt(x, t) + 0.5 * d * lap
                - 0.25 * d * np.sum(g * g, axis=-1) + 0.5j * np.sum(r * g, axis=-1))

    def qg0(x, t):
        dnu, tang, lap_g = _gauge_boundary_terms(gauge, x, t, R1)
        r = base.drift(x, t)
        return (base.q_gamma0(x, t) + 0.5j * gauge.dt(x, t) - 0.5 * d * dnu
                + 0.5 * delta * lap_g - 0.25 * delta * np.sum(tang * tang, axis=-1)
                + 0.5j * np.sum(r * tang, axis=-1))

    return replace(base, q0=q0, q_gamma0=qg0, name=f"gauge-reduced({base.name})")


def gauge_transform(obj, pi, direction="forward", pi_gamma=None, R1=None, tol=1e-12):
    """Apply ``exp(-pi/2)`` (forward) or ``exp(+pi/2)`` (inverse).

    ``obj`` is a field array, a :class:`~wentzell.mesh.FieldPair`, a stack of
    frames, or a :class:`GeneralCoefficients` (which is reduced, forward only).
    """
    if isinstance(obj, GeneralCoefficients):
        if direction != "forward":
            raise ContractError("only the forward coefficient transform is defined")
        if R1 is None:
            raise ContractError("reducing coefficients needs the inner radius R1")
        return reduce_gauge(obj, R1)
    from ..mesh import FieldPair

    pi = np.asarray(pi, dtype=float)
    if pi_gamma is not None and np.max(np.abs(pi[..., 0, :] - pi_gamma)) > tol:
        raise ContractError("gauge trace mismatch: pi != pi_Gamma on Gamma_1")
    sign = {"forward": -0.5, "inverse": 0.5}.get(direction)
    if sign is None:
        raise ContractError("direction must be 'forward' or 'inverse'")
    factor = np.exp(sign * pi)
    if isinstance(obj, FieldPair):
        return FieldPair(obj.bulk * factor)
    return np.asarray(obj) * factor


# ---------------------------------------------------------------------------
# presets


def zero_preset(d=1.0, delta=2.0):
    return CoefficientSet(d, delta, name="zero")


def real_well_preset(d=1.0, delta=2.0, depth=2.0, width=0.5, center=(1.5, 0.0)):
    """Real Gaussian well; the Gamma_1 potential is the trace of the bulk one."""
    c = np.asarray(center, dtype=float)

    def q0(x, t):
        return -depth * np.exp(-np.sum((np.asarray(x) - c) ** 2, axis=-1) / width**2)

    return CoefficientSet(d, delta, q0=q0, q_gamma0=q0, name="real_well")


def rotation_drift_preset(d=1.0, delta=2.0, omega=0.7):
    """Rigid rotation ``r = omega (-x2, x1)``: divergence free and tangent to both circles."""

    def drift(x, t):
        x = np.asarray(x, dtype=float)
        return omega * np.stack([-x[..., 1], x[..., 0]], axis=-1)

    return CoefficientSet(d, delta, drift=drift, name="rotation_drift")


def inward_drift_preset(d=1.0, delta=2.0, beta=0.4, omega=0.5, R1=1.0, R2=2.0, amp=0.3):
    """Rotation plus a radial drift ``-beta (r - R1)`` and a complex potential.

    The drift is tangent to Gamma_1 and points into the domain on Gamma_0.
    """

    def drift(x, t):
        x = np.asarray(x, dtype=float)
        r = np.hypot(x[..., 0], x[..., 1])
        rot = omega * np.stack([-x[..., 1], x[..., 0]], axis=-1)
        return rot + (-beta * (r - R1) / r)[..., None] * x

    def div(x, t):
        x = np.asarray(x, dtype=float)
        r = np.hypot(x[..., 0], x[..., 1])
        # div(f(r) x/r) = f' + f/r with f = -beta (r - R1)
        return -beta - beta * (r - R1) / r

    def q0(x, t):
        x = np.asarray(x, dtype=float)
        return amp * (np.cos(x[..., 0]) + 0.5j * np.sin(x[..., 1]))

    return CoefficientSet(d, delta, drift=drift, div_drift=div, q0=q0, q_gamma0=q0,
                          name="inward_drift")


def complex_potential_preset(d=1.0, delta=2.0, amp=0.5):
    def q0(x, t):
        x = np.asarray(x, dtype=float)
        return amp * (x[..., 0] + 1j * x[..., 1] ** 2) * (1.0 + 0.3 * np.cos(2.0 * t))

    def qg(x, t):
        x = np.asarray(x, dtype=float)
        return 0.5 * amp * (1.0 - 1j * x[..., 0]) * (1.0 + 0.3 * np.cos(2.0 * t))

    return CoefficientSet(d, delta, q0=q0, q_gamma0=qg, time_dependent=True,
                          name="complex_potential")


def gauge_example(d=1.0, delta=2.0, kx=1.0):
    """``pi = kx * x1`` with no drift, in general (un-gauged) form."""
    base = CoefficientSet(d, delta, name="gauge_example")

    def value(x, t):
        return kx * np.asarray(x)[..., 0]

    def grad(x, t):
        x = np.asarray(x)
        g = np.zeros(x.shape)
        g[..., 0] = kx
        return g

    def hess(x, t):
        return np.zeros(np.shape(x)[:-1] + (2, 2))

    return GeneralCoefficients(base, GaugeField(value, grad, hess))


PRESETS = {
    "zero": zero_preset,
    "real_well": real_well_preset,
    "rotation_drift": rotation_drift_preset,
    "inward_drift": inward_drift_preset,
    "complex_potential": complex_potential_preset,
}


def make_preset(name: str, d: float, delta: float, R1: float = 1.0, R2: float = 2.0, **kw):
    if name == "gauge_example":
        return reduce_gauge(gauge_example(d, delta, **kw), R1)
    if name not in PRESETS:
        raise ContractError(f"unknown coefficient preset {name!r}")
    if name == "inward_drift":
        kw.setdefault("R1", R1)
        kw.setdefault("R2", R2)
    return PRESETS[name](d, delta, **kw)
