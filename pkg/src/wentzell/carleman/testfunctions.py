"""Analytic test functions with hand-coded derivatives.

Every test function returns a :class:`Jet` (value, gradient, Hessian and
time derivative) at points ``x`` of shape ``(..., 2)`` and a scalar time.
Functions used in the Carleman inequality vanish on the outer circle
``|x| = R2`` (Gamma_0); on Gamma_1 the boundary field is simply the trace.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from ..errors import ContractError


@dataclass
class Jet:
    value: np.ndarray
    grad: np.ndarray
    hess: np.ndarray
    dt: np.ndarray

    @property
    def lap(self):
        return np.trace(self.hess, axis1=-2, axis2=-1)

    @classmethod
    def zeros(cls, shape):
        z = np.zeros(shape, dtype=complex)
        return cls(z, np.zeros(shape + (2,), complex), np.zeros(shape + (2, 2), complex), z.copy())


class TestFunction:
    __test__ = False  # keep pytest from collecting the class
    name = "test"
    vanishes_on_outer = True

    def jet(self, x, t) -> Jet:
        raise NotImplementedError

    def __call__(self, x, t):
        return self.jet(x, t).value

    def check_boundary(self, outer_radius, n=256, t=0.5, tol=1e-10) -> bool:
        """``v = 0`` on the sampled outer circle."""
        ang = np.linspace(0, 2 * np.pi, n, endpoint=False)
        x = outer_radius * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        return bool(np.max(np.abs(self.jet(x, t).value)) <= tol)


class ZeroFunction(TestFunction):
    name = "zero"

    def jet(self, x, t):
        return Jet.zeros(np.shape(x)[:-1])


def _temporal(t, omega):
    """``tau(t) = exp(-i omega t)`` and its derivative."""
    tau = np.exp(-1j * omega * t)
    return tau, -1j * omega * tau


class BumpFunction(TestFunction):
    """``v = (R2^2 - |x|^2) g(x) exp(-i omega t)`` with a simple factor ``g``.

    ``kind`` selects ``g``: ``"constant"`` (1), ``"linear"`` (``1 + c . x``
    with complex ``c``) or ``"wave"`` (``exp(i k . x)``).
    """

    def __init__(self, outer_radius, kind="constant", omega=1.0, c=(0.4 + 0.3j, -0.2j),
                 k=(1.5, -0.7)):
        if kind not in ("constant", "linear", "wave"):
            raise ContractError(f"unknown bump kind {kind!r}")
        self.R2, self.kind, self.omega = float(outer_radius), kind, float(omega)
        self.c = np.asarray(c, dtype=complex)
        self.k = np.asarray(k, dtype=float)
        self.name = f"bump_{kind}"

    def _factor(self, x):
        shape = x.shape[:-1]
        if self.kind == "constant":
            g = np.ones(shape, complex)
            return g, np.zeros(shape + (2,), complex), np.zeros(shape + (2, 2), complex)
        if self.kind == "linear":
            g = 1.0 + x @ self.c
            dg = np.broadcast_to(self.c, shape + (2,)).astype(complex)
            return g, dg, np.zeros(shape + (2, 2), complex)
        g = np.exp(1j * (x @ self.k))
        dg = 1j * g[..., None] * self.k
        hg = -g[..., None, None] * np.outer(self.k, self.k)
        return g, dg, hg

    def jet(self, x, t):
        x = np.asarray(x, dtype=float)
        p = self.R2**2 - np.sum(x * x, axis=-1)
        dp = -2.0 * x
        g, dg, hg = self._factor(x)
        tau, dtau = _temporal(t, self.omega)
        value = p * g
        grad = g[..., None] * dp + p[..., None] * dg
        eye = np.eye(2)
        hess = (-2.0 * g[..., None, None] * eye + dp[..., :, None] * dg[..., None, :]
                + dg[..., :, None] * dp[..., None, :] + p[..., None, None] * hg)
        return Jet(value * tau, grad * tau, hess * tau, value * dtau)


class RadialProfile(TestFunction):
    """``v = (|x| - R2) t (T - t)``: real, angle independent."""

    name = "radial_profile"

    def __init__(self, outer_radius, T):
        self.R2, self.T = float(outer_radius), float(T)

    def jet(self, x, t):
        x = np.asarray(x, dtype=float)
        r = np.hypot(x[..., 0], x[..., 1])
        er = x / r[..., None]
        g, dg = t * (self.T - t), self.T - 2.0 * t
        proj = np.eye(2) - er[..., :, None] * er[..., None, :]
        return Jet(((r - self.R2) * g).astype(complex), (er * g).astype(complex),
                   (proj / r[..., None, None] * g).astype(complex),
                   ((r - self.R2) * dg).astype(complex))


class BesselMode(TestFunction):
    """Exact time-harmonic solution ``exp(-i w t) R(r) exp(i m theta)`` on the annulus.

    With zero lower-order coefficients the bulk equation forces
    ``R = A J_m(k r) + B Y_m(k r)`` and ``w = d k^2``; ``R(R2) = 0`` fixes
    ``A, B`` and the dynamic condition on ``r = R1``,
    ``w R + d R' - delta m^2 / R1^2 R = 0``, fixes ``k`` (the ``n``-th root).
    """

    def __init__(self, R1, R2, d, delta, m=2, n=1):
        self.R1, self.R2, self.d, self.delta, self.m = float(R1), float(R2), d, delta, int(m)
        self.k = self._root(n)
        self.omega = d * self.k**2
        self.A = special.yv(self.m, self.k * self.R2)
        self.B = -special.jv(self.m, self.k * self.R2)
        self.name = f"bessel_m{m}_n{n}"

    def _radial(self, r, k=None, A=None, B=None):
        k = self.k if k is None else k
        m = self.m
        if A is None:
            A, B = special.yv(m, k * self.R2), -special.jv(m, k * self.R2)
        R = A * special.jv(m, k * r) + B * special.yv(m, k * r)
        dR = k * (A * special.jvp(m, k * r) + B * special.yvp(m, k * r))
        return R, dR

    def _condition(self, k):
        R, dR = self._radial(self.R1, k)
        return (self.d * k**2 - self.delta * self.m**2 / self.R1**2) * R + self.d * dR

    def _root(self, n):
        ks = np.linspace(1e-3, 60.0, 24000)
        f = self._condition(ks)
        idx = np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)[0]
        if len(idx) < n:
            raise ContractError("could not bracket the requested Bessel root")
        i = idx[n - 1]
        return optimize.brentq(self._condition, ks[i], ks[i + 1], xtol=1e-15, rtol=1e-15)

    def jet(self, x, t):
        x = np.asarray(x, dtype=float)
        m, k = self.m, self.k
        r = np.hypot(x[..., 0], x[..., 1])
        th = np.arctan2(x[..., 1], x[..., 0])
        R, dR = self._radial(r, A=self.A, B=self.B)
        d2R = -dR / r - (k**2 - m**2 / r**2) * R
        e = np.exp(1j * m * th)
        f, fr, ft = R * e, dR * e, 1j * m * R * e
        frr, frt, ftt = d2R * e, 1j * m * dR * e, -m**2 * R * e
        er = np.stack([np.cos(th), np.sin(th)], axis=-1)
        et = np.stack([-np.sin(th), np.cos(th)], axis=-1)
        grad = fr[..., None] * er + (ft / r)[..., None] * et
        rr = er[..., :, None] * er[..., None, :]
        tt = et[..., :, None] * et[..., None, :]
        rt = er[..., :, None] * et[..., None, :] + et[..., :, None] * er[..., None, :]
        hess = (frr[..., None, None] * rr + (fr / r + ftt / r**2)[..., None, None] * tt
                + (frt / r - ft / r**2)[..., None, None] * rt)
        tau = np.exp(-1j * self.omega * t)
        return Jet(f * tau, grad * tau, hess * tau, -1j * self.omega * f * tau)


class WeightedFunction(TestFunction):
    """``v = exp(s phi) w`` with every derivative divided by ``exp(s phi)``.

    Applying a linear differential operator to this jet yields
    ``exp(-s phi) L(exp(s phi) w)`` without forming the exponential.
    """

    def __init__(self, w: TestFunction, params, psi_data=None):
        self.w, self.params, self.psi_data = w, params, psi_data
        self.name = f"weighted({w.name})"

    def jet(self, x, t):
        from ..geometry import weight_eval

        wb = weight_eval(self.params, x, t, psi_data=self.psi_data)
        s = self.params.s
        j = self.w.jet(x, t)
        gphi = wb.grad_phi
        grad = j.grad + s * gphi * j.value[..., None]
        hess = (j.hess + s * (gphi[..., :, None] * j.grad[..., None, :]
                              + j.grad[..., :, None] * gphi[..., None, :])
                + s * wb.hess_phi * j.value[..., None, None]
                + s**2 * gphi[..., :, None] * gphi[..., None, :] * j.value[..., None, None])
        return Jet(j.value, grad, hess, j.dt + s * wb.dt_phi * j.value)


def default_family(outer_radius):
    """The three smooth members used by the sweep."""
    return [BumpFunction(outer_radius, "constant", omega=1.0),
            BumpFunction(outer_radius, "linear", omega=2.0),
            BumpFunction(outer_radius, "wave", omega=0.5)]


FAMILY = {"bump_constant": "constant", "bump_linear": "linear", "bump_wave": "wave"}


def make_test_function(name, outer_radius, **kw) -> TestFunction:
    if name in FAMILY:
        return BumpFunction(outer_radius, FAMILY[name], **kw)
    if name == "zero":
        return ZeroFunction()
    raise ContractError(f"unknown test function {name!r}")
