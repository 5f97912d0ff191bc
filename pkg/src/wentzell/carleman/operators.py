"""Pointwise Schrodinger operators and their conjugated decomposition.

    L(v) = i v_t + d Lap v + q1 . grad v + q0 v                       (bulk)
    N(v) = i v_t - d dnu v + delta Lap_G v + qG1 . grad_G v + qG0 v   (Gamma_1)

With ``v = exp(s phi) w`` one has ``exp(-s phi) L(v) = P1 w + P2 w + R w`` and
``exp(-s phi) N(v) = Q1 w + Q2 w + R_G w``, the latter because ``phi`` is
constant along Gamma_1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..geometry import CarlemanParams, ConvexBody, weight_eval
from .testfunctions import Jet, TestFunction


def _zero(x, t):
    return np.zeros(np.shape(x)[:-1], complex)


def _zero_vec(x, t):
    return np.zeros(np.shape(x), complex)


@dataclass(frozen=True)
class CarlemanCoefficients:
    """Coefficients of ``L`` and ``N`` in the general (complex first-order) form."""

    d: float
    delta: float
    q1: Callable = _zero_vec
    q0: Callable = _zero
    q_gamma1: Callable = _zero_vec
    q_gamma0: Callable = _zero

    @property
    def delta_gt_d(self) -> bool:
        return self.delta > self.d

    @classmethod
    def from_coefficient_set(cls, c):
        """The reduced drift form ``+ i r . grad`` is ``q1 = i r``."""
        return cls(c.d, c.delta,
                   q1=lambda x, t: 1j * np.asarray(c.drift(x, t)),
                   q0=lambda x, t: np.asarray(c.q0(x, t), complex),
                   q_gamma1=lambda x, t: 1j * np.asarray(c.drift(x, t)),
                   q_gamma0=lambda x, t: np.asarray(c.q_gamma0(x, t), complex))


@dataclass
class BoundaryFrame:
    """Outward normal of Omega on Gamma_1 (into the body) and the curvature."""

    nu: np.ndarray
    kappa: np.ndarray

    @classmethod
    def on_body(cls, body: ConvexBody, x):
        _, g, h = body.gauge_derivatives(x)
        norm = np.linalg.norm(g, axis=-1)
        n_out = g / norm[..., None]  # outward for the body
        lap = np.trace(h, axis1=-2, axis2=-1)
        nhn = np.einsum("...i,...ij,...j->...", n_out, h, n_out)
        return cls(-n_out, (lap - nhn) / norm)

    def dnu(self, grad):
        return np.sum(grad * self.nu, axis=-1)

    def tangential(self, grad):
        return grad - self.dnu(grad)[..., None] * self.nu

    def laplace_beltrami(self, jet: Jet):
        """``Lap_G f = Lap f - nu^T D^2 f nu + kappa dnu f``."""
        nhn = np.einsum("...i,...ij,...j->...", self.nu, jet.hess, self.nu)
        return jet.lap - nhn + self.kappa * self.dnu(jet.grad)


def bulk_operator(coeffs: CarlemanCoefficients, jet: Jet, x, t):
    return (1j * jet.dt + coeffs.d * jet.lap + np.sum(coeffs.q1(x, t) * jet.grad, axis=-1)
            + coeffs.q0(x, t) * jet.value)


def boundary_operator(coeffs: CarlemanCoefficients, jet: Jet, x, t, frame: BoundaryFrame):
    tang = frame.tangential(jet.grad)
    return (1j * jet.dt - coeffs.d * frame.dnu(jet.grad)
            + coeffs.delta * frame.laplace_beltrami(jet)
            + np.sum(coeffs.q_gamma1(x, t) * tang, axis=-1) + coeffs.q_gamma0(x, t) * jet.value)


def schrodinger_operators(coeffs: CarlemanCoefficients, test: TestFunction, x, t,
                          body: ConvexBody = None, x_gamma=None):
    """``(L(v)(x, t), N(v)(x_gamma, t))``; ``N`` is None without Gamma_1 points."""
    L = bulk_operator(coeffs, test.jet(x, t), x, t)
    if x_gamma is None:
        return L, None
    frame = BoundaryFrame.on_body(body, x_gamma)
    return L, boundary_operator(coeffs, test.jet(x_gamma, t), x_gamma, t, frame)


@dataclass
class Decomposition:
    P1: np.ndarray
    P2: np.ndarray
    R: np.ndarray
    Q1: np.ndarray
    Q2: np.ndarray
    RG: np.ndarray


def conjugated_decomposition(params: CarlemanParams, coeffs: CarlemanCoefficients,
                             w: TestFunction, x, t, x_gamma) -> Decomposition:
    """The six conjugated terms at bulk points ``x`` and Gamma_1 points ``x_gamma``."""
    d, delta, s = coeffs.d, coeffs.delta, params.s
    wb = weight_eval(params, x, t)
    j = w.jet(x, t)
    gphi = wb.grad_phi
    P1 = d * s**2 * np.sum(gphi**2, axis=-1) * j.value + d * j.lap + 1j * j.dt
    P2 = (d * s * wb.lap_phi * j.value + 2 * d * s * np.sum(gphi * j.grad, axis=-1)
          + 1j * s * wb.dt_phi * j.value)
    q1 = coeffs.q1(x, t)
    R = (np.sum(q1 * j.grad, axis=-1) + s * np.sum(gphi * q1, axis=-1) * j.value
         + coeffs.q0(x, t) * j.value)

    frame = BoundaryFrame.on_body(params.body, x_gamma)
    wg = weight_eval(params, x_gamma, t)
    jg = w.jet(x_gamma, t)
    Q1 = delta * frame.laplace_beltrami(jg) + 1j * jg.dt
    Q2 = -d * s * frame.dnu(wg.grad_phi) * jg.value + 1j * s * wg.dt_phi * jg.value
    qg1 = coeffs.q_gamma1(x_gamma, t)
    RG = (-d * frame.dnu(jg.grad) + np.sum(qg1 * frame.tangential(jg.grad), axis=-1)
          + s * np.sum(frame.tangential(wg.grad_phi) * qg1, axis=-1) * jg.value
          + coeffs.q_gamma0(x_gamma, t) * jg.value)
    return Decomposition(P1, P2, R, Q1, Q2, RG)
