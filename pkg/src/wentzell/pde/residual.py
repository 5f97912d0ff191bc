"""Residual of a trajectory against the original (un-gauged) equations.

Used to check the gauge change of variables: a solution of the reduced
system, multiplied back by ``exp(pi/2)``, must satisfy

    i y_t + d Lap y - q1 . grad y + q0 y = 0
    i y_t - d dnu y + delta Lap_G y - qG1 . grad_G y + qG0 y = 0

up to the truncation error of plain centred differences.  On Gamma_1 the
residual is taken in the half-cell form the scheme itself uses, i.e. the
weighted sum ``sigma * (boundary row) + W_0 * (bulk row)`` divided by
``sigma + W_0``; the normal derivative then cancels against the bulk flux
and only the stiffness form remains.
"""
from __future__ import annotations

import numpy as np

from ..mesh import AnnulusGrid, apply_boundary_laplacian, apply_bulk_laplacian
from .coefficients import GeneralCoefficients, inner_normal


def _polar_gradient(grid: AnnulusGrid, u):
    """Centred Cartesian gradient on interior rings ``1..Nr-1``."""
    r = grid.r[1:-1, None]
    th = grid.theta[None, :]
    ur = (u[2:] - u[:-2]) / (2 * grid.dr)
    ut = (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1))[1:-1] / (2 * grid.dtheta)
    gx = np.cos(th) * ur - np.sin(th) / r * ut
    gy = np.sin(th) * ur + np.cos(th) * ut / r
    return np.stack([gx, gy], axis=-1)


def _tangential_gradient(grid: AnnulusGrid, ub):
    th = grid.theta
    ds = (np.roll(ub, -1) - np.roll(ub, 1)) / (2 * grid.R1 * grid.dtheta)
    et = np.stack([-np.sin(th), np.cos(th)], axis=-1)
    return ds[:, None] * et


def _apply_original(grid: AnnulusGrid, gen: GeneralCoefficients, u, t):
    d, delta = gen.d, gen.delta
    pts = grid.points
    base = gen.reduced_drift
    lap = apply_bulk_laplacian(grid, u)[1:-1]
    grad = _polar_gradient(grid, u)
    q1 = gen.q1(pts[1:-1], t)
    bulk = d * lap - np.sum(q1 * grad, axis=-1) + base.q0(pts[1:-1], t) * u[1:-1]

    x1 = pts[0]
    th = grid.theta
    nu = inner_normal(x1)
    gpi = gen.gauge.grad(x1, t)
    tang_pi = gpi - np.sum(gpi * nu, axis=-1)[:, None] * nu
    qg1 = delta * tang_pi - 1j * base.drift(x1, t)
    ub = u[0]
    grad_t = _tangential_gradient(grid, ub)
    # radial derivative on ring 0 from the one-sided stencil
    ur = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * grid.dr)
    grad0 = grad_t + ur[:, None] * np.stack([np.cos(th), np.sin(th)], axis=-1)
    w0, sig = grid.weights[0], grid.sigma_inner
    Ku = (grid.stiffness @ u.ravel()).reshape(grid.shape)[0]
    ring = (-d * Ku
            + w0 * (-np.sum(gen.q1(x1, t) * grad0, axis=-1) + base.q0(x1, t) * ub)
            + sig * (delta * apply_boundary_laplacian(grid, ub)
                     - np.sum(qg1 * grad_t, axis=-1) + base.q_gamma0(x1, t) * ub))
    return bulk, ring / (w0 + sig)


def original_residual(grid: AnnulusGrid, gen: GeneralCoefficients, frames, times):
    """Max CN-midpoint residuals ``(bulk, Gamma_1)`` of ``frames`` in the original equations."""
    frames = np.asarray(frames)
    worst_bulk = worst_bnd = 0.0
    prev = _apply_original(grid, gen, frames[0], times[0])
    for n in range(len(times) - 1):
        dt = times[n + 1] - times[n]
        cur = _apply_original(grid, gen, frames[n + 1], times[n + 1])
        du = (frames[n + 1] - frames[n]) / dt
        rb = 1j * du[1:-1] + 0.5 * (prev[0] + cur[0])
        rg = 1j * du[0] + 0.5 * (prev[1] + cur[1])
        worst_bulk = max(worst_bulk, float(np.max(np.abs(rb))))
        worst_bnd = max(worst_bnd, float(np.max(np.abs(rg))))
        prev = cur
    return worst_bulk, worst_bnd
