"""Assembly of the discrete Wentzell generator.

Testing the equations against the bulk weights and the Gamma_1 arc lengths
gives ``i M dU/dt = H U`` on the node vector, with

    H = d K + delta B - i (C + C_G) - diag(P).

``K`` and ``B`` are the bulk and tangential stiffness forms, ``C`` and
``C_G`` are real skew finite-volume drift forms and ``P`` collects the
potentials together with the half-divergence corrections that make the
drift skew.  For the adjoint potentials the assembled matrix is exactly
``H^H``, which is what the duality test checks.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..errors import ContractError
from ..mesh import AnnulusGrid
from .coefficients import CoefficientSet, inner_normal


def _polar_points(r, theta):
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)


def _skew(a, b, flux, n):
    """Sparse ``C`` with ``C[a, b] = flux/2`` and ``C[b, a] = -flux/2``."""
    rows = np.concatenate([a, b])
    cols = np.concatenate([b, a])
    vals = np.concatenate([0.5 * flux, -0.5 * flux])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def drift_form(grid: AnnulusGrid, coeffs: CoefficientSet, t: float) -> sp.csr_matrix:
    """Bulk skew drift form built from face fluxes ``r . n |face|``."""
    g = grid
    Nr, Nt, dr, dt = g.Nr, g.Ntheta, g.dr, g.dtheta
    n = g.n_nodes
    # radial faces between rings j and j+1
    rh = g.r[:-1] + 0.5 * dr
    R, TH = np.meshgrid(rh, g.theta, indexing="ij")
    v = coeffs.drift(_polar_points(R, TH), t)
    er = np.stack([np.cos(TH), np.sin(TH)], axis=-1)
    fr = np.sum(v * er, axis=-1) * R * dt
    jj, kk = np.meshgrid(np.arange(Nr), np.arange(Nt), indexing="ij")
    C = _skew(g.index(jj, kk).ravel(), g.index(jj + 1, kk).ravel(), fr.ravel(), n)
    # angular faces between k and k+1 on every ring; the face length is the
    # radial extent of the control volume (halved on the boundary rings)
    th = g.theta + 0.5 * dt
    R, TH = np.meshgrid(g.r, th, indexing="ij")
    v = coeffs.drift(_polar_points(R, TH), t)
    et = np.stack([-np.sin(TH), np.cos(TH)], axis=-1)
    extent = g.weights[:, :1] / (R * dt)
    fa = np.sum(v * et, axis=-1) * extent
    jj, kk = np.meshgrid(np.arange(Nr + 1), np.arange(Nt), indexing="ij")
    C = C + _skew(g.index(jj, kk).ravel(), g.index(jj, kk + 1).ravel(), fa.ravel(), n)
    return C.tocsr()


def boundary_drift_form(grid: AnnulusGrid, coeffs: CoefficientSet, t: float) -> sp.csr_matrix:
    """Skew tangential drift form on Gamma_1 (ring 0)."""
    g = grid
    th = g.theta + 0.5 * g.dtheta
    x = _polar_points(g.R1, th)
    et = np.stack([-np.sin(th), np.cos(th)], axis=-1)
    f = np.sum(coeffs.drift(x, t) * et, axis=-1)
    k = np.arange(g.Ntheta)
    return _skew(k, (k + 1) % g.Ntheta, f, g.n_nodes).tocsr()


def potential_diagonal(grid: AnnulusGrid, coeffs: CoefficientSet, t: float) -> np.ndarray:
    """Node diagonal ``W (q0 - i/2 div r) + sigma (qG0 - i/2 divG r + i/2 r.nu)``."""
    g = grid
    pts = g.points
    q = np.asarray(coeffs.q0(pts, t), dtype=complex)
    div = np.asarray(coeffs.div_drift(pts, t), dtype=float)
    P = g.weights * (q - 0.5j * div)
    x1 = pts[0]
    qg = np.asarray(coeffs.q_gamma0(x1, t), dtype=complex)
    divg = np.asarray(coeffs.div_gamma_drift(x1, t), dtype=float)
    rnu = np.sum(coeffs.drift(x1, t) * inner_normal(x1), axis=-1)
    P[0] = P[0] + g.sigma_inner * (qg - 0.5j * divg + 0.5j * rnu)
    return P.ravel()


def generator(grid: AnnulusGrid, coeffs: CoefficientSet, t: float = 0.0) -> sp.csr_matrix:
    """Full node-space matrix ``H`` (rows and columns over all nodes)."""
    if coeffs.div_drift is None or coeffs.div_gamma_drift is None:
        raise ContractError("drift divergences are required to assemble the generator")
    H = coeffs.d * grid.stiffness + coeffs.delta * grid.boundary_stiffness
    H = H.astype(complex) - 1j * (drift_form(grid, coeffs, t) + boundary_drift_form(grid, coeffs, t))
    H = H - sp.diags(potential_diagonal(grid, coeffs, t))
    return H.tocsr()


@dataclass(frozen=True)
class GeneratorBlocks:
    """Unknown/unknown and unknown/Gamma_0 blocks of ``H`` at one time."""

    II: sp.csr_matrix
    IB: sp.csr_matrix

    @classmethod
    def assemble(cls, grid: AnnulusGrid, coeffs: CoefficientSet, t: float):
        H = generator(grid, coeffs, t)
        n = grid.n_unknowns
        return cls(H[:n, :n].tocsc(), H[:n, n:].tocsr())


def check_coefficients(grid: AnnulusGrid, coeffs: CoefficientSet, t: float = 0.0, tol=1e-12):
    """Sampled check that the drift is tangent to Gamma_1 (``r = r_G`` there)."""
    x1 = grid.points[0]
    rnu = np.sum(coeffs.drift(x1, t) * inner_normal(x1), axis=-1)
    scale = max(1.0, float(np.max(np.abs(coeffs.drift(grid.points, t)))))
    if np.max(np.abs(rnu)) > tol * scale:
        raise ContractError("drift has a normal component on Gamma_1; r must equal r_Gamma there")
