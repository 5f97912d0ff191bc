"""Polar tensor grid on the annulus and its conservation-form operators.

Nodes sit at radii ``r_j = R1 + j dr`` (``j = 0..Nr``) and angles
``theta_k = k dtheta`` (periodic).  Ring ``j = 0`` is Gamma_1 (dynamic
boundary), ring ``j = Nr`` is Gamma_0 (Dirichlet).  Fields are complex
arrays of shape ``(Nr + 1, Ntheta)``; flattening is C-ordered, so the
unknowns of the evolution problem (rings ``0..Nr-1``) are the leading
``Nr * Ntheta`` entries.

Everything is derived from one symmetric stiffness form ``K`` (radial fluxes
through half nodes plus periodic angular differences).  The bulk Laplacian,
the normal derivative and the quadrature weights are tied together so that

    <Lap_h u, v>_Omega + v^H K u = <dnu_h u, v>_{boundary}

holds to rounding for every pair of fields.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ContractError


@dataclass(frozen=True)
class AnnulusGrid:
    R1: float
    R2: float
    Nr: int
    Ntheta: int

    def __post_init__(self):
        if not (0 < self.R1 < self.R2):
            raise ContractError(f"need 0 < R1 < R2, got {self.R1}, {self.R2}")
        if self.Nr < 8:
            raise ContractError("Nr must be at least 8")
        if self.Ntheta < 16 or self.Ntheta % 2:
            raise ContractError("Ntheta must be even and at least 16")

    # -- geometry -------------------------------------------------------
    @property
    def dr(self) -> float:
        return (self.R2 - self.R1) / self.Nr

    @property
    def dtheta(self) -> float:
        return 2.0 * np.pi / self.Ntheta

    @property
    def shape(self):
        return (self.Nr + 1, self.Ntheta)

    @property
    def n_nodes(self) -> int:
        return (self.Nr + 1) * self.Ntheta

    @property
    def n_unknowns(self) -> int:
        return self.Nr * self.Ntheta

    @cached_property
    def r(self) -> np.ndarray:
        return self.R1 + self.dr * np.arange(self.Nr + 1)

    @cached_property
    def theta(self) -> np.ndarray:
        return self.dtheta * np.arange(self.Ntheta)

    @cached_property
    def points(self) -> np.ndarray:
        rr, tt = np.meshgrid(self.r, self.theta, indexing="ij")
        return np.stack([rr * np.cos(tt), rr * np.sin(tt)], axis=-1)

    @cached_property
    def weights(self) -> np.ndarray:
        """Bulk quadrature weights (trapezoid in r, periodic in theta)."""
        w = self.r * self.dr * self.dtheta
        w[0] *= 0.5
        w[-1] *= 0.5
        return np.repeat(w[:, None], self.Ntheta, axis=1)

    @property
    def sigma_inner(self) -> float:
        return self.R1 * self.dtheta

    @property
    def sigma_outer(self) -> float:
        return self.R2 * self.dtheta

    @cached_property
    def boundary_weights(self) -> np.ndarray:
        s = np.zeros(self.shape)
        s[0] = self.sigma_inner
        s[-1] = self.sigma_outer
        return s

    # -- assembled forms --------------------------------------------------
    def index(self, j, k):
        return j * self.Ntheta + np.mod(k, self.Ntheta)

    @cached_property
    def stiffness(self) -> sp.csr_matrix:
        """Dirichlet form ``a(u, v) = v^H K u`` over all nodes."""
        Nr, Nt, dr, dt = self.Nr, self.Ntheta, self.dr, self.dtheta
        jj, kk = np.meshgrid(np.arange(Nr), np.arange(Nt), indexing="ij")
        rad_a = self.index(jj, kk).ravel()
        rad_b = self.index(jj + 1, kk).ravel()
        rad_c = np.repeat((self.r[:-1] + 0.5 * dr) * dt / dr, Nt)
        jj, kk = np.meshgrid(np.arange(Nr + 1), np.arange(Nt), indexing="ij")
        ang_a = self.index(jj, kk).ravel()
        ang_b = self.index(jj, kk + 1).ravel()
        ang_c = np.repeat(self.weights[:, 0] / (self.r**2 * dt**2), Nt)
        a = np.concatenate([rad_a, ang_a])
        b = np.concatenate([rad_b, ang_b])
        c = np.concatenate([rad_c, ang_c])
        rows = np.concatenate([a, a, b, b])
        cols = np.concatenate([a, b, a, b])
        vals = np.concatenate([c, -c, -c, c])
        n = self.n_nodes
        return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))

    @cached_property
    def boundary_stiffness(self) -> sp.csr_matrix:
        """Tangential Dirichlet form on Gamma_1, embedded in the full node space."""
        Nt = self.Ntheta
        c = self.sigma_inner / (self.R1 * self.dtheta) ** 2
        k = np.arange(Nt)
        kp = (k + 1) % Nt
        rows = np.concatenate([k, k, kp, kp])
        cols = np.concatenate([k, kp, k, kp])
        vals = np.concatenate([np.full(Nt, c), np.full(Nt, -c), np.full(Nt, -c), np.full(Nt, c)])
        n = self.n_nodes
        return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))

    @cached_property
    def mass(self) -> np.ndarray:
        """Diagonal of the H inner product on all nodes (bulk + Gamma_1)."""
        m = self.weights.copy()
        m[0] += self.sigma_inner
        return m.ravel()


def build_grid(R1, R2, Nr, Ntheta) -> AnnulusGrid:
    return AnnulusGrid(float(R1), float(R2), int(Nr), int(Ntheta))


@dataclass
class FieldPair:
    """Bulk field on all nodes; the Gamma_1 field is the ``j = 0`` ring."""

    bulk: np.ndarray

    def __post_init__(self):
        self.bulk = np.asarray(self.bulk, dtype=complex)
        if self.bulk.ndim != 2:
            raise ContractError("bulk field must be a 2-d array")

    @classmethod
    def from_parts(cls, bulk, boundary=None, tol=0.0):
        bulk = np.array(bulk, dtype=complex)
        if boundary is not None and np.max(np.abs(bulk[0] - boundary), initial=0.0) > tol:
            raise ContractError("trace identification u = u_Gamma violated on Gamma_1")
        return cls(bulk)

    @classmethod
    def zeros(cls, grid: AnnulusGrid):
        return cls(np.zeros(grid.shape, dtype=complex))

    @classmethod
    def from_unknowns(cls, grid: AnnulusGrid, x, outer=None):
        b = np.zeros(grid.shape, dtype=complex)
        b[:-1] = np.reshape(x, (grid.Nr, grid.Ntheta))
        if outer is not None:
            b[-1] = outer
        return cls(b)

    @property
    def boundary(self) -> np.ndarray:
        return self.bulk[0]

    @property
    def unknowns(self) -> np.ndarray:
        return self.bulk[:-1].ravel()

    def copy(self):
        return FieldPair(self.bulk.copy())

    def __add__(self, other):
        return FieldPair(self.bulk + other.bulk)

    def __sub__(self, other):
        return FieldPair(self.bulk - other.bulk)

    def __mul__(self, c):
        return FieldPair(self.bulk * c)

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# operators


def normal_derivative(grid: AnnulusGrid, u, side: str):
    """Second-order one-sided normal derivative, signed by the outward normal."""
    u = np.asarray(u)
    dr = grid.dr
    if side == "inner":
        return -(-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dr)
    if side == "outer":
        return (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * dr)
    raise ContractError(f"side must be 'inner' or 'outer', got {side!r}")


def apply_bulk_laplacian(grid: AnnulusGrid, u):
    """Flux-form polar Laplacian at every node.

    Boundary rings use the half-cell balance with the normal derivative as
    the outer flux, which is what makes the discrete Green identity exact.
    """
    u = np.asarray(u)
    Ku = (grid.stiffness @ u.ravel()).reshape(grid.shape)
    out = -Ku / grid.weights
    out[0] += grid.sigma_inner * normal_derivative(grid, u, "inner") / grid.weights[0]
    out[-1] += grid.sigma_outer * normal_derivative(grid, u, "outer") / grid.weights[-1]
    return out


def apply_boundary_laplacian(grid: AnnulusGrid, ub):
    ub = np.asarray(ub)
    return (np.roll(ub, -1) - 2.0 * ub + np.roll(ub, 1)) / (grid.R1 * grid.dtheta) ** 2


def boundary_forward_difference(grid: AnnulusGrid, ub):
    return (np.roll(ub, -1) - ub) / (grid.R1 * grid.dtheta)


def bulk_inner(grid: AnnulusGrid, u, v) -> complex:
    return complex(np.sum(grid.weights * u * np.conj(v)))


def boundary_inner(grid: AnnulusGrid, u, v, side="inner") -> complex:
    s = grid.sigma_inner if side == "inner" else grid.sigma_outer
    return complex(s * np.sum(u * np.conj(v)))


def gradient_inner(grid: AnnulusGrid, u, v) -> complex:
    """Discrete ``int grad u . conj(grad v)`` over the annulus."""
    return complex(np.vdot(np.ravel(v), grid.stiffness @ np.ravel(u)))


def green_residual(grid: AnnulusGrid, u, v) -> float:
    """Relative defect of the discrete Green identity for the pair ``(u, v)``."""
    lhs = bulk_inner(grid, apply_bulk_laplacian(grid, u), v) + gradient_inner(grid, u, v)
    rhs = boundary_inner(grid, normal_derivative(grid, u, "inner"), v[0], "inner") + \
        boundary_inner(grid, normal_derivative(grid, u, "outer"), v[-1], "outer")
    scale = abs(gradient_inner(grid, u, v)) + abs(rhs) + 1e-300
    return abs(lhs - rhs) / scale


# ---------------------------------------------------------------------------
# norms


@dataclass
class NormSuite:
    """H, V and V' norms on a grid; the V Riesz operator is factorised once."""

    grid: AnnulusGrid
    _lu: object = field(default=None, repr=False)

    def __post_init__(self):
        self._lu = spla.splu(self.v_stiffness.tocsc())

    @cached_property
    def v_stiffness(self) -> sp.csr_matrix:
        """V inner product on the unknowns (bulk gradient + tangential gradient)."""
        g = self.grid
        n = g.n_unknowns
        full = (g.stiffness + g.boundary_stiffness).tocsr()
        return full[:n, :n].tocsr()

    @cached_property
    def bulk_stiffness(self) -> sp.csr_matrix:
        n = self.grid.n_unknowns
        return self.grid.stiffness.tocsr()[:n, :n].tocsr()

    @cached_property
    def mass(self) -> np.ndarray:
        return self.grid.mass[: self.grid.n_unknowns]

    def _unknowns(self, f):
        f = f.bulk if isinstance(f, FieldPair) else np.asarray(f)
        if f.ndim == 2:
            return f, f[:-1].ravel()
        return None, f

    def _solve_v(self, b):
        b = np.asarray(b)
        if np.iscomplexobj(b):
            return self._lu.solve(np.ascontiguousarray(b.real)) + 1j * self._lu.solve(
                np.ascontiguousarray(b.imag))
        return self._lu.solve(b)

    def h_norm(self, f) -> float:
        f = f.bulk if isinstance(f, FieldPair) else np.asarray(f)
        return float(np.sqrt(np.sum(self.grid.mass * np.abs(f.ravel()) ** 2)))

    def v_norm(self, f, tol=1e-12) -> float:
        full, x = self._unknowns(f)
        if full is not None:
            scale = np.max(np.abs(full), initial=0.0)
            if np.max(np.abs(full[-1])) > tol * max(scale, 1.0):
                raise ContractError("V norm requires a field vanishing on Gamma_0")
        return float(np.sqrt(max(np.vdot(x, self.v_stiffness @ x).real, 0.0)))

    def riesz(self, f) -> np.ndarray:
        """V-representative ``g`` with ``<g, v>_V = <f, v>_H`` for all discrete v."""
        _, x = self._unknowns(f)
        return self._solve_v(self.mass * x)

    def riesz_image(self, g) -> np.ndarray:
        """H-vector ``f`` with ``<f, v>_H = <g, v>_V`` (inverse of :meth:`riesz`)."""
        _, x = self._unknowns(g)
        return (self.v_stiffness @ x) / self.mass

    def v_dual_norm(self, f) -> float:
        _, x = self._unknowns(f)
        g = self._solve_v(self.mass * x)
        return float(np.sqrt(max(np.vdot(x, self.mass * g).real, 0.0)))

    def norms(self, pair):
        """``(H, V, V')`` norms of a field pair."""
        return self.h_norm(pair), self.v_norm(pair), self.v_dual_norm(pair)

    def h_inner(self, a, b) -> complex:
        _, x = self._unknowns(a)
        _, y = self._unknowns(b)
        return complex(np.vdot(y, self.mass * x))

    def v_inner(self, a, b) -> complex:
        _, x = self._unknowns(a)
        _, y = self._unknowns(b)
        return complex(np.vdot(y, self.v_stiffness @ x))

    def modes(self, m: int):
        """Lowest ``m`` discrete V-modes: ``K_V e = lam M e`` with ``e^T M e = 1``."""
        n = self.grid.n_unknowns
        if not 0 < m <= n:
            raise ContractError(f"mode count must be in 1..{n}")
        if n <= 2500 or m > n // 3:
            A = self.v_stiffness.toarray()
            vals, vecs = sla.eigh(A, np.diag(self.mass), subset_by_index=(0, m - 1))
        else:
            vals, vecs = spla.eigsh(self.v_stiffness.tocsc(), k=m, M=sp.diags(self.mass).tocsc(),
                                    sigma=0.0, which="LM")
            order = np.argsort(vals)
            vals, vecs = vals[order], vecs[:, order]
            vecs = vecs / np.sqrt(np.sum(self.mass[:, None] * vecs**2, axis=0))
        return vals, vecs


def norms(suite: NormSuite, pair: FieldPair):
    return suite.norms(pair)


def poincare_constant(grid: AnnulusGrid) -> float:
    """Smallest ``C`` with ``||(u, u_Gamma)||_H^2 <= C ||grad u||^2`` on V_h."""
    suite = NormSuite(grid)
    K = suite.bulk_stiffness.tocsc()
    n = grid.n_unknowns
    if n <= 3000:
        lam = sla.eigh(K.toarray(), np.diag(suite.mass), eigvals_only=True, subset_by_index=(0, 0))[0]
    else:
        lam = spla.eigsh(K, k=1, M=sp.diags(suite.mass).tocsc(), sigma=0.0, which="LM",
                         return_eigenvectors=False)[0]
    return float(1.0 / lam)
