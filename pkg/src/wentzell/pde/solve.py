"""Crank-Nicolson forward and adjoint solvers.

Forward step, with ``H`` sampled at ``t_{n+1/2}``::

    (M + i dt H/2) U^{n+1} = (M - i dt H/2) U^n - i dt (H_IB hbar + M gbar)

where ``hbar`` is the endpoint average of the Dirichlet data on Gamma_0 and
``gbar`` that of the forcing.  The adjoint runs backward with ``H^H``, which
is the generator assembled from the adjoint potentials.  With these two
steppers the transposition identity

    i <y^N, phi^N>_M = d dt sum_n sum_{Gamma_0} sigma hbar conj(obs(phibar))

holds to rounding, ``obs(phi) = (H^H)_{BI} phi / (d sigma)`` being the
discrete normal derivative implied by the scheme.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import ContractError, SolverBreakdown
from ..mesh import AnnulusGrid, FieldPair, normal_derivative
from .coefficients import CoefficientSet, adjoint_coefficients
from .operators import GeneratorBlocks, check_coefficients

log = logging.getLogger(__name__)


@dataclass
class ControlSignal:
    """Dirichlet data on the Gamma_0 ring, zero off the Gamma* mask."""

    values: np.ndarray  # (Nt + 1, Ntheta)
    mask: np.ndarray  # (Ntheta,) bool
    # samples at t_{n+1/2}; when set they drive the scheme and ``values`` is display only
    midpoint_data: Optional[np.ndarray] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.values.ndim != 2 or self.values.shape[1] != self.mask.shape[0]:
            raise ContractError("control values must have shape (Nt + 1, Ntheta)")
        self.values = self.values * self.mask
        if self.midpoint_data is not None:
            mid = np.asarray(self.midpoint_data, dtype=complex)
            if mid.shape != (self.values.shape[0] - 1, self.mask.size):
                raise ContractError("midpoint samples must have shape (Nt, Ntheta)")
            self.midpoint_data = mid * self.mask

    @classmethod
    def from_midpoints(cls, mid, mask):
        """Control given by its interval-midpoint samples (as HUM produces it)."""
        mid = np.asarray(mid, dtype=complex)
        nodes = np.empty((mid.shape[0] + 1, mid.shape[1]), dtype=complex)
        nodes[0], nodes[-1] = mid[0], mid[-1]
        nodes[1:-1] = 0.5 * (mid[1:] + mid[:-1])
        return cls(nodes, mask, mid)

    @property
    def midpoint_defined(self) -> bool:
        return self.midpoint_data is not None

    @property
    def Nt(self) -> int:
        return self.values.shape[0] - 1

    @classmethod
    def zeros(cls, Nt, mask):
        mask = np.asarray(mask, dtype=bool)
        return cls(np.zeros((Nt + 1, mask.size), dtype=complex), mask)

    def midpoints(self) -> np.ndarray:
        if self.midpoint_data is not None:
            return self.midpoint_data
        return 0.5 * (self.values[1:] + self.values[:-1])


@dataclass
class Trajectory:
    grid: AnnulusGrid
    T: float
    times: np.ndarray
    frames: np.ndarray  # (Nt + 1, Nr + 1, Ntheta); only the ends if not kept
    inner_trace: Optional[np.ndarray] = None  # 3-point d_nu on Gamma_1
    outer_trace: Optional[np.ndarray] = None  # 3-point d_nu on Gamma_0
    # scheme-consistent d_nu on Gamma_0 at interval midpoints, shape (Nt, Ntheta)
    flux_trace: Optional[np.ndarray] = None
    kept: str = "all"
    meta: dict = field(default_factory=dict)

    @property
    def Nt(self) -> int:
        return self.times.size - 1

    @property
    def dt(self) -> float:
        return self.T / self.Nt

    def __len__(self):
        return self.times.size

    def field(self, n) -> FieldPair:
        if self.kept != "all" and n not in (0, self.Nt, -1):
            raise ContractError("only the end states were kept for this trajectory")
        if self.kept != "all":
            return FieldPair(self.frames[0 if n == 0 else -1])
        return FieldPair(self.frames[n])

    @property
    def initial(self) -> FieldPair:
        return FieldPair(self.frames[0])

    @property
    def final(self) -> FieldPair:
        return FieldPair(self.frames[-1])


class _Stepper:
    """CN step matrices, refactorised only for time-dependent coefficients.

    ``direction=+1`` gives ``(M + i dt H/2)`` on the new level (forward),
    ``-1`` gives ``(M - i dt H/2)`` (the backward adjoint sweep).
    """

    def __init__(self, grid, coeffs, dt, direction=1):
        self.grid, self.coeffs, self.dt = grid, coeffs, dt
        self.M = sp.diags(grid.mass[: grid.n_unknowns])
        self.sign = direction
        self._cached = None

    def blocks(self, t):
        if self._cached is not None and not self.coeffs.time_dependent:
            return self._cached
        B = GeneratorBlocks.assemble(self.grid, self.coeffs, t)
        half = 0.5j * self.sign * self.dt * B.II
        try:
            lu = spla.splu((self.M + half).tocsc())
        except RuntimeError as exc:  # exactly singular factor
            raise SolverBreakdown(f"factorisation failed at t = {t}: {exc}") from exc
        self._cached = (B, lu, (self.M - half).tocsr())
        return self._cached


def _sample(fun_or_array, grid, times, n, Nt):
    """Forcing values at time node ``n`` as a node array, or None."""
    if fun_or_array is None:
        return None
    if callable(fun_or_array):
        return np.asarray(fun_or_array(grid.points, times[n]), dtype=complex)
    arr = np.asarray(fun_or_array)
    if arr.shape[0] != Nt + 1:
        raise ContractError("forcing array must hold Nt + 1 time slices")
    return arr[n]


def _traces(grid, u):
    return normal_derivative(grid, u, "inner"), normal_derivative(grid, u, "outer")


def forward_solve(grid: AnnulusGrid, coeffs: CoefficientSet, initial: FieldPair,
                  control: Optional[ControlSignal], Nt: int, T: float = 1.0,
                  forcing=None, keep: str = "all") -> Trajectory:
    """Evolve ``i y_t + A y = g`` from ``initial`` with Dirichlet data ``1_{G*} h``.

    ``forcing`` is ``None``, a callable ``g(points, t)`` returning node arrays
    (ring 0 carries ``g_Gamma``) or an array of shape ``(Nt + 1, Nr + 1, Ntheta)``.
    """
    if Nt < 1 or T <= 0:
        raise ContractError("need Nt >= 1 and T > 0")
    check_coefficients(grid, coeffs)
    u0 = np.asarray(initial.bulk, dtype=complex)
    if u0.shape != grid.shape:
        raise ContractError(f"initial field has shape {u0.shape}, grid expects {grid.shape}")
    if control is None:
        control = ControlSignal.zeros(Nt, np.ones(grid.Ntheta, bool))
    if control.Nt != Nt:
        raise ContractError("control must be defined at all Nt + 1 time nodes")
    scale = max(1.0, float(np.max(np.abs(u0))))
    if not control.midpoint_defined and np.max(np.abs(u0[-1] - control.values[0])) > 1e-10 * scale:
        raise ContractError("initial state does not match the Dirichlet data on Gamma_0")

    dt = T / Nt
    times = dt * np.arange(Nt + 1)
    n_unk = grid.n_unknowns
    mass = grid.mass[:n_unk]
    stepper = _Stepper(grid, coeffs, dt)
    keep_all = keep == "all"
    frames = np.empty((Nt + 1 if keep_all else 2,) + grid.shape, dtype=complex)
    frames[0] = u0
    inner = np.empty((Nt + 1, grid.Ntheta), dtype=complex)
    outer = np.empty((Nt + 1, grid.Ntheta), dtype=complex)
    inner[0], outer[0] = _traces(grid, u0)

    x = u0[:-1].ravel().copy()
    hbar = control.midpoints()
    g_prev = _sample(forcing, grid, times, 0, Nt)
    for n in range(Nt):
        B, lu, rhs_op = stepper.blocks(times[n] + 0.5 * dt)
        rhs = rhs_op @ x - 1j * dt * (B.IB @ hbar[n])
        if forcing is not None:
            g_next = _sample(forcing, grid, times, n + 1, Nt)
            gbar = 0.5 * (g_prev + g_next)
            rhs = rhs - 1j * dt * mass * gbar[:-1].ravel()
            g_prev = g_next
        x = lu.solve(rhs)
        if not np.all(np.isfinite(x)):
            raise SolverBreakdown(f"non-finite state at step {n + 1}", step=n + 1)
        u = FieldPair.from_unknowns(grid, x, control.values[n + 1]).bulk
        inner[n + 1], outer[n + 1] = _traces(grid, u)
        if keep_all:
            frames[n + 1] = u
        elif n == Nt - 1:
            frames[1] = u
    return Trajectory(grid, T, times, frames, inner, outer, None, keep,
                      meta={"coefficients": coeffs.name, "direction": "forward"})


def adjoint_solve(grid: AnnulusGrid, coeffs: CoefficientSet, terminal: FieldPair,
                  Nt: int, T: float = 1.0, mask=None, keep: str = "all",
                  adjoint_ready: bool = False) -> Trajectory:
    """Backward CN sweep of the adjoint system from ``terminal`` at ``t = T``.

    ``coeffs`` are the forward coefficients; the adjoint potentials are formed
    internally unless ``adjoint_ready`` says they already are.  The stored
    ``flux_trace`` is the scheme-consistent normal derivative on Gamma_0 at
    each interval midpoint, zeroed off ``mask``.
    """
    if Nt < 1 or T <= 0:
        raise ContractError("need Nt >= 1 and T > 0")
    check_coefficients(grid, coeffs)
    zT = np.asarray(terminal.bulk, dtype=complex)
    if zT.shape != grid.shape:
        raise ContractError(f"terminal field has shape {zT.shape}, grid expects {grid.shape}")
    if np.max(np.abs(zT[-1])) > 1e-12 * max(1.0, float(np.max(np.abs(zT)))):
        raise ContractError("terminal state must vanish on Gamma_0")
    adj = coeffs if adjoint_ready else adjoint_coefficients(coeffs)
    mask = np.ones(grid.Ntheta, bool) if mask is None else np.asarray(mask, dtype=bool)

    dt = T / Nt
    times = dt * np.arange(Nt + 1)
    stepper = _Stepper(grid, adj, dt, direction=-1)
    keep_all = keep == "all"
    frames = np.empty((Nt + 1 if keep_all else 2,) + grid.shape, dtype=complex)
    frames[-1] = zT
    inner = np.empty((Nt + 1, grid.Ntheta), dtype=complex)
    outer = np.empty((Nt + 1, grid.Ntheta), dtype=complex)
    flux_mid = np.empty((Nt, grid.Ntheta), dtype=complex)
    scale = 1.0 / (adj.d * grid.sigma_outer)
    inner[Nt], outer[Nt] = _traces(grid, zT)

    x = zT[:-1].ravel().copy()
    for n in range(Nt - 1, -1, -1):
        B, lu, rhs_op = stepper.blocks(times[n] + 0.5 * dt)
        x_next = x
        x = lu.solve(rhs_op @ x_next)
        if not np.all(np.isfinite(x)):
            raise SolverBreakdown(f"non-finite state at step {n}", step=n)
        u = FieldPair.from_unknowns(grid, x).bulk
        inner[n], outer[n] = _traces(grid, u)
        flux_mid[n] = scale * (B.IB.conj().T @ (0.5 * (x + x_next)))
        if keep_all:
            frames[n] = u
        elif n == 0:
            frames[0] = u
    flux_mid *= mask
    return Trajectory(grid, T, times, frames, inner, outer, flux_mid, keep,
                      meta={"coefficients": adj.name, "direction": "backward",
                            "mask": mask})
