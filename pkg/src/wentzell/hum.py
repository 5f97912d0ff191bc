"""HUM control synthesis and observability estimates.

The Gramian ``Lambda`` maps terminal adjoint data ``a`` to ``i y_a(T)`` plus
a Tikhonov term, where ``y_a`` is driven from rest by the control
``h = d * (scheme normal derivative of the adjoint)`` on Gamma*.  By the
discrete duality identity

    <Lambda a, a>_H = ||h||^2_{L2(Gamma* x (0,T))} + mu ||a||_V^2,

so ``Lambda`` is Hermitian positive semidefinite in the H pairing.  The
equation ``Lambda a = i * target`` is solved by a conjugate-residual
iteration preconditioned with the discrete Riesz map ``K_V^{-1} M``; the
residual it minimises is exactly the V' norm of the steering defect, and it
decreases monotonically.  Setting ``filtered`` restricts the preconditioner
to the lowest ``m`` V-modes; that iteration converges in a handful of steps
but leaves the high-mode part of the reached state uncorrected, so steering
uses the full Riesz map by default.  The observability estimate always works
on the retained modes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from .errors import ContractError
from .mesh import AnnulusGrid, FieldPair, NormSuite
from .pde.coefficients import CoefficientSet, adjoint_coefficients
from .pde.solve import ControlSignal, adjoint_solve, forward_solve

log = logging.getLogger(__name__)


@dataclass
class GramianContext:
    grid: AnnulusGrid
    coeffs: CoefficientSet
    Nt: int
    T: float
    mu_reg: float = 1e-10
    cutoff: Optional[int] = None  # retained V-modes; None means dimension / 8
    mask: Optional[np.ndarray] = None  # Gamma* on the outer ring; None means all of it
    filtered: bool = False  # restrict the steering preconditioner to the retained modes
    suite: NormSuite = field(default=None, repr=False)

    def __post_init__(self):
        if self.mu_reg < 0:
            raise ContractError("mu_reg must be nonnegative")
        n = self.grid.n_unknowns
        if self.cutoff is None:
            self.cutoff = max(1, n // 8)
        if not 1 <= self.cutoff <= n:
            raise ContractError(f"mode cutoff must lie in 1..{n}")
        if self.mask is None:
            self.mask = np.ones(self.grid.Ntheta, bool)
        self.mask = np.asarray(self.mask, bool)
        if self.suite is None:
            self.suite = NormSuite(self.grid)
        self.adjoint = adjoint_coefficients(self.coeffs)

    @property
    def dt(self):
        return self.T / self.Nt

    @cached_property
    def modes(self):
        """``(lam, E)``: lowest V-modes, M-orthonormal columns."""
        return self.suite.modes(self.cutoff)

    @property
    def mass(self):
        return self.suite.mass

    def h_inner(self, a, b) -> complex:
        return complex(np.vdot(b, self.mass * a))

    def precondition(self, r):
        """Riesz map ``K_V^{-1} M r``, projected on the retained modes if filtered."""
        if not self.filtered:
            return self.suite.riesz(r)
        lam, E = self.modes
        return E @ ((E.conj().T @ (self.mass * r)) / lam)


def _unknowns(f):
    if isinstance(f, FieldPair):
        return f.unknowns
    f = np.asarray(f)
    return f[:-1].ravel() if f.ndim == 2 else f


def observe(ctx: GramianContext, a) -> np.ndarray:
    """Midpoint normal-derivative samples of the adjoint from terminal data ``a``."""
    phi = adjoint_solve(ctx.grid, ctx.adjoint, FieldPair.from_unknowns(ctx.grid, _unknowns(a)),
                        ctx.Nt, ctx.T, mask=ctx.mask, keep="ends", adjoint_ready=True)
    return phi.flux_trace


def control_from_observation(ctx: GramianContext, obs) -> ControlSignal:
    return ControlSignal.from_midpoints(ctx.coeffs.d * obs, ctx.mask)


def control_energy(ctx: GramianContext, control: ControlSignal) -> float:
    """Midpoint-rule ``||h||^2`` over Gamma* x (0, T)."""
    return float(ctx.dt * ctx.grid.sigma_outer * np.sum(np.abs(control.midpoints()) ** 2))


def reached_state(ctx: GramianContext, control: ControlSignal) -> np.ndarray:
    y = forward_solve(ctx.grid, ctx.coeffs, FieldPair.zeros(ctx.grid), control, ctx.Nt, ctx.T,
                      keep="ends")
    return y.final.unknowns


def gramian_apply(ctx: GramianContext, a, return_control: bool = False):
    a = _unknowns(a)
    if not np.any(a):
        out = np.zeros_like(a, dtype=complex)
        return (out, ControlSignal.zeros(ctx.Nt, ctx.mask)) if return_control else out
    control = control_from_observation(ctx, observe(ctx, a))
    out = 1j * reached_state(ctx, control)
    if ctx.mu_reg:
        out = out + ctx.mu_reg * ctx.suite.riesz_image(a)
    return (out, control) if return_control else out


def pairing(ctx: GramianContext, x, y) -> complex:
    """H (equivalently V'-V) pairing of discrete fields."""
    return ctx.h_inner(_unknowns(x), _unknowns(y))


@dataclass
class SteeringResult:
    control: ControlSignal
    reached: FieldPair
    adjoint_datum: np.ndarray
    steering_error: float  # relative, in V'
    control_energy: float
    iterations: int
    residuals: list
    converged: bool
    resimulated_error: float = float("nan")

    def diagnostics(self) -> dict:
        return {"iterations": self.iterations, "converged": self.converged,
                "steering_error": self.steering_error,
                "resimulated_error": self.resimulated_error,
                "control_energy": self.control_energy, "residuals": list(self.residuals)}


def synthesize_control(ctx: GramianContext, target, tol: float = 1e-4,
                       max_iter: int = 200) -> SteeringResult:
    """Solve ``Lambda a = i target`` by preconditioned conjugate residuals."""
    if tol <= 0:
        raise ContractError("tol must be positive")
    grid = ctx.grid
    b = 1j * _unknowns(target).astype(complex)
    target_norm = ctx.suite.v_dual_norm(_unknowns(target))
    x = np.zeros_like(b)
    if target_norm == 0.0:
        zero = ControlSignal.zeros(ctx.Nt, ctx.mask)
        return SteeringResult(zero, FieldPair.zeros(grid), x, 0.0, 0.0, 0, [0.0], True, 0.0)

    ip = ctx.h_inner
    r = b.copy()
    z = ctx.precondition(r)
    Az = gramian_apply(ctx, z)
    p, Ap = z.copy(), Az.copy()
    zAz = ip(Az, z).real
    res = [np.sqrt(max(ip(z, r).real, 0.0)) / target_norm]
    converged = res[0] <= tol
    it = 0
    while not converged and it < max_iter:
        PAp = ctx.precondition(Ap)
        denom = ip(PAp, Ap).real
        if denom <= 0 or zAz <= 0:
            log.warning("conjugate residual breakdown at iteration %d", it)
            break
        alpha = zAz / denom
        x += alpha * p
        r -= alpha * Ap
        z -= alpha * PAp
        it += 1
        res.append(np.sqrt(max(ip(z, r).real, 0.0)) / target_norm)
        if res[-1] <= tol:
            converged = True
            break
        Az = gramian_apply(ctx, z)
        zAz_new = ip(Az, z).real
        beta = zAz_new / zAz
        zAz = zAz_new
        p = z + beta * p
        Ap = Az + beta * Ap

    obs = observe(ctx, x)
    control = control_from_observation(ctx, obs)
    y = reached_state(ctx, control)
    err = ctx.suite.v_dual_norm(y - _unknowns(target)) / target_norm
    reached = FieldPair.from_unknowns(grid, y)
    result = SteeringResult(control, reached, x, float(err), control_energy(ctx, control), it,
                            [float(v) for v in res], converged)
    # independent check: a fresh forward solve from a copy of the control
    again = reached_state(ctx, ControlSignal.from_midpoints(control.midpoints().copy(), ctx.mask))
    result.resimulated_error = float(
        ctx.suite.v_dual_norm(again - _unknowns(target)) / target_norm)
    return result


# ---------------------------------------------------------------------------
# observability


@dataclass
class ObservabilityEstimate:
    C_obs: float
    min_eigenvalue: float
    observable: bool
    cutoff: int
    T: float


def observation_matrix(ctx: GramianContext) -> np.ndarray:
    """Rows: weighted observations of the V-normalised retained modes."""
    lam, E = ctx.modes
    w = np.sqrt(ctx.dt * ctx.grid.sigma_outer)
    rows = [w * observe(ctx, E[:, k] / np.sqrt(lam[k])).ravel() for k in range(E.shape[1])]
    return np.array(rows)


def observability_constant(ctx: GramianContext, tol: float = 1e-12,
                           dense_limit: int = 256) -> ObservabilityEstimate:
    """``1 / min`` of ``int int_{Gamma*} |dnu phi|^2 / ||phi_T||_V^2`` over retained modes."""
    if ctx.mu_reg != 0:
        raise ContractError("observability is estimated with mu_reg = 0")
    m = ctx.cutoff
    if not np.any(ctx.mask):
        return ObservabilityEstimate(float("inf"), 0.0, False, m, ctx.T)
    if m <= dense_limit:
        O = observation_matrix(ctx)
        S = O.conj() @ O.T
        S = 0.5 * (S + S.conj().T)
        ev = sla.eigvalsh(S)
        smin, smax = float(ev[0]), float(ev[-1])
    else:
        lam, E = ctx.modes
        scale = 1.0 / np.sqrt(lam)

        def matvec(c):
            a = E @ (scale * c)
            g = gramian_apply(ctx, a) / ctx.coeffs.d**2
            return scale * (E.conj().T @ (ctx.mass * g))

        op = spla.LinearOperator((m, m), matvec=matvec, dtype=complex)
        smin = float(spla.eigsh(op, k=1, which="SA", return_eigenvectors=False, tol=1e-10)[0])
        smax = float(spla.eigsh(op, k=1, which="LA", return_eigenvectors=False, tol=1e-6)[0])
    if smin <= tol * max(smax, 1e-300) or smin <= 0:
        return ObservabilityEstimate(float("inf"), smin, False, m, ctx.T)
    return ObservabilityEstimate(1.0 / smin, smin, True, m, ctx.T)
