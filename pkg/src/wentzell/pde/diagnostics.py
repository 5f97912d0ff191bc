"""Duality, energy and hidden-regularity diagnostics on computed trajectories."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..mesh import AnnulusGrid, FieldPair, NormSuite
from .coefficients import CoefficientSet
from .solve import ControlSignal, Trajectory, adjoint_solve, forward_solve

log = logging.getLogger(__name__)


def _ratio(num, den):
    """``num / den`` with the zero-data convention ``0 / 0 = 0``."""
    if den == 0.0:
        return 0.0 if num == 0.0 else np.inf
    return num / den


@dataclass(frozen=True)
class DualityResult:
    lhs: complex  # d int int 1_{G*} h conj(d_nu phi)
    rhs: complex  # i <y(T), phi_T>
    residual: float


def duality_pairing(grid: AnnulusGrid, d: float, control: ControlSignal,
                    adjoint: Trajectory) -> complex:
    """``d dt sum_n sum_k sigma hbar conj(obs)`` over the midpoint samples."""
    hbar = control.midpoints()
    return complex(d * adjoint.dt * grid.sigma_outer * np.sum(hbar * np.conj(adjoint.flux_trace)))


def duality_check(grid: AnnulusGrid, coeffs: CoefficientSet, control: ControlSignal,
                  terminal: FieldPair, T: float = 1.0) -> DualityResult:
    Nt = control.Nt
    y = forward_solve(grid, coeffs, FieldPair.zeros(grid), control, Nt, T, keep="ends")
    phi = adjoint_solve(grid, coeffs, terminal, Nt, T, mask=control.mask, keep="ends")
    lhs = duality_pairing(grid, coeffs.d, control, phi)
    rhs = 1j * complex(np.sum(grid.mass * y.final.bulk.ravel() * np.conj(terminal.bulk.ravel())))
    scale = max(abs(lhs), abs(rhs))
    res = 0.0 if scale == 0.0 else abs(lhs - rhs) / scale
    return DualityResult(lhs, rhs, float(res))


# ---------------------------------------------------------------------------
# energy estimates


@dataclass
class EnergyReport:
    times: np.ndarray
    h_norm: np.ndarray
    v_norm: Optional[np.ndarray]
    h_ratio: float
    v_ratio: Optional[float]
    h_drift: float  # max relative deviation of ||u||_H from its initial value
    trace_condition_ok: bool
    growth_bound: float  # exp(C T) with C from the potential sup-norms

    def rows(self):
        v = self.v_norm if self.v_norm is not None else np.full_like(self.h_norm, np.nan)
        return [(float(t), float(h), float(vv)) for t, h, vv in zip(self.times, self.h_norm, v)]


def _forcing_slices(forcing, grid, times):
    if forcing is None:
        return None
    if callable(forcing):
        return np.stack([np.asarray(forcing(grid.points, t), dtype=complex) for t in times])
    return np.asarray(forcing, dtype=complex)


def _l1_in_time(values, times):
    return float(np.trapezoid(values, times)) if values.size > 1 else 0.0


def _forcing_v_l1(g, suite, times) -> float:
    """``||g||_{L1(0,T;V)}``; the Gamma_0 ring of the forcing is not seen by V."""
    if g is None:
        return 0.0
    inner = g.copy()
    inner[:, -1] = 0.0
    return _l1_in_time(np.array([suite.v_norm(x) for x in inner]), times)


def potential_growth_rate(grid: AnnulusGrid, coeffs: CoefficientSet, times) -> float:
    """``2 sup |Im q_eff|`` over nodes and times; bounds d/dt log ||u||_H^2."""
    from .operators import potential_diagonal

    rate = 0.0
    sample = times if coeffs.time_dependent else times[:1]
    for t in sample:
        P = potential_diagonal(grid, coeffs, t) / grid.mass
        rate = max(rate, float(np.max(np.abs(P.imag))))
    return 2.0 * rate


def energy_report(traj: Trajectory, coeffs: CoefficientSet, forcing=None,
                  suite: Optional[NormSuite] = None, v_estimate: bool = True) -> EnergyReport:
    grid = traj.grid
    suite = suite or NormSuite(grid)
    frames = traj.frames
    if traj.kept != "all":
        raise ValueError("energy report needs every frame of the trajectory")
    h = np.array([suite.h_norm(f) for f in frames])
    g = _forcing_slices(forcing, grid, traj.times)
    g_h = np.zeros_like(traj.times) if g is None else np.array([suite.h_norm(x) for x in g])
    den_h = _l1_in_time(g_h, traj.times) ** 2 + h[0] ** 2
    h_ratio = _ratio(float(np.max(h**2)), den_h)
    drift = 0.0 if h[0] == 0 else float(np.max(np.abs(h - h[0])) / h[0])

    on_gamma1 = grid.points[0]
    qb = np.asarray(coeffs.q0(on_gamma1, 0.0), dtype=complex)
    qg = np.asarray(coeffs.q_gamma0(on_gamma1, 0.0), dtype=complex)
    trace_ok = bool(np.max(np.abs(qb - qg), initial=0.0) <= 1e-12)
    v_norm = v_ratio = None
    admissible = np.max(np.abs(frames[:, -1])) <= 1e-12 * max(1.0, float(np.max(np.abs(frames))))
    if v_estimate and admissible:
        if not trace_ok:
            log.warning("V estimate requested but q0 != q_Gamma0 on Gamma_1; ratio reported anyway")
        v_norm = np.array([suite.v_norm(f) for f in frames])
        den_v = _forcing_v_l1(g, suite, traj.times) ** 2 + v_norm[0] ** 2
        v_ratio = _ratio(float(np.max(v_norm**2)), den_v)
    rate = potential_growth_rate(grid, coeffs, traj.times)
    return EnergyReport(traj.times, h, v_norm, float(h_ratio), v_ratio, drift, trace_ok,
                        float(np.exp(rate * traj.T)))


# ---------------------------------------------------------------------------
# hidden regularity


@dataclass(frozen=True)
class HiddenRegularityReport:
    trace_norm_sq: float
    ratio: float
    rhs: float


def trace_norm_sq(traj: Trajectory) -> float:
    """Trapezoid-in-time integral of ``|d_nu u|^2`` over both boundary circles."""
    g = traj.grid
    per_t = g.sigma_inner * np.sum(np.abs(traj.inner_trace) ** 2, axis=1) + \
        g.sigma_outer * np.sum(np.abs(traj.outer_trace) ** 2, axis=1)
    return float(np.trapezoid(per_t, traj.times))


def hidden_regularity_report(traj: Trajectory, coeffs: CoefficientSet, forcing=None,
                             suite: Optional[NormSuite] = None) -> HiddenRegularityReport:
    grid = traj.grid
    suite = suite or NormSuite(grid)
    tn = trace_norm_sq(traj)
    g = _forcing_slices(forcing, grid, traj.times)
    rhs = _forcing_v_l1(g, suite, traj.times) ** 2 + suite.v_norm(traj.initial) ** 2
    return HiddenRegularityReport(tn, float(_ratio(tn, rhs)), float(rhs))
