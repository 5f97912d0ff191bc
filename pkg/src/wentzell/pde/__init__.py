"""Crank-Nicolson solvers for the Schrodinger equation with dynamic boundary conditions."""
from .coefficients import (CoefficientSet, GaugeField, GeneralCoefficients, PRESETS,
                           adjoint_coefficients, finite_difference_divergence, gauge_example,
                           gauge_transform, make_preset, reduce_gauge)
from .diagnostics import (DualityResult, EnergyReport, HiddenRegularityReport, duality_check,
                          duality_pairing, energy_report, hidden_regularity_report,
                          trace_norm_sq)
from .operators import GeneratorBlocks, generator
from .solve import ControlSignal, Trajectory, adjoint_solve, forward_solve

__all__ = [
    "CoefficientSet", "GaugeField", "GeneralCoefficients", "PRESETS", "adjoint_coefficients",
    "finite_difference_divergence", "gauge_example", "gauge_transform", "make_preset",
    "reduce_gauge", "DualityResult", "EnergyReport", "HiddenRegularityReport", "duality_check",
    "duality_pairing", "energy_report", "hidden_regularity_report", "trace_norm_sq",
    "GeneratorBlocks", "generator", "ControlSignal", "Trajectory", "adjoint_solve",
    "forward_solve",
]
