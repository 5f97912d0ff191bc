"""Conjugated operators and quadrature of the Carleman inequalities."""
from .operators import (BoundaryFrame, CarlemanCoefficients, Decomposition, boundary_operator,
                        bulk_operator, conjugated_decomposition, schrodinger_operators)
from .sides import (ROW_HEADER, TERM_NAMES, BoundaryObservation, CarlemanEntry,
                    CarlemanQuadrature, InteriorObservation, QuadratureResolution,
                    carleman_sides)
from .sweep import SweepResult, carleman_sweep, empirical_constants
from .testfunctions import (BesselMode, BumpFunction, Jet, RadialProfile, TestFunction,
                            WeightedFunction, ZeroFunction, default_family, make_test_function)

__all__ = [
    "BoundaryFrame", "CarlemanCoefficients", "Decomposition", "boundary_operator",
    "bulk_operator", "conjugated_decomposition", "schrodinger_operators", "ROW_HEADER",
    "TERM_NAMES", "BoundaryObservation", "CarlemanEntry", "CarlemanQuadrature",
    "InteriorObservation", "QuadratureResolution", "carleman_sides", "SweepResult",
    "carleman_sweep", "empirical_constants", "BesselMode", "BumpFunction", "Jet",
    "RadialProfile", "TestFunction", "WeightedFunction", "ZeroFunction", "default_family",
    "make_test_function",
]
