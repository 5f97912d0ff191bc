"""Schrodinger equation with dynamic Wentzell boundary conditions on an annulus:
discretisation, Carleman weight checks and HUM boundary control."""

__version__ = "0.1.0"
