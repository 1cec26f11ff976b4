"""Pseudo-spectral incompressible resistive MHD (equal viscosity and
resistivity) on a periodic box, with the localized-Beltrami initial data
family, norm diagnostics, and a topological reconnection detector based on
counting hyperbolic nulls of the magnetic field."""

from .grid import Grid
from .fields import ScalarField, VectorField, to_physical, to_spectral
from .operators import (
    curl,
    dealias,
    divergence,
    freq_project_high,
    freq_project_low,
    gradient,
    heat_evolve,
    jacobian_field,
    leray_project,
)
from .initial_data import (
    InitialDataParams,
    build_initial_magnetic,
    build_initial_velocity,
    gauss_window_transform,
    make_beltrami,
    make_cosine_abc,
    make_gauss_window,
    make_poly_window,
    perturbation_threshold,
    spectral_curl_gauss_abc,
)

__all__ = [
    "Grid",
    "ScalarField",
    "VectorField",
    "to_physical",
    "to_spectral",
    "curl",
    "dealias",
    "divergence",
    "freq_project_high",
    "freq_project_low",
    "gradient",
    "heat_evolve",
    "jacobian_field",
    "leray_project",
    "InitialDataParams",
    "build_initial_magnetic",
    "build_initial_velocity",
    "gauss_window_transform",
    "make_beltrami",
    "make_cosine_abc",
    "make_gauss_window",
    "make_poly_window",
    "perturbation_threshold",
    "spectral_curl_gauss_abc",
]

__version__ = "0.1.0"
