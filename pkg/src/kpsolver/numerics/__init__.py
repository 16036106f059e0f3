"""
Numerical methods for the KP equation.

- scattering: exponential soliton kernels, closed forms, constraint residuals
- quadrature: left Riemann and Clenshaw-Curtis rules on [-L/2, 0]
- linalg: LU with partial pivoting, row-vector solves, determinants
- fields: grids, solution fields, parallel grid sweeps, x-derivatives
- glm: GLM-RR and GLM-CC solvers for g and u
- fredholm: Det-CC tau function and the tau route to g and u
- spectral: FFT2-exp split-step integrator with the window method
- analysis: error metrics and convergence studies
"""

from .fields import Grid2D, Method, Quantity, SolutionField
from .scattering import ScatteringData, SolitonComponent, make_data, parse_solitons

__all__ = [
    "Grid2D",
    "Method",
    "Quantity",
    "SolutionField",
    "ScatteringData",
    "SolitonComponent",
    "make_data",
    "parse_solitons",
]
