"""
kpsolver

Numerical solutions of the Kadomtsev-Petviashvili equation from soliton
scattering data, by three routes:

- GLM-RR / GLM-CC: the Gelfand-Levitan-Marchenko equation discretised with a
  left Riemann or a Clenshaw-Curtis rule, one dense solve per grid point
- Det-CC: the tau function as a Nystrom-Clenshaw-Curtis Fredholm determinant
- FFT2-exp: exponential split-step pseudo-spectral time stepping with a
  super-Gaussian window

Usage:
------
Command-line interface:
    kpsolve solve --method det-cc --quantity tau --t 0.25
    kpsolve converge --methods glm-cc,det-cc
    kpsolve evolve --T 0.25 --steps 10000

As a Python library:
    >>> from kpsolver import Grid2D, make_data
    >>> from kpsolver.numerics.glm import solve_glm_grid, u_from_g
    >>> from kpsolver.numerics.quadrature import RuleKind
    >>> data = make_data([(1.55, 1.45), (1.3, 0.0)])
    >>> grid = Grid2D(31.4, 31.4, 64, 64)
    >>> u = u_from_g(solve_glm_grid(data, RuleKind.CLENSHAW_CURTIS, 128, grid, 0.25))
"""

from .__version__ import __version__
from .numerics import (
    Grid2D,
    Method,
    Quantity,
    ScatteringData,
    SolitonComponent,
    SolutionField,
    make_data,
    parse_solitons,
)

__all__ = [
    "__version__",
    "Grid2D",
    "Method",
    "Quantity",
    "ScatteringData",
    "SolitonComponent",
    "SolutionField",
    "make_data",
    "parse_solitons",
]
