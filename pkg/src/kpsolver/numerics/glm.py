"""
GLM-RR and GLM-CC solvers.

For every grid point (x, y) and time t the truncated GLM equation

    p(x, zeta + x; y, t) = g(0, zeta) - int_{-Lx/2}^0 g(0, xi) p(xi + x, zeta + x; y, t) dxi

is discretised on the quadrature nodes of [-Lx/2, 0] into the row-vector
system P = G (I - W Q), where P[m] = p(x, zeta_m + x), Q[m', m] =
p(xi_m' + x, zeta_m + x) and W = diag(weights). The integration index m' is
the row index of Q, contracted against G. The last entry of G approximates
g(0, 0; x, y, t), whose x-derivative is the KP field u.
"""

import logging
import time
from typing import Optional, Tuple

import numpy as np

from .fields import (
    Grid2D,
    GridError,
    Method,
    Quantity,
    SolutionField,
    second_order_x_derivative,
    sweep_grid,
)
from .linalg import LinearAlgebraError, SingularMatrixError, solve_row_system
from .quadrature import QuadratureRule, RuleKind, make_rule
from .scattering import (
    ScatteringData,
    analytic_soliton_g,
    analytic_soliton_tau,
    analytic_soliton_u,
    eval_kernel,
)

log = logging.getLogger(__name__)


class SingularSystemError(ValueError):
    """
    Raised when the GLM system at one grid point cannot be solved.

    Attributes:
        x, y, t: The point and time of the failing system
        pivot_index: Zero pivot index, or None when the matrix was not finite
    """

    def __init__(
        self, x: float, y: float, t: float, pivot_index: Optional[int], reason: str
    ):
        self.x = x
        self.y = y
        self.t = t
        self.pivot_index = pivot_index
        super().__init__(f"GLM system at x={x:g}, y={y:g}, t={t:g}: {reason}")


def kernel_matrix(
    data: ScatteringData, rule: QuadratureRule, x: float, y: float, t: float
) -> np.ndarray:
    """
    Q[m', m] = p(xi_m' + x, zeta_m + x; y, t).

    Args:
        data: Scattering data defining the kernel
        rule: Quadrature rule on [0, inf)
        x, y, t: Evaluation point

    Returns:
        (M, M) kernel matrix, rows indexed by the output node
    """
    shifted = rule.nodes + x
    return np.asarray(
        eval_kernel(data, shifted[:, None], shifted[None, :], y, t), dtype=float
    )


def assemble_glm(
    data: ScatteringData, rule: QuadratureRule, x: float, y: float, t: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sample the kernel on the quadrature nodes.

    Returns:
        (phat, qhat) with phat[m] = p(x, zeta_m + x; y, t) and
        qhat[m', m] = p(xi_m' + x, zeta_m + x; y, t)
    """
    phat = eval_kernel(data, x, rule.nodes + x, y, t)
    return np.asarray(phat, dtype=float), kernel_matrix(data, rule, x, y, t)


def glm_matrix(rule: QuadratureRule, qhat: np.ndarray) -> np.ndarray:
    """I - W Q, with W scaling the integration (row) index."""
    return np.eye(rule.size) - rule.weights[:, None] * qhat


def solve_glm_point(
    data: ScatteringData, rule: QuadratureRule, x: float, y: float, t: float
) -> float:
    """
    Solve the discretised GLM equation at one point and return g(0, 0; x, y, t).

    Raises:
        SingularSystemError: If I - W Q is singular or not finite at this point
    """
    phat, qhat = assemble_glm(data, rule, x, y, t)
    try:
        G = solve_row_system(phat, glm_matrix(rule, qhat))
    except SingularMatrixError as e:
        raise SingularSystemError(x, y, t, e.pivot_index, str(e))
    except LinearAlgebraError as e:
        raise SingularSystemError(x, y, t, None, str(e))
    return float(G[-1])


def solve_glm_grid(
    data: ScatteringData,
    rule_kind: RuleKind,
    M: int,
    grid: Grid2D,
    t: float,
    workers: Optional[int] = None,
) -> SolutionField:
    """
    Solve one GLM system per grid node.

    Points whose system fails are stored as NaN and counted in
    metadata["flagged_cells"]; the sweep itself never aborts.

    Args:
        data: Scattering data
        rule_kind: Riemann (GLM-RR) or Clenshaw-Curtis (GLM-CC)
        M: Even quadrature parameter, M/2 + 1 nodes on [-Lx/2, 0]
        grid: Evaluation lattice
        t: Time
        workers: Thread count for the sweep

    Returns:
        Field of g values
    """
    rule = make_rule(rule_kind, grid.Lx, M)
    method = Method.GLM_RR if rule.kind is RuleKind.RIEMANN else Method.GLM_CC

    def point(x: float, y: float) -> float:
        try:
            return solve_glm_point(data, rule, x, y, t)
        except SingularSystemError as e:
            log.warning(str(e))
            return np.nan

    log.info(
        f"Solving {method.value} on {grid.Nx}x{grid.Ny} grid, M={M}, t={t:g}"
    )
    started = time.perf_counter()
    values = sweep_grid(point, grid, workers)
    elapsed = time.perf_counter() - started
    field = SolutionField(
        grid=grid,
        quantity=Quantity.G,
        t=t,
        values=values,
        method=method,
        metadata={"M": M, "elapsed_seconds": elapsed},
    )
    field.metadata["flagged_cells"] = field.flagged
    log.info(f"{method.value} finished in {elapsed:.2f}s, {field.flagged} flagged")
    return field


def u_from_g(gfield: SolutionField) -> SolutionField:
    """
    Differentiate g in x to obtain the KP field u.

    Returns:
        u = dg/dx by second-order differences, same grid and time

    Raises:
        GridError: If the field does not hold g
    """
    if gfield.quantity is not Quantity.G:
        raise GridError(f"Expected a g field, got {gfield.quantity.value}")
    values = second_order_x_derivative(gfield.values, gfield.grid.dx)
    return gfield.derive(values, Quantity.U)


def analytic_field(
    data: ScatteringData, quantity: Quantity, grid: Grid2D, t: float
) -> SolutionField:
    """
    Closed-form field for single-soliton data, evaluated on the grid.

    Raises:
        GridError: If the data has more than one component
    """
    if not data.is_single_soliton:
        raise GridError("Closed forms exist only for single-soliton data")
    c = data.components[0]
    X, Y = grid.mesh()
    X = X - data.xshift
    Y = Y - data.yshift
    formula = {
        Quantity.G: analytic_soliton_g,
        Quantity.U: analytic_soliton_u,
        Quantity.TAU: analytic_soliton_tau,
    }[Quantity(quantity)]
    return SolutionField(
        grid=grid,
        quantity=Quantity(quantity),
        t=t,
        values=np.asarray(formula(c, X, Y, t), dtype=float),
        method=Method.ANALYTIC,
    )
