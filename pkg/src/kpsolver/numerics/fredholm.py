"""
Tau function by the Nystrom-Clenshaw-Curtis method (Det-CC).

tau(x, y, t) = det(id - P) is approximated by det(I - W^(1/2) Q W^(1/2)) on
the Clenshaw-Curtis nodes of [-Lx/2, 0], with Q the same kernel sample matrix
the GLM-CC solver assembles. The KP fields follow from

    g = -d/dx log tau,    u = -d^2/dx^2 log tau,

taken by second-order finite differences on the grid.

The digit-loss estimate log10(sqrt(M) ||P|| / tau) bounds the decimal
digits a determinant evaluation can lose when tau is small compared with the
Hilbert-Schmidt norm of P.
"""

import logging
import math
import time
from typing import Optional

import numpy as np

from .fields import (
    Grid2D,
    GridError,
    Method,
    Quantity,
    SolutionField,
    second_order_x_derivative,
    second_order_x_second_derivative,
    sweep_grid,
)
from .glm import assemble_glm, glm_matrix, kernel_matrix
from .linalg import LinearAlgebraError, determinant, scaled_frobenius
from .quadrature import QuadratureRule, RuleKind, clenshaw_curtis_rule
from .scattering import ScatteringData

log = logging.getLogger(__name__)


def _require_cc(rule: QuadratureRule) -> None:
    if rule.kind is not RuleKind.CLENSHAW_CURTIS:
        raise ValueError(
            f"The Nystrom determinant needs Clenshaw-Curtis nodes, got {rule.kind.value}"
        )


def nystrom_matrix(rule: QuadratureRule, qhat: np.ndarray) -> np.ndarray:
    """I - W^(1/2) Q W^(1/2)."""
    s = rule.sqrt_weights
    return np.eye(rule.size) - s[:, None] * qhat * s[None, :]


def tau_point(
    data: ScatteringData, rule: QuadratureRule, x: float, y: float, t: float
) -> float:
    """
    det(I - W^(1/2) Q W^(1/2)) at one point.

    Returns NaN when the kernel samples overflow.

    Raises:
        ValueError: If the rule is not Clenshaw-Curtis
    """
    _require_cc(rule)
    try:
        return determinant(nystrom_matrix(rule, kernel_matrix(data, rule, x, y, t)))
    except LinearAlgebraError as e:
        log.warning(f"tau at x={x:g}, y={y:g}, t={t:g}: {e}")
        return math.nan


def similarity_gap(
    data: ScatteringData, rule: QuadratureRule, x: float, y: float, t: float
) -> float:
    """
    Relative gap between det(I - W^(1/2) Q W^(1/2)) and det(I - W Q).

    The two matrices are similar, so the gap is rounding only.
    """
    _require_cc(rule)
    _, qhat = assemble_glm(data, rule, x, y, t)
    symmetric = determinant(nystrom_matrix(rule, qhat))
    plain = determinant(glm_matrix(rule, qhat))
    return abs(symmetric - plain) / abs(symmetric)


def tau_grid(
    data: ScatteringData,
    M: int,
    grid: Grid2D,
    t: float,
    workers: Optional[int] = None,
) -> SolutionField:
    """
    Det-CC tau function at every grid node.

    Returns:
        Field of tau values tagged DET_CC, with "M", "elapsed_seconds" and
        "flagged_cells" (non-finite or non-positive cells) in the metadata
    """
    rule = clenshaw_curtis_rule(grid.Lx, M)
    log.info(f"Computing det-cc tau on {grid.Nx}x{grid.Ny} grid, M={M}, t={t:g}")
    started = time.perf_counter()
    values = sweep_grid(lambda x, y: tau_point(data, rule, x, y, t), grid, workers)
    elapsed = time.perf_counter() - started
    invalid = int(np.count_nonzero(~(values > 0)))
    if invalid:
        log.warning(f"{invalid} tau cells are non-positive or not finite")
    log.info(f"det-cc finished in {elapsed:.2f}s")
    return SolutionField(
        grid=grid,
        quantity=Quantity.TAU,
        t=t,
        values=values,
        method=Method.DET_CC,
        metadata={"M": M, "elapsed_seconds": elapsed, "flagged_cells": invalid},
    )


def log_tau(values: np.ndarray) -> np.ndarray:
    """
    log tau with log1p near tau = 1; non-positive cells become NaN.

    Args:
        values: tau values of any shape

    Returns:
        Array of the same shape
    """
    out = np.full(values.shape, np.nan)
    positive = values > 0
    near_one = positive & (np.abs(values - 1.0) < 0.5)
    far = positive & ~near_one
    out[near_one] = np.log1p(values[near_one] - 1.0)
    out[far] = np.log(values[far])
    return out


def _check_tau(taufield: SolutionField) -> None:
    if taufield.quantity is not Quantity.TAU:
        raise GridError(f"Expected a tau field, got {taufield.quantity.value}")


def g_from_tau(taufield: SolutionField) -> SolutionField:
    """
    g = -d/dx log tau by second-order differences.

    Returns:
        g field with the non-finite cells counted in flagged_cells

    Raises:
        GridError: If the field does not hold tau
    """
    _check_tau(taufield)
    values = -second_order_x_derivative(log_tau(taufield.values), taufield.grid.dx)
    flagged = int(np.count_nonzero(~np.isfinite(values)))
    return taufield.derive(values, Quantity.G, flagged_cells=flagged)


def u_from_tau(taufield: SolutionField) -> SolutionField:
    """
    u = -d^2/dx^2 log tau.

    Central second differences inside, one-sided second-order formulas in the
    boundary columns. Cells touching a non-positive tau become NaN and are
    counted in metadata["flagged_cells"].
    """
    _check_tau(taufield)
    values = -second_order_x_second_derivative(
        log_tau(taufield.values), taufield.grid.dx
    )
    flagged = int(np.count_nonzero(~np.isfinite(values)))
    return taufield.derive(values, Quantity.U, flagged_cells=flagged)


def digit_loss_estimate(
    data: ScatteringData,
    rule: QuadratureRule,
    x: float,
    y: float,
    t: float,
    scale: float = 1.0,
    tau: Optional[float] = None,
) -> float:
    """
    log10(sqrt(M) ||P|| / tau) at one point.

    ||P|| is the Frobenius norm of the kernel sample matrix times scale
    (the grid's (Lx Ly / (Nx Ny))^(1/2) in the error harness). A tau already
    computed at this point can be passed in to skip the determinant.

    Returns:
        -inf for a vanishing kernel (no loss), +inf when tau is not positive
    """
    qhat = kernel_matrix(data, rule, x, y, t)
    norm = scaled_frobenius(qhat, scale)
    if norm == 0.0:
        return -math.inf
    if tau is None:
        tau = tau_point(data, rule, x, y, t)
    if not tau > 0:
        return math.inf
    return math.log10(math.sqrt(rule.M) * norm / tau)


def digit_loss_field(
    data: ScatteringData,
    M: int,
    grid: Grid2D,
    t: float,
    workers: Optional[int] = None,
    taufield: Optional[SolutionField] = None,
) -> np.ndarray:
    """
    Digit-loss estimate at every node, scaled by the grid's cell scale.

    Passing the matching Det-CC tau field reuses its values.
    """
    rule = clenshaw_curtis_rule(grid.Lx, M)
    scale = grid.cell_scale
    if taufield is None:
        return sweep_grid(
            lambda x, y: digit_loss_estimate(data, rule, x, y, t, scale), grid, workers
        )
    if taufield.grid != grid or taufield.quantity is not Quantity.TAU:
        raise GridError("tau field does not belong to this grid")
    column = {float(v): i for i, v in enumerate(grid.x)}
    row = {float(v): j for j, v in enumerate(grid.y)}

    def point(x: float, y: float) -> float:
        tau = taufield.values[row[y], column[x]]
        return digit_loss_estimate(data, rule, x, y, t, scale, tau=float(tau))

    return sweep_grid(point, grid, workers)
