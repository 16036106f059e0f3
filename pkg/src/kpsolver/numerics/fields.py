"""
Evaluation grids and solution fields.

A Grid2D is the (x, y) lattice on [-Lx/2, Lx/2] x [-Ly/2, Ly/2] where a KP
field is sampled. Quadrature methods use inclusive endpoints
(dx = Lx/(Nx - 1)); the pseudo-spectral integrator uses the periodic lattice
(dx = Lx/Nx, right endpoint excluded).

A SolutionField holds g, u or tau values on a grid together with the time,
the method that produced them and free-form metadata. Values are stored with
shape (Ny, Nx): row j is y_j and column i is x_i.

sweep_grid runs an independent per-point computation over a grid on a thread
pool. Rows are mapped in order, so the result never depends on scheduling.
"""

import enum
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

log = logging.getLogger(__name__)

THREADS_ENV = "KP_THREADS"


class GridError(ValueError):
    """Raised for invalid grids or fields that cannot be combined."""

    pass


class Quantity(str, enum.Enum):
    G = "g"
    U = "u"
    TAU = "tau"


class Method(str, enum.Enum):
    GLM_RR = "glm-rr"
    GLM_CC = "glm-cc"
    DET_CC = "det-cc"
    FFT2_EXP = "fft2-exp"
    ANALYTIC = "analytic"


def default_workers() -> int:
    """
    Worker count for grid sweeps, capped by the KP_THREADS variable.

    Returns 1 when the variable is unset or invalid.
    """
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        log.warning(f"Ignoring invalid {THREADS_ENV}={raw!r}")
        return 1
    return max(1, value)


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class Grid2D:
    """
    Uniform (x, y) lattice centred on the origin.

    Attributes:
        Lx: Domain length in x
        Ly: Domain length in y
        Nx: Number of x nodes (at least 3)
        Ny: Number of y nodes (at least 3)
        periodic: Exclude the right/top endpoint (spectral convention)
    """

    Lx: float
    Ly: float
    Nx: int
    Ny: int
    periodic: bool = False

    def __post_init__(self) -> None:
        if not (self.Lx > 0 and self.Ly > 0):
            raise GridError(f"Domain lengths must be positive: {self.Lx}, {self.Ly}")
        if self.Nx < 3 or self.Ny < 3:
            raise GridError(f"Grid needs at least 3x3 nodes: {self.Nx}x{self.Ny}")

    @property
    def dx(self) -> float:
        return self.Lx / (self.Nx if self.periodic else self.Nx - 1)

    @property
    def dy(self) -> float:
        return self.Ly / (self.Ny if self.periodic else self.Ny - 1)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.Ny, self.Nx)

    @property
    def x(self) -> np.ndarray:
        return -self.Lx / 2.0 + self.dx * np.arange(self.Nx)

    @property
    def y(self) -> np.ndarray:
        return -self.Ly / 2.0 + self.dy * np.arange(self.Ny)

    @property
    def cell_scale(self) -> float:
        """(Lx Ly / (Nx Ny))^(1/2), the RMS weighting of the error harness."""
        return math.sqrt(self.Lx * self.Ly / (self.Nx * self.Ny))

    @property
    def is_power_of_two(self) -> bool:
        return is_power_of_two(self.Nx) and is_power_of_two(self.Ny)

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays X, Y of shape (Ny, Nx)."""
        return np.meshgrid(self.x, self.y)

    def nearest_index(self, x0: float, y0: float) -> Tuple[int, int]:
        """(row, column) of the node nearest to (x0, y0)."""
        i = int(np.argmin(np.abs(self.x - x0)))
        j = int(np.argmin(np.abs(self.y - y0)))
        return j, i

    def region_mask(
        self,
        x_min: float = -math.inf,
        x_max: float = math.inf,
        y_min: float = -math.inf,
        y_max: float = math.inf,
    ) -> np.ndarray:
        """Boolean (Ny, Nx) mask of nodes inside the closed box."""
        X, Y = self.mesh()
        return (X >= x_min) & (X <= x_max) & (Y >= y_min) & (Y <= y_max)

    def display_mask(self) -> np.ndarray:
        """Nodes in [-Lx/4, Lx/2] x [-Ly/4, Ly/2], the framing used for plots."""
        return self.region_mask(x_min=-self.Lx / 4.0, y_min=-self.Ly / 4.0)

    def describe(self) -> Dict[str, Any]:
        return {
            "Lx": self.Lx,
            "Ly": self.Ly,
            "Nx": self.Nx,
            "Ny": self.Ny,
            "periodic": self.periodic,
        }


@dataclass(frozen=True, eq=False)
class SolutionField:
    """
    Real field values on a grid.

    Attributes:
        grid: The evaluation lattice
        quantity: g, u or tau
        t: Time stamp
        values: Array of shape (Ny, Nx); NaN marks flagged cells
        method: Method tag of the producer
        metadata: Free-form diagnostics (flagged cell count, timings, ...)
    """

    grid: Grid2D
    quantity: Quantity
    t: float
    values: np.ndarray
    method: Method
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.values.shape != self.grid.shape:
            raise GridError(
                f"Field shape {self.values.shape} does not match grid {self.grid.shape}"
            )

    @property
    def flagged(self) -> int:
        return int(np.count_nonzero(~np.isfinite(self.values)))

    def derive(
        self, values: np.ndarray, quantity: Quantity, **metadata: Any
    ) -> "SolutionField":
        """New field on the same grid, time and method with merged metadata."""
        return replace(
            self,
            values=values,
            quantity=quantity,
            metadata={**self.metadata, **metadata},
        )


def check_compatible(a: SolutionField, b: SolutionField) -> None:
    """
    Raises:
        GridError: If the fields live on different grids or hold different quantities
    """
    if a.grid != b.grid:
        raise GridError(f"Grid mismatch: {a.grid} vs {b.grid}")
    if a.quantity != b.quantity:
        raise GridError(f"Quantity mismatch: {a.quantity.value} vs {b.quantity.value}")


def sweep_grid(
    point: Callable[[float, float], float],
    grid: Grid2D,
    workers: Optional[int] = None,
) -> np.ndarray:
    """
    Evaluate point(x, y) at every node of the grid.

    Args:
        point: Pure per-point function
        grid: Evaluation lattice
        workers: Thread count, default from KP_THREADS

    Returns:
        Array of shape (Ny, Nx)
    """
    xs = grid.x
    workers = workers or default_workers()

    def row(y: float) -> np.ndarray:
        return np.array([point(float(x), y) for x in xs])

    if workers == 1:
        rows = [row(float(y)) for y in grid.y]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, (float(y) for y in grid.y)))
    return np.vstack(rows)


def second_order_x_derivative(values: np.ndarray, dx: float) -> np.ndarray:
    """
    First x-derivative along axis 1 with second-order stencils.

    Central differences inside, one-sided three-point differences at the
    first and last columns.
    """
    out = np.empty_like(values)
    out[:, 1:-1] = (values[:, 2:] - values[:, :-2]) / (2.0 * dx)
    out[:, 0] = (-3.0 * values[:, 0] + 4.0 * values[:, 1] - values[:, 2]) / (2.0 * dx)
    out[:, -1] = (3.0 * values[:, -1] - 4.0 * values[:, -2] + values[:, -3]) / (
        2.0 * dx
    )
    return out


def second_order_x_second_derivative(values: np.ndarray, dx: float) -> np.ndarray:
    """
    Second x-derivative along axis 1 with second-order stencils.

    Needs at least four columns for the one-sided boundary formula
    (2f0 - 5f1 + 4f2 - f3) / dx^2; with three columns the boundary columns
    reuse the interior value.
    """
    out = np.empty_like(values)
    out[:, 1:-1] = (values[:, 2:] - 2.0 * values[:, 1:-1] + values[:, :-2]) / dx**2
    if values.shape[1] >= 4:
        out[:, 0] = (
            2.0 * values[:, 0] - 5.0 * values[:, 1] + 4.0 * values[:, 2] - values[:, 3]
        ) / dx**2
        out[:, -1] = (
            2.0 * values[:, -1]
            - 5.0 * values[:, -2]
            + 4.0 * values[:, -3]
            - values[:, -4]
        ) / dx**2
    else:
        out[:, 0] = out[:, 1]
        out[:, -1] = out[:, -2]
    return out
