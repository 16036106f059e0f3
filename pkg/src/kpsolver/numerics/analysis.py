"""
Error metrics and convergence studies for the KP solvers.

A convergence study computes one method's field for a range of quadrature
parameters M = 2^m and measures it against the same method at a reference
M = 2^m_ref. GLM methods are compared through g, Det-CC through the relative tau
deviation |tau_M - tau_ref| / |tau_ref|.

Each record holds the scaled RMS error over the full grid, max errors over
three nested x-ranges (full domain, x <= 10.8, x <= 0), the error at the grid
node nearest a sample point, and the wall-clock time of the sweep.
"""

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..utils.logger import LoggerAdapter
from .fields import Grid2D, Method, SolutionField, check_compatible
from .fredholm import tau_grid, u_from_tau
from .glm import solve_glm_grid, u_from_g
from .linalg import scaled_frobenius
from .quadrature import RuleKind
from .scattering import ScatteringData

log = logging.getLogger(__name__)

X_MAX_MOD = 10.8
X_MAX_MOD2 = 0.0
DEFAULT_POINT = (6.4, 6.4)


class StudyError(ValueError):
    """Raised for inconsistent convergence study parameters."""

    pass


def display_region(grid: Grid2D) -> np.ndarray:
    """Mask of [-Lx/4, Lx/2] x [-Ly/4, Ly/2]."""
    return grid.display_mask()


def rms_error(
    a: SolutionField, b: SolutionField, region: Optional[np.ndarray] = None
) -> float:
    """
    Frobenius norm of a - b scaled by (Lx Ly / (Nx Ny))^(1/2).

    Args:
        a, b: Fields on the same grid holding the same quantity
        region: Optional boolean mask; cells outside it do not contribute

    Raises:
        GridError: If the fields cannot be compared
    """
    check_compatible(a, b)
    diff = a.values - b.values
    if region is not None:
        diff = np.where(region, diff, 0.0)
    return scaled_frobenius(diff, a.grid.cell_scale)


def max_error(a: SolutionField, b: SolutionField, x_max: float = math.inf) -> float:
    """
    Max |a - b| over the cells with x <= x_max.

    Args:
        a, b: Fields on the same grid holding the same quantity
        x_max: Right end of the x-range; inf for the full domain, X_MAX_MOD
            and X_MAX_MOD2 for the restricted ranges

    Returns:
        The maximum, 0 when no cell qualifies
    """
    check_compatible(a, b)
    mask = a.grid.region_mask(x_max=x_max)
    if not mask.any():
        return 0.0
    return float(np.max(np.abs(a.values - b.values)[mask]))


def relative_deviation(a: SolutionField, reference: SolutionField) -> SolutionField:
    """
    |a - ref| / |ref| cell by cell.

    Cells whose reference is zero or not finite carry no relative information
    and are set to 0; a non-finite value of a against a valid reference stays
    non-finite.

    Args:
        a: Field to measure
        reference: Field on the same grid holding the same quantity

    Returns:
        Field of relative deviations with "masked_cells" in its metadata

    Raises:
        GridError: If the fields cannot be compared
    """
    check_compatible(a, reference)
    ref = reference.values
    valid = np.isfinite(ref) & (ref != 0)
    rel = np.zeros(ref.shape)
    with np.errstate(invalid="ignore"):
        rel[valid] = np.abs(a.values[valid] - ref[valid]) / np.abs(ref[valid])
    return a.derive(rel, a.quantity, masked_cells=int(np.count_nonzero(~valid)))


def relative_max_error(
    a: SolutionField, reference: SolutionField, x_max: float = math.inf
) -> float:
    """
    Max |a - ref| / |ref| over the cells with x <= x_max.

    Reference cells that are zero or not finite are skipped.

    Returns:
        The maximum, 0 when no valid cell qualifies
    """
    deviation = relative_deviation(a, reference)
    mask = a.grid.region_mask(x_max=x_max)
    if not mask.any():
        return 0.0
    return float(np.max(deviation.values[mask]))


def pointwise_error(
    a: SolutionField, b: SolutionField, point: Tuple[float, float] = DEFAULT_POINT
) -> float:
    """|a - b| at the grid node nearest the sample point."""
    check_compatible(a, b)
    j, i = a.grid.nearest_index(*point)
    return float(abs(a.values[j, i] - b.values[j, i]))


@dataclass(frozen=True)
class ConvergenceRecord:
    """
    Errors of one M against the reference.

    For Det-CC the rms, max and pointwise errors are relative to |tau_ref|,
    since tau spans many orders of magnitude over the grid; absolute_rms and
    absolute_max keep the plain tau differences. u_rms and u_max are filled
    only when the study compares u fields as well.
    """

    M: int
    rms: float
    max_full: float
    max_mod: float
    max_mod2: float
    pointwise: float
    cpu_seconds: float
    flagged_cells: int = 0
    absolute_rms: Optional[float] = None
    absolute_max: Optional[float] = None
    u_rms: Optional[float] = None
    u_max: Optional[float] = None

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ConvergenceReport:
    """
    Convergence data of one method.

    Attributes:
        method: The method studied
        reference_M: Quadrature parameter of the reference field
        records: One record per M, ascending
        grid: Evaluation lattice
        t: Time
        point: Requested sample point; the nearest node is used
        reference_seconds: Wall-clock time of the reference sweep
    """

    method: Method
    reference_M: int
    records: List[ConvergenceRecord] = field(default_factory=list)
    grid: Optional[Grid2D] = None
    t: float = 0.0
    point: Tuple[float, float] = DEFAULT_POINT
    reference_seconds: float = 0.0

    def __post_init__(self) -> None:
        ms = [r.M for r in self.records]
        if ms != sorted(ms):
            raise StudyError(f"Records must be sorted by M, got {ms}")
        if ms and max(ms) >= self.reference_M:
            raise StudyError(
                f"Reference M={self.reference_M} must exceed every studied M"
            )

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    def loglog_slope(self, name: str = "pointwise") -> float:
        """Least-squares slope of log10(error) against log10(M)."""
        errors = self.column(name)
        ms = self.column("M")
        keep = errors > 0
        if np.count_nonzero(keep) < 2:
            raise StudyError(f"Need two positive '{name}' errors to fit a slope")
        slope, _ = np.polyfit(np.log10(ms[keep]), np.log10(errors[keep]), 1)
        return float(slope)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method.value,
            "reference_M": self.reference_M,
            "t": self.t,
            "point": list(self.point),
            "grid": self.grid.describe() if self.grid else None,
            "reference_seconds": self.reference_seconds,
            "records": [r.as_dict() for r in self.records],
        }


def compute_field(
    data: ScatteringData,
    method: Method,
    M: int,
    grid: Grid2D,
    t: float,
    workers: Optional[int] = None,
) -> SolutionField:
    """
    The field a convergence study compares: g for the GLM methods, tau for Det-CC.

    Raises:
        StudyError: For methods without a quadrature parameter
    """
    method = Method(method)
    if method is Method.GLM_RR:
        return solve_glm_grid(data, RuleKind.RIEMANN, M, grid, t, workers)
    if method is Method.GLM_CC:
        return solve_glm_grid(data, RuleKind.CLENSHAW_CURTIS, M, grid, t, workers)
    if method is Method.DET_CC:
        return tau_grid(data, M, grid, t, workers)
    raise StudyError(f"No convergence study for method {method.value}")


def _to_u(f: SolutionField) -> SolutionField:
    return u_from_tau(f) if f.method is Method.DET_CC else u_from_g(f)


def _relative_pair(
    f: SolutionField, reference: SolutionField
) -> Tuple[SolutionField, SolutionField]:
    # |f - ref| / |ref| measured against zero
    deviation = relative_deviation(f, reference)
    return deviation, deviation.derive(np.zeros(f.grid.shape), deviation.quantity)


def _timed(
    data: ScatteringData,
    method: Method,
    M: int,
    grid: Grid2D,
    t: float,
    workers: Optional[int],
) -> Tuple[SolutionField, float]:
    started = time.perf_counter()
    f = compute_field(data, method, M, grid, t, workers)
    return f, time.perf_counter() - started


def convergence_study(
    data: ScatteringData,
    method: Method,
    grid: Grid2D,
    t: float,
    m_exponents: Sequence[int],
    reference_exponent: int,
    point: Tuple[float, float] = DEFAULT_POINT,
    compare_u: bool = False,
    workers: Optional[int] = None,
) -> ConvergenceReport:
    """
    Measure one method at M = 2^m for each m against M = 2^reference_exponent.

    Configurations run one after another so the timings do not overlap.

    Args:
        data: Scattering data
        method: GLM-RR, GLM-CC or Det-CC
        grid: Evaluation lattice
        t: Time
        m_exponents: Exponents m of the studied M = 2^m, any order
        reference_exponent: Exponent of the reference M
        point: Point whose nearest node gives the pointwise error
        compare_u: Also compare the derived u fields
        workers: Thread count for each grid sweep

    Returns:
        Report with one record per M, ascending

    Raises:
        StudyError: If the exponents are empty, not positive, or the reference
            does not exceed them
    """
    method = Method(method)
    exponents = sorted(set(int(m) for m in m_exponents))
    if not exponents:
        raise StudyError("No exponents to study")
    if exponents[0] < 1:
        raise StudyError(f"Exponents must be at least 1, got {exponents[0]}")
    if reference_exponent <= exponents[-1]:
        raise StudyError(
            f"Reference exponent {reference_exponent} must exceed {exponents[-1]}"
        )

    reference_M = 2**reference_exponent
    study_log = LoggerAdapter(log, {"method": method.value, "M": reference_M})
    study_log.info(f"Computing reference on {grid.Nx}x{grid.Ny} grid, t={t:g}")
    reference, reference_seconds = _timed(data, method, reference_M, grid, t, workers)
    reference_u = _to_u(reference) if compare_u else None

    records = []
    for m in exponents:
        M = 2**m
        step_log = LoggerAdapter(log, {"method": method.value, "M": M})
        f, seconds = _timed(data, method, M, grid, t, workers)
        u = _to_u(f) if reference_u is not None else None
        if method is Method.DET_CC:
            measured, against = _relative_pair(f, reference)
            absolute = {
                "absolute_rms": rms_error(f, reference),
                "absolute_max": max_error(f, reference),
            }
        else:
            measured, against = f, reference
            absolute = {}
        record = ConvergenceRecord(
            M=M,
            rms=rms_error(measured, against),
            max_full=max_error(measured, against),
            max_mod=max_error(measured, against, X_MAX_MOD),
            max_mod2=max_error(measured, against, X_MAX_MOD2),
            pointwise=pointwise_error(measured, against, point),
            cpu_seconds=seconds,
            flagged_cells=f.flagged,
            **absolute,
            u_rms=rms_error(u, reference_u) if u is not None else None,
            u_max=max_error(u, reference_u) if u is not None else None,
        )
        step_log.info(
            f"rms={record.rms:.3e} max={record.max_full:.3e} "
            f"pointwise={record.pointwise:.3e} in {seconds:.2f}s"
        )
        records.append(record)

    return ConvergenceReport(
        method=method,
        reference_M=reference_M,
        records=records,
        grid=grid,
        t=t,
        point=point,
        reference_seconds=reference_seconds,
    )
