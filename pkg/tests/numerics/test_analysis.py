"""
Test Suite for the Error Harness

Key Testing Objectives:
- Validate the scaled RMS, masked max and pointwise errors
- Check ConvergenceReport ordering rules and slope fitting
- Run small convergence studies end to end

Test Coverage:
- rms_error, max_error, relative_max_error, pointwise_error
- ConvergenceRecord / ConvergenceReport
- compute_field and convergence_study
"""

import math

import numpy as np
import pytest

from kpsolver.numerics.analysis import (
    X_MAX_MOD,
    ConvergenceRecord,
    ConvergenceReport,
    StudyError,
    compute_field,
    convergence_study,
    display_region,
    max_error,
    pointwise_error,
    relative_deviation,
    relative_max_error,
    rms_error,
)
from kpsolver.numerics.fields import Grid2D, GridError, Method, Quantity, SolutionField
from kpsolver.numerics.scattering import make_data


def _field(grid, values, quantity=Quantity.G):
    return SolutionField(grid, quantity, 0.0, np.asarray(values, dtype=float), Method.GLM_CC)


def _record(M, error):
    return ConvergenceRecord(
        M=M,
        rms=error,
        max_full=error,
        max_mod=error,
        max_mod2=error,
        pointwise=error,
        cpu_seconds=0.0,
    )


class TestMetrics:
    """Tests for the error metrics."""

    def test_rms_constant_difference(self, small_grid):
        a = _field(small_grid, np.ones(small_grid.shape))
        b = _field(small_grid, np.zeros(small_grid.shape))
        assert rms_error(a, b) == pytest.approx(math.sqrt(small_grid.Lx * small_grid.Ly))

    def test_rms_region(self, small_grid):
        a = _field(small_grid, np.ones(small_grid.shape))
        b = _field(small_grid, np.zeros(small_grid.shape))
        region = display_region(small_grid)
        expected = math.sqrt(region.sum()) * small_grid.cell_scale
        assert rms_error(a, b, region=region) == pytest.approx(expected)

    def test_rms_needs_same_quantity(self, small_grid):
        a = _field(small_grid, np.ones(small_grid.shape))
        b = _field(small_grid, np.ones(small_grid.shape), Quantity.U)
        with pytest.raises(GridError):
            rms_error(a, b)

    def test_max_error_masks(self):
        grid = Grid2D(40.0, 4.0, 41, 3)
        X, _ = grid.mesh()
        a = _field(grid, np.where(X > 15, 5.0, np.where(X > 5, 2.0, 1.0)))
        b = _field(grid, np.zeros(grid.shape))
        assert max_error(a, b) == 5.0
        assert max_error(a, b, X_MAX_MOD) == 2.0
        assert max_error(a, b, 0.0) == 1.0
        assert max_error(a, b, -100.0) == 0.0

    def test_relative_max_error(self, small_grid):
        ref = _field(small_grid, np.full(small_grid.shape, 4.0), Quantity.TAU)
        a = _field(small_grid, np.full(small_grid.shape, 5.0), Quantity.TAU)
        assert relative_max_error(a, ref) == pytest.approx(0.25)

    def test_relative_max_skips_invalid_reference(self, small_grid):
        ref_values = np.full(small_grid.shape, 2.0)
        ref_values[0, 0] = 0.0
        ref_values[1, 1] = np.nan
        ref_values[2, 2] = np.inf
        ref = _field(small_grid, ref_values, Quantity.TAU)
        a = _field(small_grid, np.full(small_grid.shape, 3.0), Quantity.TAU)
        assert relative_max_error(a, ref) == pytest.approx(0.5)
        deviation = relative_deviation(a, ref)
        assert deviation.metadata["masked_cells"] == 3
        assert deviation.values[0, 0] == 0.0

    def test_relative_deviation_keeps_bad_values(self, small_grid):
        ref = _field(small_grid, np.full(small_grid.shape, 2.0), Quantity.TAU)
        values = np.full(small_grid.shape, 2.0)
        values[3, 4] = np.nan
        deviation = relative_deviation(_field(small_grid, values, Quantity.TAU), ref)
        assert np.isnan(deviation.values[3, 4])
        assert deviation.metadata["masked_cells"] == 0

    def test_pointwise_uses_nearest_node(self, small_grid):
        values = np.zeros(small_grid.shape)
        j, i = small_grid.nearest_index(6.4, 6.4)
        values[j, i] = 3.0
        a = _field(small_grid, values)
        b = _field(small_grid, np.zeros(small_grid.shape))
        assert pointwise_error(a, b) == 3.0
        assert pointwise_error(a, b, (-6.4, -6.4)) == 0.0


class TestConvergenceReport:
    """Tests for ConvergenceReport."""

    def test_unsorted_rejected(self):
        with pytest.raises(StudyError):
            ConvergenceReport(Method.GLM_CC, 64, [_record(8, 1.0), _record(4, 1.0)])

    def test_reference_must_exceed(self):
        with pytest.raises(StudyError):
            ConvergenceReport(Method.GLM_CC, 8, [_record(4, 1.0), _record(8, 1.0)])

    def test_slope(self):
        records = [_record(M, 3.0 / M) for M in (4, 8, 16, 32)]
        report = ConvergenceReport(Method.GLM_RR, 1024, records)
        assert report.loglog_slope() == pytest.approx(-1.0)
        assert report.loglog_slope("rms") == pytest.approx(-1.0)

    def test_slope_skips_zero_errors(self):
        records = [_record(4, 0.25), _record(8, 0.0625), _record(16, 0.0)]
        report = ConvergenceReport(Method.GLM_CC, 32, records)
        assert report.loglog_slope() == pytest.approx(-2.0)

    def test_slope_needs_two_points(self):
        report = ConvergenceReport(Method.GLM_CC, 32, [_record(4, 0.0), _record(8, 0.0)])
        with pytest.raises(StudyError):
            report.loglog_slope()

    def test_as_dict(self, small_grid):
        report = ConvergenceReport(Method.DET_CC, 16, [_record(4, 1.0)], grid=small_grid)
        data = report.as_dict()
        assert data["method"] == "det-cc"
        assert data["records"][0]["M"] == 4
        assert data["grid"]["Nx"] == small_grid.Nx


class TestConvergenceStudy:
    """End-to-end convergence studies on small grids."""

    @pytest.mark.parametrize("method", [Method.GLM_RR, Method.GLM_CC, Method.DET_CC])
    def test_zero_data_has_zero_error(self, zero_data, small_grid, method):
        report = convergence_study(zero_data, method, small_grid, 0.0, [2, 1], 3, compare_u=True)
        assert [r.M for r in report.records] == [2, 4]
        assert report.reference_M == 8
        for r in report.records:
            assert r.rms == 0.0
            assert r.max_full == 0.0
            assert r.pointwise == 0.0
            assert r.u_rms == 0.0
            assert r.flagged_cells == 0
            if method is Method.DET_CC:
                assert r.absolute_rms == 0.0
                assert r.absolute_max == 0.0
            else:
                assert r.absolute_rms is None

    def test_u_errors_only_on_request(self, zero_data, small_grid):
        report = convergence_study(zero_data, Method.GLM_CC, small_grid, 0.0, [1], 2)
        assert report.records[0].u_rms is None
        assert report.records[0].u_max is None

    @pytest.mark.parametrize(
        "exponents, reference", [([], 4), ([0, 1], 4), ([2, 4], 4), ([2, 5], 3)]
    )
    def test_bad_exponents(self, zero_data, small_grid, exponents, reference):
        with pytest.raises(StudyError):
            convergence_study(zero_data, Method.GLM_CC, small_grid, 0.0, exponents, reference)

    def test_no_study_for_analytic(self, one_soliton, small_grid):
        with pytest.raises(StudyError):
            compute_field(one_soliton, Method.ANALYTIC, 8, small_grid, 0.0)

    def test_compute_field_quantities(self, zero_data, small_grid):
        assert compute_field(zero_data, "det-cc", 4, small_grid, 0.0).quantity is Quantity.TAU
        assert compute_field(zero_data, "glm-rr", 4, small_grid, 0.0).quantity is Quantity.G

    def test_riemann_first_order(self, one_soliton):
        grid = Grid2D(10 * math.pi, 10 * math.pi, 5, 3)
        report = convergence_study(
            one_soliton, Method.GLM_RR, grid, 0.0, [6, 7, 8], 11, point=(0.0, 0.0)
        )
        assert -1.5 <= report.loglog_slope("pointwise") <= -0.5

    @pytest.mark.slow
    def test_clenshaw_curtis_spectral(self, two_soliton, small_grid):
        report = convergence_study(two_soliton, Method.GLM_CC, small_grid, 0.0, [7, 8], 10)
        assert report.records[-1].max_mod2 <= 1e-10

    def test_det_cc_records_are_relative(self, small_grid):
        data = make_data([(1.55, 1.45)], xshift=10.0, yshift=12.0)
        report = convergence_study(data, Method.DET_CC, small_grid, 0.0, [3], 6)
        record = report.records[0]
        assert record.absolute_rms is not None
        reference = compute_field(data, Method.DET_CC, 64, small_grid, 0.0)
        coarse = compute_field(data, Method.DET_CC, 8, small_grid, 0.0)
        assert record.max_full == pytest.approx(relative_max_error(coarse, reference))
        assert record.absolute_max == pytest.approx(max_error(coarse, reference))


@pytest.mark.slow
class TestTwoSolitonConvergence:
    """Convergence of the quadrature methods on the shifted two-soliton data."""

    @pytest.mark.parametrize("method", [Method.GLM_CC, Method.DET_CC])
    def test_geometric_decay_at_point(self, experiment_data, method):
        grid = Grid2D(10 * math.pi, 10 * math.pi, 64, 64)
        report = convergence_study(
            experiment_data, method, grid, 0.25, range(2, 10), 10, point=(6.4, 6.4)
        )
        errors = report.column("pointwise")
        ms = report.column("M")
        assert errors[ms == 256][0] <= 1e-12
        for M, previous, current in zip(ms[1:], errors[:-1], errors[1:]):
            if M > 16 and previous > 1e-12:
                assert current <= previous / 2

    @pytest.mark.parametrize("method", [Method.GLM_CC, Method.DET_CC])
    def test_error_floors(self, experiment_data, method):
        grid = Grid2D(10 * math.pi, 10 * math.pi, 64, 64)
        report = convergence_study(experiment_data, method, grid, 0.25, range(6, 10), 10)
        for record in report.records:
            assert record.max_full >= record.max_mod >= record.max_mod2
            assert 1e-7 <= record.rms <= 1e-3
        assert report.records[-1].max_mod2 <= 1e-10
