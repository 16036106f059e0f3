"""
Test Suite for the GLM Solvers

Unit and integration tests for GLM-RR and GLM-CC.

Key Testing Objectives:
- Verify the system assembly (kernel samples, weight placement)
- Compare g with the one-soliton closed form
- Check failure handling: singular or overflowing systems are flagged,
  never fatal for a grid sweep
- Validate u = d/dx g against the closed form

Test Coverage:
- kernel_matrix, assemble_glm, glm_matrix
- solve_glm_point and solve_glm_grid
- u_from_g and analytic_field
"""

import math
from unittest.mock import patch

import numpy as np
import pytest

from kpsolver.numerics.analysis import max_error
from kpsolver.numerics.fields import Grid2D, GridError, Method, Quantity
from kpsolver.numerics.glm import (
    SingularSystemError,
    analytic_field,
    assemble_glm,
    glm_matrix,
    kernel_matrix,
    solve_glm_grid,
    solve_glm_point,
    u_from_g,
)
from kpsolver.numerics.linalg import SingularMatrixError
from kpsolver.numerics.quadrature import (
    RuleKind,
    clenshaw_curtis_rule,
    riemann_rule,
)
from kpsolver.numerics.scattering import (
    analytic_soliton_g,
    eval_kernel,
    make_data,
    multisoliton_fields,
)

L = 10 * math.pi


class TestAssembly:
    """Tests for the discretised GLM system."""

    def test_kernel_matrix_entries(self, two_soliton):
        rule = clenshaw_curtis_rule(L, 8)
        Q = kernel_matrix(two_soliton, rule, 0.7, -0.2, 0.1)
        assert Q.shape == (5, 5)
        assert Q[1, 3] == eval_kernel(
            two_soliton, rule.nodes[1] + 0.7, rule.nodes[3] + 0.7, -0.2, 0.1
        )

    def test_assemble_rhs(self, one_soliton):
        rule = riemann_rule(L, 8)
        phat, qhat = assemble_glm(one_soliton, rule, -1.0, 0.0, 0.0)
        assert phat[-1] == pytest.approx(eval_kernel(one_soliton, -1.0, -1.0, 0.0, 0.0))
        assert qhat.shape == (rule.size, rule.size)

    def test_weights_scale_rows(self):
        rule = clenshaw_curtis_rule(2.0, 4)
        A = glm_matrix(rule, np.ones((3, 3)))
        np.testing.assert_allclose(np.diag(A), 1.0 - rule.weights)
        np.testing.assert_allclose(A[:, 0] - np.eye(3)[:, 0], -rule.weights)


class TestSolveGLMPoint:
    """Tests for solve_glm_point."""

    @pytest.mark.parametrize("x, y", [(-3.0, 0.5), (0.0, 0.0), (-1.0, -2.0), (1.0, 1.0)])
    def test_one_soliton_cc(self, one_soliton, x, y):
        rule = clenshaw_curtis_rule(L, 128)
        c = one_soliton.components[0]
        g = solve_glm_point(one_soliton, rule, x, y, 0.0)
        assert g == pytest.approx(analytic_soliton_g(c, x, y, 0.0), abs=1e-10)

    def test_one_soliton_at_later_time(self, one_soliton):
        rule = clenshaw_curtis_rule(L, 128)
        c = one_soliton.components[0]
        g = solve_glm_point(one_soliton, rule, -8.0, 0.0, 0.25)
        assert g == pytest.approx(analytic_soliton_g(c, -8.0, 0.0, 0.25), abs=1e-10)

    def test_riemann_first_order(self, one_soliton):
        c = one_soliton.components[0]
        exact = analytic_soliton_g(c, -0.5, 0.0, 0.0)
        errors = [
            abs(solve_glm_point(one_soliton, riemann_rule(L, M), -0.5, 0.0, 0.0) - exact)
            for M in (256, 1024)
        ]
        assert errors[1] < errors[0] / 2

    @pytest.mark.parametrize("x, y, t", [(-2.0, 0.0, 0.0), (0.0, 0.0, 0.0), (-1.0, 1.0, 0.25)])
    def test_two_soliton_cc(self, two_soliton, x, y, t):
        rule = clenshaw_curtis_rule(L, 256)
        g, _ = multisoliton_fields(two_soliton, x, y, t)
        # the half-line solution differs from the truncated one by e^{-1.3 Lx/2}
        assert solve_glm_point(two_soliton, rule, x, y, t) == pytest.approx(float(g), abs=1e-8)

    def test_zero_data(self, zero_data):
        rule = clenshaw_curtis_rule(L, 16)
        assert solve_glm_point(zero_data, rule, 1.0, 2.0, 0.0) == 0.0

    def test_overflow_is_singular_system(self):
        data = make_data([(400.0, 400.0)])
        with pytest.raises(SingularSystemError) as exc:
            solve_glm_point(data, clenshaw_curtis_rule(10.0, 4), 2.0, 0.0, 0.0)
        assert exc.value.pivot_index is None
        assert exc.value.x == 2.0


class TestSolveGLMGrid:
    """Tests for solve_glm_grid."""

    def test_zero_data(self, zero_data, small_grid):
        field = solve_glm_grid(zero_data, RuleKind.CLENSHAW_CURTIS, 8, small_grid, 0.0)
        assert np.all(field.values == 0.0)
        assert field.quantity is Quantity.G
        assert field.method is Method.GLM_CC
        assert field.metadata["M"] == 8
        assert field.metadata["flagged_cells"] == 0

    def test_method_tag(self, zero_data, small_grid):
        field = solve_glm_grid(zero_data, RuleKind.RIEMANN, 4, small_grid, 0.0)
        assert field.method is Method.GLM_RR

    def test_matches_closed_form_left_half(self, one_soliton, small_grid):
        field = solve_glm_grid(one_soliton, RuleKind.CLENSHAW_CURTIS, 128, small_grid, 0.0)
        exact = analytic_field(one_soliton, Quantity.G, small_grid, 0.0)
        assert max_error(field, exact, x_max=0.0) <= 1e-10

    def test_workers_do_not_change_values(self, two_soliton, small_grid):
        serial = solve_glm_grid(two_soliton, RuleKind.CLENSHAW_CURTIS, 16, small_grid, 0.0, 1)
        threaded = solve_glm_grid(
            two_soliton, RuleKind.CLENSHAW_CURTIS, 16, small_grid, 0.0, 4
        )
        np.testing.assert_array_equal(serial.values, threaded.values)

    def test_singular_cells_flagged(self, one_soliton, small_grid):
        with patch(
            "kpsolver.numerics.glm.solve_row_system",
            side_effect=SingularMatrixError(0),
        ):
            field = solve_glm_grid(one_soliton, RuleKind.RIEMANN, 4, small_grid, 0.0)
        assert np.all(np.isnan(field.values))
        assert field.metadata["flagged_cells"] == small_grid.Nx * small_grid.Ny

    @pytest.mark.slow
    @pytest.mark.parametrize("t", [0.0, 0.25])
    def test_left_column_decays(self, experiment_data, experiment_grid, t):
        field = solve_glm_grid(
            experiment_data, RuleKind.CLENSHAW_CURTIS, 128, experiment_grid, t
        )
        assert field.flagged == 0
        assert np.max(np.abs(field.values[:, 0])) <= 1e-8

    @pytest.mark.slow
    def test_two_soliton_cc_converged(self, two_soliton, small_grid):
        coarse = solve_glm_grid(two_soliton, RuleKind.CLENSHAW_CURTIS, 128, small_grid, 0.0)
        fine = solve_glm_grid(two_soliton, RuleKind.CLENSHAW_CURTIS, 256, small_grid, 0.0)
        assert max_error(coarse, fine, x_max=0.0) <= 1e-8


class TestDerivedFields:
    """Tests for u_from_g and analytic_field."""

    def test_u_from_g_second_order(self, one_soliton):
        grid = Grid2D(L, L, 257, 3)
        g = analytic_field(one_soliton, Quantity.G, grid, 0.0)
        exact = analytic_field(one_soliton, Quantity.U, grid, 0.0)
        u = u_from_g(g)
        assert u.quantity is Quantity.U
        assert max_error(u, exact) <= 2 * grid.dx**2

    def test_u_from_g_needs_g(self, one_soliton, small_grid):
        tau = analytic_field(one_soliton, Quantity.TAU, small_grid, 0.0)
        with pytest.raises(GridError):
            u_from_g(tau)

    def test_analytic_needs_single_soliton(self, two_soliton, small_grid):
        with pytest.raises(GridError):
            analytic_field(two_soliton, Quantity.G, small_grid, 0.0)

    def test_analytic_respects_shift(self, small_grid):
        shifted = make_data([(1.0, 0.5)], xshift=1.5, yshift=-0.5)
        field = analytic_field(shifted, "g", small_grid, 0.1)
        c = shifted.components[0]
        X, Y = small_grid.mesh()
        np.testing.assert_allclose(
            field.values, analytic_soliton_g(c, X - 1.5, Y + 0.5, 0.1)
        )
        assert field.method is Method.ANALYTIC
