"""Laplacian-type identity residuals: unconditional formulas, preconditions,
specializations, and second-order convergence."""

import numpy as np
import pytest

from codazzi import PreconditionError
from codazzi.charts import (
    ChartStructure,
    cubic_laplace_constant_sectional_residual,
    cubic_laplace_lagrangian_residual,
    cubic_simons_residuals,
    hessian_from_potential,
    ricci_identity_residual,
    simons_residual,
    sym2_simons_residual,
    weitzenbock_residual,
)
from codazzi.generators import GeneratorSpec, generate

X2 = np.array([0.15, -0.22])


def curved_hessian(h=1e-3, n=2):
    if n == 2:
        potential = "0.5*x1**2*x2**2 + 0.5*(x1**2 + x2**2)"
    else:
        potential = (
            "0.4*x1**2*x2**2 + 0.3*x2**2*x3**2 + 0.35*x1**2*x3**2 "
            "+ 0.5*(x1**2 + x2**2 + x3**2)"
        )
    return hessian_from_potential(potential, [[-0.6, 0.6]] * n, h=h, n=n)


def sphere_chart(h=1e-3, n=2):
    return ChartStructure(
        n, [[-0.4, 0.4]] * n, lambda x: 4.0 * np.eye(n) / (1 + x @ x) ** 2,
        lambda x: np.zeros((n, n, n)), h=h,
    )


def codazzi_beta(n):
    """Closed-form Codazzi 2-form on the stereographic sphere: Hess(x1) + x1 g."""

    def beta(y):
        r2 = float(y @ y)
        e2u = 4.0 / (1 + r2) ** 2
        grad_u = -2.0 * np.asarray(y) / (1 + r2)
        out = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                gamma1 = (
                    (i == 0) * grad_u[j] + (j == 0) * grad_u[i] - (i == j) * grad_u[0]
                )
                out[i, j] = -gamma1 + (y[0] * e2u if i == j else 0.0)
        return out

    return beta


class TestRicciIdentity:
    def test_parallel_field_on_flat_metric(self):
        cs = ChartStructure(2, [[-1, 1]] * 2, lambda x: np.eye(2),
                            lambda x: np.zeros((2, 2, 2)))
        field = lambda y: np.array([1.0, -2.0])
        assert ricci_identity_residual(cs, field, [0.1, 0.3]) < 1e-12

    def test_unconditional_on_arbitrary_fields(self):
        cs = sphere_chart()
        field = lambda y: np.array([[np.sin(y[0]), y[1] ** 2], [y[0] * y[1], np.cos(y[1])]])
        assert ricci_identity_residual(cs, field, X2) < 1e-5

    def test_convergence_factor(self):
        rs = [ricci_identity_residual(curved_hessian(h), curved_hessian(h).a_field, X2)
              for h in (4e-3, 2e-3, 1e-3)]
        for i in range(2):
            assert 3.2 <= rs[i] / rs[i + 1] <= 4.8


class TestSimonsFormula:
    def test_degree_zero_through_four(self):
        cs = sphere_chart()
        fields = [
            lambda y: np.array(np.sin(y[0]) + y[1]),
            lambda y: np.array([np.sin(y[0]), np.cos(y[1])]),
            lambda y: np.array([[np.sin(y[0]), 0.1], [0.1, np.cos(y[1])]]),
            None,
            None,
        ]
        for degree, field in enumerate(fields):
            if field is None:
                continue
            assert simons_residual(cs, field, X2) < 1e-4, degree

    def test_on_cubic_field(self):
        cs = curved_hessian()
        assert simons_residual(cs, cs.a_field, X2) < 1e-4

    def test_degree_four_field(self):
        cs = sphere_chart()
        field = lambda y: np.einsum(
            "i,j,k,l->ijkl", y, y, np.array([1.0, 0.5]), np.array([0.2, 1.0])
        ) + np.sin(y[0]) * np.ones((2, 2, 2, 2))
        assert simons_residual(cs, field, X2) < 1e-3

    def test_halving_reduces_by_four(self):
        rs = [simons_residual(curved_hessian(h), curved_hessian(h).a_field, X2)
              for h in (2e-3, 1e-3)]
        assert 3.2 <= rs[0] / rs[1] <= 4.8


class TestWeitzenbock:
    def test_flat_exact_differential(self):
        cs = ChartStructure(2, [[-1, 1]] * 2, lambda x: np.eye(2),
                            lambda x: np.zeros((2, 2, 2)))
        tau = lambda y: np.array([2 * y[0], 2 * y[1]])  # d(x^2 + y^2)
        out = weitzenbock_residual(cs, tau, [0.2, 0.1])
        assert out["weitzenbock"] < 1e-6

    def test_poincare_and_sphere(self):
        poin = ChartStructure(2, [[-0.5, 0.5], [0.5, 1.5]], lambda x: np.eye(2) / x[1] ** 2,
                              lambda x: np.zeros((2, 2, 2)))
        tau = lambda y: np.array([np.sin(y[0] + 2 * y[1]), np.cos(y[0] - y[1])])
        assert weitzenbock_residual(poin, tau, [0.0, 1.0])["weitzenbock"] < 1e-4
        assert weitzenbock_residual(sphere_chart(), tau, X2)["weitzenbock"] < 1e-4

    def test_scalar_consequence(self):
        out = weitzenbock_residual(
            sphere_chart(), lambda y: np.array([np.sin(y[0] + 2 * y[1]), np.cos(y[0] - y[1])]), X2
        )
        assert out["simons-1form"] < 1e-4

    def test_convergence(self):
        tau = lambda y: np.array([np.sin(y[0] + 2 * y[1]), np.cos(y[0] - y[1])])
        rs = [weitzenbock_residual(sphere_chart(h), tau, X2)["weitzenbock"]
              for h in (4e-3, 2e-3, 1e-3)]
        for i in range(2):
            assert 3.2 <= rs[i] / rs[i + 1] <= 4.8


class TestSym2Simons:
    def test_metric_multiple_trivial(self):
        cs = sphere_chart()
        beta = lambda y: 2.5 * 4.0 * np.eye(2) / (1 + y @ y) ** 2
        residual, eigen_term = sym2_simons_residual(cs, beta, X2)
        assert residual < 1e-8
        assert eigen_term == pytest.approx(0.0, abs=1e-10)

    def test_flat_cubic_potential_hessian(self):
        cs = ChartStructure(2, [[-1, 1]] * 2, lambda x: np.eye(2),
                            lambda x: np.zeros((2, 2, 2)))
        beta = lambda y: np.diag([6.0 * y[0], 6.0 * y[1]])
        residual, eigen_term = sym2_simons_residual(cs, beta, [0.3, 0.2])
        assert residual < 1e-8
        assert eigen_term == 0.0

    def test_codazzi_tensor_on_sphere(self):
        cs = sphere_chart()
        residual, eigen_term = sym2_simons_residual(cs, codazzi_beta(2), X2)
        assert residual < 1e-4
        assert eigen_term != 0.0

    def test_precondition_violation_distinct(self):
        cs = sphere_chart()
        beta = lambda y: np.array([[np.sin(3 * y[0]), 0.0], [0.0, np.cos(2 * y[1])]])
        with pytest.raises(PreconditionError, match="not symmetric"):
            sym2_simons_residual(cs, beta, X2)

    def test_convergence(self):
        rs = [sym2_simons_residual(sphere_chart(h), codazzi_beta(2), X2)[0]
              for h in (4e-3, 2e-3, 1e-3)]
        for i in range(2):
            assert 3.2 <= rs[i] / rs[i + 1] <= 4.8


class TestCubicSimons:
    def test_all_three_forms_on_hessian(self):
        for n in (2, 3):
            cs = curved_hessian(n=n)
            x = np.array([0.15, -0.22, 0.1][:n])
            out = cubic_simons_residuals(cs, x)
            for key, value in out.items():
                assert value < 1e-4, (n, key, value)

    def test_parallel_structure_exact(self):
        cs = generate(GeneratorSpec("G1-constant-A", seed=0))
        out = cubic_simons_residuals(cs, np.array([1.0, 1.0]))
        assert out["laplace-cubic-bracket"] < 1e-8

    def test_trace_free_specialization(self):
        conf = generate(GeneratorSpec("G5-periodic-trig", seed=1,
                                      params={"variant": "conformal", "amp": 0.35}))
        out = cubic_simons_residuals(conf, np.array([1.1, 2.3]))
        assert "laplace-cubic-tracefree" in out
        assert out["laplace-cubic-tracefree"] < 1e-4

    def test_precondition_error_reports_asymmetry(self):
        cs = generate(GeneratorSpec("G4-random-smooth", seed=0))
        with pytest.raises(PreconditionError, match="asymmetry"):
            cubic_simons_residuals(cs, np.array([1.0, 1.0]))

    def test_convergence(self):
        rs = []
        for h in (4e-3, 2e-3, 1e-3):
            cs = curved_hessian(h)
            rs.append(cubic_simons_residuals(cs, X2)["laplace-cubic-ricci"])
        for i in range(2):
            assert 3.2 <= rs[i] / rs[i + 1] <= 4.8


class TestSpecializations:
    def test_constant_sectional_form(self):
        conf = generate(GeneratorSpec("G5-periodic-trig", seed=1,
                                      params={"variant": "conformal", "amp": 0.35}))
        assert cubic_laplace_constant_sectional_residual(conf, np.array([1.1, 2.3])) < 1e-4

    def test_constant_fields_reduce_to_zero_terms(self):
        cs = generate(GeneratorSpec("G3-2d-constant-curvature", params={"chart": True}))
        assert cubic_laplace_constant_sectional_residual(cs, np.array([1.0, 1.0])) < 1e-9

    def test_dual_flat_split_form(self):
        conf = generate(GeneratorSpec("G5-periodic-trig", seed=1,
                                      params={"variant": "conformal", "amp": 0.35}))
        assert cubic_laplace_lagrangian_residual(conf, np.array([1.1, 2.3])) < 1e-4

    def test_dual_flat_split_constant_fields(self):
        cs = generate(GeneratorSpec("G3-2d-constant-curvature", params={"chart": True}))
        # R_hat = 0 and [K,K] = -2 R0, so the split needs c = 2
        assert cubic_laplace_lagrangian_residual(cs, np.array([1.0, 1.0]), c=2.0) < 1e-9

    def test_bad_fit_raises(self):
        cs = generate(GeneratorSpec("G4-random-smooth", seed=2))
        with pytest.raises(PreconditionError):
            cubic_laplace_constant_sectional_residual(cs, np.array([1.0, 1.0]), kappa=5.0)
