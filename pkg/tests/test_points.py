import numpy as np
import pytest

from codazzi import (
    CubicForm,
    CurvTensor,
    MetricPoint,
    PreconditionError,
    StatPoint,
    bracket_kk,
    best_fit_curvature_coefficient,
    check_ineq_eighth,
    check_ineq_n2over3,
    check_ineq_quarter,
    constant_curvature_residual,
    lagrangian_gauss_residual,
    lpq,
    r0_curvature,
    random_stat_point,
    ric_k,
    ric_k_from_bracket,
    rho_k,
    scalar_gap_bounds,
    sectional_k,
    trace_free_part,
)


def commutator_bracket_oracle(sp):
    """Brute-force [K,K] through explicit matrix commutators per basis pair."""
    n = sp.n
    k = sp.K.array
    out = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            ki = k[:, i, :]
            kj = k[:, j, :]
            comm = ki @ kj - kj @ ki
            for kk in range(n):
                out[i, j, kk, :] = sp.g.components @ comm[:, kk]
    return out


def trace_oracle_ric_k(sp):
    b = bracket_kk(sp).array
    up = np.einsum("ml,ijkl->mijk", sp.g.inverse, b)
    return np.einsum("iijk->jk", up)


class TestStatPoint:
    def test_trace_ingredients(self, eq_point):
        assert np.allclose(eq_point.E, [0.0, 4.0])
        assert np.allclose(eq_point.tau, [0.0, 4.0])
        assert not eq_point.trace_free

    def test_tau_is_operator_trace(self, rng):
        sp = random_stat_point(4, rng, metric="random")
        for i in range(4):
            e = np.zeros(4)
            e[i] = 1.0
            assert abs(sp.tau[i] - np.trace(sp.k_operator(e))) < 1e-12

    def test_round_trip_a_equals_g_k(self, rng):
        sp = random_stat_point(3, rng, metric="random")
        rebuilt = np.einsum("lm,mij->ijl", sp.g.components, sp.K.array)
        assert np.max(np.abs(rebuilt - sp.A.dense)) < 1e-13

    def test_trace_free_flag(self, g3_point):
        assert g3_point.trace_free


class TestBracketKK:
    def test_zero_cubic(self):
        sp = StatPoint(MetricPoint(np.eye(3)), CubicForm.zero(3))
        assert np.all(bracket_kk(sp).array == 0.0)

    def test_g3_sectional_entry(self, g3_point):
        b = bracket_kk(g3_point).array
        assert b[0, 1, 1, 0] == pytest.approx(-2.0, abs=1e-13)

    def test_matches_commutator_oracle(self, eq_point, rng):
        for sp in (eq_point, random_stat_point(4, rng, metric="random")):
            assert np.max(np.abs(bracket_kk(sp).array - commutator_bracket_oracle(sp))) < 1e-13

    def test_riemann_symmetries(self, rng):
        sp = random_stat_point(3, rng, metric="random")
        bracket_kk(sp).check(tol=1e-10, riemannian=True)


class TestRicK:
    def test_zero(self):
        sp = StatPoint(MetricPoint(np.eye(2)), CubicForm.zero(2))
        assert np.all(ric_k(sp) == 0.0)

    def test_g3_diagonal(self, g3_point):
        assert np.allclose(ric_k(g3_point), np.diag([-2.0, -2.0]), atol=1e-13)

    def test_formula_equals_direct_trace(self, eq_point, rng):
        for sp in (eq_point, random_stat_point(5, rng, metric="random")):
            assert np.max(np.abs(ric_k(sp) - trace_oracle_ric_k(sp))) < 1e-12
            assert np.max(np.abs(ric_k_from_bracket(sp) - ric_k(sp))) < 1e-12

    def test_symmetric(self, rng):
        r = ric_k(random_stat_point(4, rng, metric="random"))
        assert np.allclose(r, r.T, atol=1e-13)

    def test_negative_semidefinite_when_trace_free(self, rng):
        for seed in range(20):
            sp = random_stat_point(4, np.random.default_rng(seed), trace_free=True)
            eigs = np.linalg.eigvalsh(ric_k(sp))
            assert np.all(eigs <= 1e-12)


class TestRhoK:
    def test_values(self, eq_point, g3_point):
        via_trace, via_norms = rho_k(eq_point)
        assert via_trace == pytest.approx(4.0, abs=1e-12)
        assert via_norms == pytest.approx(16.0 - 12.0, abs=1e-12)
        via_trace, via_norms = rho_k(g3_point)
        assert via_trace == pytest.approx(-4.0, abs=1e-12)
        assert via_norms == pytest.approx(-4.0, abs=1e-12)

    def test_two_routes_agree(self, rng):
        for n in (2, 3, 5):
            sp = random_stat_point(n, rng, metric="random")
            via_trace, via_norms = rho_k(sp)
            assert abs(via_trace - via_norms) < 1e-12 * max(1.0, abs(via_trace))


class TestSectionalK:
    def test_zero(self):
        sp = StatPoint(MetricPoint(np.eye(2)), CubicForm.zero(2))
        assert sectional_k(sp, [1, 0], [0, 1]) == 0.0

    def test_g3_plane(self, g3_point):
        assert sectional_k(g3_point, [1, 0], [0, 1]) == pytest.approx(-2.0, abs=1e-12)

    def test_invariant_under_respanning(self, g3_point, rng):
        assert sectional_k(g3_point, [1, 1], [1, -1]) == pytest.approx(-2.0, abs=1e-12)
        sp = random_stat_point(4, rng, metric="random")
        x, y = rng.uniform(-1, 1, (2, 4))
        base = sectional_k(sp, x, y)
        m = rng.uniform(-1, 1, (2, 2)) + 2 * np.eye(2)
        x2 = m[0, 0] * x + m[0, 1] * y
        y2 = m[1, 0] * x + m[1, 1] * y
        assert sectional_k(sp, x2, y2) == pytest.approx(base, rel=1e-10, abs=1e-12)

    def test_dependent_inputs(self, g3_point):
        with pytest.raises(PreconditionError):
            sectional_k(g3_point, [1.0, 2.0], [2.0, 4.0])


class TestQuarterInequality:
    def test_equality_point_strict_at_e2(self, eq_point):
        lhs, rhs, cert = check_ineq_quarter(eq_point, [0.0, 1.0])
        assert lhs == pytest.approx(2.0, abs=1e-13)
        assert rhs == pytest.approx(4.0, abs=1e-13)
        assert not cert.holds

    def test_trivial_structure_equality(self):
        sp = StatPoint(MetricPoint(np.eye(3)), CubicForm.zero(3))
        lhs, rhs, cert = check_ineq_quarter(sp, [1.0, 0.0, 0.0])
        assert lhs == rhs == 0.0
        assert cert.holds

    def test_zero_vector_rejected(self, eq_point):
        with pytest.raises(PreconditionError):
            check_ineq_quarter(eq_point, [0.0, 0.0])

    def test_random_sweep_never_violated(self):
        for seed in range(200):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(2, 6))
            sp = random_stat_point(n, rng, metric="random")
            u = rng.uniform(-1, 1, n)
            lhs, rhs, _ = check_ineq_quarter(sp, u)
            assert lhs <= rhs + 1e-12


class TestEighthInequality:
    def test_equality_point_at_e1(self, eq_point):
        lhs, rhs, cert = check_ineq_eighth(eq_point, [1.0, 0.0])
        assert lhs == pytest.approx(2.0, abs=1e-13)
        assert rhs == pytest.approx(2.0, abs=1e-13)
        assert cert.holds

    def test_zero_cubic(self):
        sp = StatPoint(MetricPoint(np.eye(2)), CubicForm.zero(2))
        lhs, rhs, cert = check_ineq_eighth(sp, [0.0, 1.0])
        assert lhs == rhs == 0.0
        assert cert.holds

    def test_precondition_violation_is_distinct(self, eq_point):
        with pytest.raises(PreconditionError, match="does not apply"):
            check_ineq_eighth(eq_point, [0.0, 1.0])

    def test_random_sweep(self):
        violations = 0
        for seed in range(200):
            rng = np.random.default_rng(1000 + seed)
            n = int(rng.integers(2, 6))
            sp = random_stat_point(n, rng, trace_free=True)
            # force A(e1,e1,e1) = 0 so the hypothesis holds exactly
            entries = {k: v for k, v in sp.A.entries().items() if k != (0, 0, 0)}
            sp = StatPoint(sp.g, CubicForm.from_entries(n, entries))
            u = np.zeros(n)
            u[0] = 1.0
            lhs, rhs, _ = check_ineq_eighth(sp, u)
            if lhs > rhs + 1e-12:
                violations += 1
        assert violations == 0


class TestNormGapInequality:
    def test_equality_point(self, eq_point):
        residual, cert = check_ineq_n2over3(eq_point)
        assert residual == pytest.approx((4.0 / 3.0) * 12.0 - 16.0, abs=1e-12)
        assert abs(residual) < 1e-12
        assert cert.holds
        assert cert.best_effort

    def test_zero(self):
        sp = StatPoint(MetricPoint(np.eye(2)), CubicForm.zero(2))
        residual, cert = check_ineq_n2over3(sp)
        assert residual == 0.0
        assert cert.holds

    def test_random_sweep_nonnegative(self):
        for seed in range(200):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(2, 7))
            sp = random_stat_point(n, rng, metric="random")
            residual, _ = check_ineq_n2over3(sp)
            assert residual >= -1e-12


class TestScalarGapBounds:
    def test_equality_point(self, eq_point):
        gap, lower_13, lower_n2 = scalar_gap_bounds(eq_point)
        assert gap == pytest.approx(-4.0, abs=1e-12)
        assert lower_13 == pytest.approx(-4.0, abs=1e-12)
        assert gap >= lower_13 - 1e-12
        assert gap >= lower_n2 - 1e-12

    def test_zero(self):
        sp = StatPoint(MetricPoint(np.eye(3)), CubicForm.zero(3))
        assert scalar_gap_bounds(sp) == (0.0, 0.0, 0.0)

    def test_random_sweep_n3(self):
        for seed in range(100):
            sp = random_stat_point(3, np.random.default_rng(seed), metric="random")
            gap, lower_13, lower_n2 = scalar_gap_bounds(sp)
            assert gap >= lower_13 - 1e-12
            assert gap >= lower_n2 - 1e-12


class TestLPQ:
    def test_g3_values(self, g3_point):
        normsq_l, normsq_p, _, pairing = lpq(g3_point)
        assert normsq_l == pytest.approx(8.0, abs=1e-12)
        assert normsq_p == pytest.approx(16.0, abs=1e-12)
        assert -pairing == pytest.approx(24.0, abs=1e-12)
        u = g3_point.norm_a_sq()
        assert normsq_l + normsq_p == pytest.approx(1.5 * u * u, abs=1e-10)

    def test_zero(self):
        sp = StatPoint(MetricPoint(np.eye(3)), CubicForm.zero(3))
        normsq_l, normsq_p, q, pairing = lpq(sp)
        assert normsq_l == normsq_p == pairing == 0.0
        assert np.all(q.array == 0.0)

    def test_pairing_identity_and_bounds_trace_free(self):
        for seed in range(60):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(3, 6))
            sp = random_stat_point(n, rng, trace_free=True)
            normsq_l, normsq_p, _, pairing = lpq(sp)
            total = normsq_l + normsq_p
            assert -pairing == pytest.approx(total, rel=1e-10, abs=1e-10)
            u = sp.norm_a_sq()
            assert total >= (n + 1) / (n * (n - 1)) * u * u - 1e-10
            assert total <= 1.5 * u * u + 1e-10

    def test_n2_forces_li_equality(self):
        for seed in range(30):
            sp = random_stat_point(2, np.random.default_rng(seed), trace_free=True)
            normsq_l, normsq_p, _, _ = lpq(sp)
            u = sp.norm_a_sq()
            assert normsq_l + normsq_p == pytest.approx(1.5 * u * u, abs=1e-10 * max(1.0, u * u))


class TestConstantCurvature:
    def test_r0_itself(self, rng):
        g = MetricPoint(np.eye(3))
        assert constant_curvature_residual(r0_curvature(g), g, 1.0) == pytest.approx(0.0, abs=1e-13)

    def test_g3_is_constant_curvature(self, g3_point):
        b = bracket_kk(g3_point)
        assert constant_curvature_residual(b, g3_point.g, -2.0) < 1e-12
        assert best_fit_curvature_coefficient(g3_point.g, b) == pytest.approx(-2.0, abs=1e-12)

    def test_r0_against_zero(self):
        g = MetricPoint(np.eye(4))
        n = 4
        assert constant_curvature_residual(r0_curvature(g), g, 0.0) == pytest.approx(
            np.sqrt(2 * n * (n - 1)), abs=1e-12
        )


class TestLagrangianGauss:
    def test_trivial(self):
        sp = StatPoint(MetricPoint(np.eye(3)), CubicForm.zero(3))
        rhat = CurvTensor(2.0 * r0_curvature(sp.g).array)
        residual, scalar_residual = lagrangian_gauss_residual(sp, rhat, 2.0)
        assert residual < 1e-12
        assert scalar_residual < 1e-11

    def test_g3_needs_c_equal_2(self, g3_point):
        rhat = CurvTensor(np.zeros((2, 2, 2, 2)))
        residual, scalar_residual = lagrangian_gauss_residual(g3_point, rhat, 2.0)
        assert residual < 1e-12
        assert scalar_residual < 1e-12
        bad, _ = lagrangian_gauss_residual(g3_point, rhat, 1.0)
        assert bad > 1.0

    def test_random_smoke(self, rng):
        sp = random_stat_point(3, rng, metric="random")
        arr = rng.uniform(-1, 1, (3, 3, 3, 3))
        arr = arr - np.swapaxes(arr, 0, 1)
        residual, scalar_residual = lagrangian_gauss_residual(sp, CurvTensor(arr), 0.7)
        assert residual > 0.0
        assert np.isfinite(scalar_residual)


class TestGeneratorHelpers:
    def test_trace_free_projection(self, rng):
        sp = random_stat_point(4, rng, metric="random")
        a_tf = trace_free_part(sp.g, sp.A)
        tf = StatPoint(sp.g, a_tf)
        assert tf.trace_free

    def test_determinism(self):
        a = random_stat_point(3, 99, metric="random")
        b = random_stat_point(3, 99, metric="random")
        assert np.array_equal(a.A.dense, b.A.dense)
        assert np.array_equal(a.g.components, b.g.components)


class TestRicciComparisonChain:
    def test_quadratic_form_version(self, rng):
        # 2 Ric_hat - Ric - Ric_bar + ||tau||^2 g / 2 reduces algebraically to
        # 2 (g(K_.,K_.) - tau o K + ||tau||^2 g / 4); positive semi-definite always.
        from codazzi import orthonormal_frame

        for seed in range(50):
            sp = random_stat_point(4, np.random.default_rng(seed), metric="random")
            tau_sq = float(sp.tau @ sp.g.inverse @ sp.tau)
            form = sp.gram_k() - sp.tau_circ_k() + 0.25 * tau_sq * sp.g.components
            # eigenvalues w.r.t. g via the orthonormal frame
            b = orthonormal_frame(sp.g)
            eigs = np.linalg.eigvalsh(b.T @ form @ b)
            assert np.all(eigs >= -1e-8)
