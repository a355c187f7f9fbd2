#
# adt-design - optimal designs for accelerated degradation tests
#
# Copyright (c) 2026 The adt-design authors
#
# This library is free software; you can redistribute it and/or modify it
# under the terms of version 2.1 of the GNU Lesser General Public License
# as published by the Free Software Foundation.
#
# This library is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY
# or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU Lesser General Public
# License for more details.
#
# You should have received a copy of the GNU Lesser General Public License
# along with this library; if not, write to the Free Software Foundation,
# Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301 USA.
#

from __future__ import annotations

from dataclasses import replace
import unittest

from common import VERTICES, context, line_model, problem, random_designs, solution
import numpy as np

from adtdesign import (
    ApproximateDesign,
    CriterionContext,
    DesignNormalizationError,
    DimensionError,
    FailureSystem,
    ModelSpec,
    PreconditionNotMetError,
    avar,
    c_constants,
    density_at_quantile,
    efficiency,
    factorized_objective,
    fixed_design_matrix,
    info_matrix_component,
    joint_cdf,
    marginal_extrapolation_efficiency,
    objective,
    quantile,
    scaled_avar,
    unit_covariance,
)
from adtdesign.criterion import (
    marginal_information,
    sensitivities,
    sensitivity,
    time_information,
)
from adtdesign.lowlevel import condition_number, norm_pdf
from adtdesign.model import product_structure
from adtdesign.sensitivity import balanced_vertex_design


def with_beta(spec: ModelSpec, l: int, q: int, delta: float) -> ModelSpec:
    comp = spec.components[l]
    beta = comp.beta.copy()
    beta[q] += delta
    return spec.with_component(l, comp.replace(beta=beta))


class TestApproximateDesign(unittest.TestCase):
    def test_invalid(self) -> None:
        self.assertRaises(
            DesignNormalizationError,
            lambda: ApproximateDesign([[0.0], [1.0]], [1.1, -0.1]),
        )
        self.assertRaises(
            DesignNormalizationError,
            lambda: ApproximateDesign([[0.0], [1.0]], [0.5, 0.4]),
        )
        self.assertRaises(
            DesignNormalizationError,
            lambda: ApproximateDesign([[0.5], [0.5]], [0.5, 0.5]),
        )
        self.assertRaises(
            DesignNormalizationError, lambda: ApproximateDesign(np.zeros((0, 2)), [])
        )
        self.assertRaises(
            DimensionError, lambda: ApproximateDesign([[0.0], [1.0]], [1.0])
        )

    def test_from_raw(self) -> None:
        design = ApproximateDesign.from_raw(
            [[1.0, 0.0], [0.0, 0.0], [1.0, 0.0]], [0.25, 0.5, 0.25]
        )
        self.assertEqual(list(design), [((0.0, 0.0), 0.5), ((1.0, 0.0), 0.5)])
        design = ApproximateDesign.from_raw([[0.0], [1.0]], [2.0, 6.0], normalize=True)
        self.assertEqual(design.weight_at([1.0]), 0.75)
        self.assertRaises(
            DesignNormalizationError,
            lambda: ApproximateDesign.from_raw([[0.0]], [0.0], normalize=True),
        )

    def test_accessors(self) -> None:
        design = ApproximateDesign([[1.0, 1.0], [0.0, 1.0]], [0.25, 0.75])
        self.assertEqual(design.size, 2)
        self.assertEqual(design.dim, 2)
        self.assertEqual(design.weight_at((0.0, 1.0)), 0.75)
        self.assertEqual(design.weight_at((0.5, 1.0)), 0.0)
        self.assertEqual(
            list(design.sorted()), [((0.0, 1.0), 0.75), ((1.0, 1.0), 0.25)]
        )
        self.assertEqual(
            repr(design), 'ApproximateDesign({(1.0, 1.0): 0.25, (0.0, 1.0): 0.75})'
        )
        uniform = ApproximateDesign.uniform(VERTICES)
        np.testing.assert_array_equal(uniform.weights, [0.25] * 4)
        self.assertFalse(uniform.weights.flags.writeable)


class TestContext(unittest.TestCase):
    def test_bracket_vanishes(self) -> None:
        # 2-out-of-3 with components 2 and 3 unable to fail
        system = FailureSystem.from_spec(problem('example2.toml').spec)
        system = replace(system, thresholds=np.array([7.5, 1e6, 1e6]))
        self.assertEqual(c_constants(system, 2.0)[0], 0.0)

    def test_degenerate(self) -> None:
        spec = problem('example1.toml').spec
        for l in range(spec.r):
            spec = spec.with_component(l, spec.components[l].replace(threshold=0.0))
        with self.assertLogs('adtdesign.failure', 'WARNING'):
            ctx = CriterionContext.build(spec)
        self.assertTrue(ctx.degenerate)
        self.assertEqual(ctx.t_alpha, 0.0)

    def test_given_t_alpha(self) -> None:
        spec = problem('example2.toml').spec
        ctx = CriterionContext.build(spec, t_alpha=2.0)
        self.assertIsNone(ctx.quantile)
        self.assertFalse(ctx.degenerate)
        self.assertEqual(ctx.t_alpha, 2.0)


class _Abstract:
    # nested class to prevent the test runner from finding it
    class ExampleCriterionTest(unittest.TestCase):
        FILENAME: str | None = None
        SEED = 0

        def setUp(self) -> None:
            assert self.FILENAME is not None
            self.spec = problem(self.FILENAME).spec
            self.ctx = context(self.FILENAME)
            self.balanced = balanced_vertex_design(self.spec.design_region)

        def test_c_constants(self) -> None:
            system = self.ctx.system
            t = self.ctx.t_alpha
            assert self.ctx.quantile is not None
            marg = list(self.ctx.quantile.marginal_cdfs)
            for l in range(self.spec.r):
                others = marg[:l] + marg[l + 1 :]
                if self.spec.system_s == 1:
                    bracket = float(np.prod([1 - p for p in others]))
                else:
                    # 2-out-of-3
                    bracket = others[0] + others[1] - 2 * others[0] * others[1]
                h = float(system.standardized_margin(l, t))
                expected = float(norm_pdf(h)) / float(system.path_sd(l, t)) * bracket
                self.assertAlmostEqual(self.ctx.c_consts[l] / expected, 1, places=12)

        def test_gradient_finite_differences(self) -> None:
            h = 1e-6
            t = self.ctx.t_alpha
            for l, comp in enumerate(self.spec.components):
                for q in range(comp.p):
                    upper = FailureSystem.from_spec(with_beta(self.spec, l, q, h))
                    lower = FailureSystem.from_spec(with_beta(self.spec, l, q, -h))
                    fd = (joint_cdf(upper, t) - joint_cdf(lower, t)) / (2 * h)
                    analytic = self.ctx.c_vectors[l][q]
                    self.assertLess(abs(fd / analytic - 1), 1e-5, (l, q))

        def test_implicit_function(self) -> None:
            h = 1e-5
            alpha = self.spec.alpha
            density = density_at_quantile(self.ctx.system, self.ctx.t_alpha)
            for l, comp in enumerate(self.spec.components):
                for q in range(comp.p):
                    upper = FailureSystem.from_spec(with_beta(self.spec, l, q, h))
                    lower = FailureSystem.from_spec(with_beta(self.spec, l, q, -h))
                    dt = (
                        quantile(upper, alpha).t_alpha - quantile(lower, alpha).t_alpha
                    ) / (2 * h)
                    analytic = self.ctx.c_vectors[l][q]
                    self.assertLess(abs(-dt * density / analytic - 1), 1e-4, (l, q))

        def test_single_point_information(self) -> None:
            x = np.array([0.3, 0.8])
            design = ApproximateDesign([x], [1.0])
            for l, comp in enumerate(self.spec.components):
                f = fixed_design_matrix(comp, x, self.spec.time_plan)
                v = unit_covariance(comp, self.spec.time_plan, self.spec.error_variance)
                np.testing.assert_allclose(
                    info_matrix_component(self.ctx, design, l),
                    f.T @ np.linalg.solve(v, f),
                    rtol=0,
                    atol=1e-10,
                )

        def test_split_weight(self) -> None:
            a, b = (0.2, 0.4), (1.0, 0.0)
            split = ApproximateDesign.from_raw([a, b, a], [0.25, 0.5, 0.25])
            whole = ApproximateDesign([a, b], [0.5, 0.5])
            for l in range(self.spec.r):
                np.testing.assert_allclose(
                    info_matrix_component(self.ctx, split, l),
                    info_matrix_component(self.ctx, whole, l),
                    rtol=0,
                    atol=1e-14,
                )

        def test_equivalence_identity(self) -> None:
            for design in random_designs(self.spec.stress_dim, 20, self.SEED):
                d = sensitivities(self.ctx, design, design.points)
                value = objective(self.ctx, design)
                self.assertLess(abs(design.weights @ d / value - 1), 1e-10)
                self.assertTrue(np.all(d > 0))
                single = sensitivity(self.ctx, design, design.points[0])
                self.assertAlmostEqual(single / d[0], 1, places=12)

        def test_objective_properties(self) -> None:
            design = self.balanced
            value = objective(self.ctx, design)
            self.assertGreater(value, 0)
            self.assertEqual(avar(self.ctx, design), value)
            self.assertAlmostEqual(
                objective(self.ctx.scaled(2.0), design) / value, 4, places=12
            )
            order = [3, 1, 0, 2]
            shuffled = ApproximateDesign(design.points[order], design.weights[order])
            self.assertAlmostEqual(objective(self.ctx, shuffled) / value, 1, places=12)
            padded = ApproximateDesign(
                np.vstack([design.points, [[0.5, 0.5]]]),
                np.append(design.weights, 0.0),
            )
            self.assertAlmostEqual(objective(self.ctx, padded) / value, 1, places=12)
            density = density_at_quantile(self.ctx.system, self.ctx.t_alpha)
            self.assertAlmostEqual(
                scaled_avar(self.ctx, design) * density**2 / value, 1, places=12
            )

        def test_efficiency(self) -> None:
            optimal = solution(self.FILENAME).design  # type: ignore[arg-type]
            self.assertEqual(efficiency(self.ctx, optimal, optimal), 1.0)
            eff = efficiency(self.ctx, self.balanced, optimal)
            self.assertLess(eff, 1)
            self.assertGreater(eff, 0)
            self.assertAlmostEqual(
                efficiency(self.ctx.scaled(3.0), self.balanced, optimal) / eff,
                1,
                places=12,
            )
            self.assertLess(
                condition_number(info_matrix_component(self.ctx, optimal, 0)), 1e12
            )


class TestExample1Criterion(_Abstract.ExampleCriterionTest):
    FILENAME = 'example1.toml'
    SEED = 1

    def test_factorized_objective(self) -> None:
        structure = product_structure(self.spec.components[0])
        assert structure is not None
        order = list(structure.order)
        m2 = time_information(self.ctx)
        for design in random_designs(2, 20, 11):
            ratio = factorized_objective(self.ctx, design) / objective(self.ctx, design)
            self.assertLess(abs(ratio - 1), 1e-10)
            m1 = marginal_information(structure.stress_basis, design)
            for l in range(self.spec.r):
                m = info_matrix_component(self.ctx, design, l)
                np.testing.assert_allclose(
                    m[np.ix_(order, order)], np.kron(m1, m2), rtol=0, atol=1e-12
                )

    def test_marginal_efficiency(self) -> None:
        optimal = solution(self.FILENAME).design
        for design in [self.balanced] + random_designs(2, 5, 12):
            self.assertAlmostEqual(
                marginal_extrapolation_efficiency(self.ctx, design, optimal)
                / efficiency(self.ctx, design, optimal),
                1,
                places=10,
            )

    def test_precondition(self) -> None:
        comp = self.spec.components[1].replace(error_variance=0.2)
        ctx = CriterionContext.build(self.spec.with_component(1, comp))
        self.assertRaises(
            PreconditionNotMetError, lambda: factorized_objective(ctx, self.balanced)
        )

    def test_line_model(self) -> None:
        ctx = CriterionContext.build(line_model())
        for design in random_designs(1, 20, 13):
            self.assertAlmostEqual(
                factorized_objective(ctx, design) / objective(ctx, design),
                1,
                places=10,
            )


class TestExample2Criterion(_Abstract.ExampleCriterionTest):
    FILENAME = 'example2.toml'
    SEED = 2

    def test_no_factorization(self) -> None:
        self.assertRaises(
            PreconditionNotMetError,
            lambda: factorized_objective(self.ctx, self.balanced),
        )
