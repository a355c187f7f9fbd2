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

import unittest

from common import problem
import numpy as np

from adtdesign import (
    DimensionError,
    ModelSpec,
    Monomial,
    ValidationError,
    eval_basis,
    fixed_design_matrix,
    random_design_matrix,
    unit_covariance,
    validate_system,
)
from adtdesign.model import (
    design_matrices,
    fixed_design_tensor,
    product_structure,
)

TIMES = np.array([0.0, 0.5, 1.0])


class TestMonomial(unittest.TestCase):
    def test_parse(self) -> None:
        self.assertEqual(Monomial.parse('1', 2), Monomial((0, 0), 0))
        self.assertEqual(Monomial.parse('x1*x2*t', 2), Monomial((1, 1), 1))
        self.assertEqual(Monomial.parse('t^2', 2), Monomial((0, 0), 2))
        self.assertEqual(Monomial.parse('x2 * x2', 2), Monomial((0, 2), 0))
        self.assertRaises(DimensionError, lambda: Monomial.parse('x3', 2))
        self.assertRaises(ValueError, lambda: Monomial.parse('y1', 2))
        self.assertRaises(ValueError, lambda: Monomial((-1, 0), 0))

    def test_str(self) -> None:
        for text in '1', 'x1', 'x1*x2*t', 't^2', 'x2^3*t':
            self.assertEqual(str(Monomial.parse(text, 2)), text)

    def test_call(self) -> None:
        m = Monomial.parse('x1*x2^2*t', 2)
        self.assertAlmostEqual(m((2.0, 3.0), 0.5), 9.0)
        self.assertEqual(m.stress_part(), Monomial((1, 2), 0))
        self.assertFalse(m.stress_part().is_pure_time)
        self.assertFalse(m.is_pure_time)
        self.assertTrue(Monomial.parse('t^2', 2).is_pure_time)
        self.assertRaises(DimensionError, lambda: m((1.0,), 1.0))


class TestSystemValidation(unittest.TestCase):
    def setUp(self) -> None:
        self.spec = problem('example1.toml').spec

    def codes(self, spec: ModelSpec) -> tuple[str, ...]:
        with self.assertRaises(ValidationError) as cm:
            validate_system(spec)
        return cm.exception.codes

    def test_valid(self) -> None:
        self.assertIs(validate_system(self.spec), self.spec)
        self.assertEqual(validate_system(problem('example2.toml').spec).r, 3)

    def test_time_plan(self) -> None:
        spec = self.spec.replace(time_plan=np.array([0.0, 0.5, 0.5]))
        self.assertEqual(self.codes(spec), ('BadTimePlan',))
        spec = self.spec.replace(time_plan=np.array([-1.0, 0.5]))
        self.assertEqual(self.codes(spec), ('BadTimePlan',))

    def test_span_violation(self) -> None:
        spec = problem('example2.toml').spec
        comp = spec.components[1]
        without_t = comp.replace(
            fixed_basis=tuple(m for m in comp.fixed_basis if str(m) != 't'),
            beta=np.delete(comp.beta, 3),
        )
        self.assertEqual(
            self.codes(spec.with_component(1, without_t)), ('SpanViolation',)
        )

    def test_not_positive_definite(self) -> None:
        comp = self.spec.components[0].replace(sigma_gamma=np.zeros((2, 2)))
        self.assertEqual(
            self.codes(self.spec.with_component(0, comp)), ('NotPositiveDefinite',)
        )
        self.assertEqual(
            self.codes(self.spec.replace(error_variance=0.0)),
            ('NotPositiveDefinite',),
        )

    def test_system_order(self) -> None:
        self.assertEqual(self.codes(self.spec.replace(system_s=3)), ('BadSystemOrder',))
        self.assertEqual(self.codes(self.spec.replace(system_s=0)), ('BadSystemOrder',))

    def test_alpha_and_region(self) -> None:
        self.assertEqual(self.codes(self.spec.replace(alpha=1.0)), ('BadAlpha',))
        region = np.array([[1.0, 0.0], [0.0, 1.0]])
        self.assertEqual(
            self.codes(self.spec.replace(design_region=region)), ('BadRegion',)
        )

    def test_dimension_mismatch(self) -> None:
        spec = self.spec.replace(use_condition=np.array([-0.4, -0.2, 0.0]))
        self.assertEqual(self.codes(spec), ('DimensionMismatch',))
        comp = self.spec.components[0].replace(beta=np.ones(7))
        self.assertEqual(
            self.codes(self.spec.with_component(0, comp)), ('DimensionMismatch',)
        )

    def test_all_violations_reported(self) -> None:
        spec = self.spec.replace(system_s=5, alpha=0.0, error_variance=-1.0)
        self.assertEqual(
            sorted(self.codes(spec)),
            ['BadAlpha', 'BadSystemOrder', 'NotPositiveDefinite'],
        )

    def test_error_variance_override(self) -> None:
        comp = self.spec.components[1].replace(error_variance=0.25)
        spec = validate_system(self.spec.with_component(1, comp))
        self.assertEqual(spec.component_error_variance(0), 0.10)
        self.assertEqual(spec.component_error_variance(1), 0.25)
        v = design_matrices(spec, 1, (0.5, 0.5)).covariance
        self.assertAlmostEqual(v[0, 0], 0.36 + 0.25)


class _Abstract:
    # nested class to prevent the test runner from finding it
    class ExampleModelTest(unittest.TestCase):
        FILENAME: str | None = None

        def setUp(self) -> None:
            assert self.FILENAME is not None
            self.spec = problem(self.FILENAME).spec

        def test_fixed_design_matrix_rows(self) -> None:
            rng = np.random.default_rng(7)
            for comp in self.spec.components:
                for x in rng.uniform(size=(5, 2)):
                    f = fixed_design_matrix(comp, x, TIMES)
                    self.assertEqual(f.shape, (3, comp.p))
                    for j, t in enumerate(TIMES):
                        np.testing.assert_array_equal(
                            f[j], eval_basis(comp.fixed_basis, x, t)
                        )
                    self.assertLessEqual(np.linalg.matrix_rank(f), min(3, comp.p))

        def test_fixed_design_tensor(self) -> None:
            points = np.array([[0.0, 0.0], [0.3, 0.7], [1.0, 0.25]])
            for comp in self.spec.components:
                tensor = fixed_design_tensor(comp, points, TIMES)
                self.assertEqual(tensor.shape, (3, 3, comp.p))
                for x, f in zip(points, tensor):
                    np.testing.assert_allclose(
                        f, fixed_design_matrix(comp, x, TIMES), rtol=0, atol=1e-15
                    )
            self.assertRaises(
                DimensionError,
                lambda: fixed_design_tensor(self.spec.components[0], [[0.0]], TIMES),
            )

        def test_unit_covariance(self) -> None:
            for l, comp in enumerate(self.spec.components):
                m = design_matrices(self.spec, l, (0.5, 0.5))
                expected = (
                    m.random @ comp.sigma_gamma @ m.random.T
                    + self.spec.error_variance * np.eye(3)
                )
                np.testing.assert_allclose(m.covariance, expected, rtol=0, atol=1e-12)
                np.testing.assert_array_equal(m.covariance, m.covariance.T)
                self.assertGreaterEqual(
                    np.linalg.eigvalsh(m.covariance)[0],
                    self.spec.error_variance - 1e-12,
                )


class TestExample1Model(_Abstract.ExampleModelTest):
    FILENAME = 'example1.toml'

    def test_eval_basis(self) -> None:
        basis = self.spec.components[0].fixed_basis
        np.testing.assert_array_equal(
            eval_basis(basis, (0.0, 0.0), 0.5), [1, 0, 0, 0, 0.5, 0, 0, 0]
        )
        np.testing.assert_array_equal(eval_basis(basis, (1.0, 1.0), 1.0), np.ones(8))
        self.assertRaises(DimensionError, lambda: eval_basis(basis, (1.0,), 1.0))

    def test_fixed_design_matrix(self) -> None:
        f = fixed_design_matrix(self.spec.components[0], (1.0, 1.0), TIMES)
        for j, t in enumerate(TIMES):
            np.testing.assert_array_equal(f[j], [1, 1, 1, 1, t, t, t, t])

    def test_random_design_matrix(self) -> None:
        comp = self.spec.components[0]
        np.testing.assert_array_equal(
            random_design_matrix(comp, TIMES), [[1, 0], [1, 0.5], [1, 1]]
        )
        np.testing.assert_array_equal(
            random_design_matrix(comp, [0.0, 1.0]), [[1, 0], [1, 1]]
        )
        intercept = comp.replace(random_time_exponents=(0,), sigma_gamma=[[0.36]])
        np.testing.assert_array_equal(
            random_design_matrix(intercept, [0.0, 2.0, 7.0]), np.ones((3, 1))
        )

    def test_unit_covariance_values(self) -> None:
        np.testing.assert_allclose(
            unit_covariance(self.spec.components[0], TIMES, 0.10),
            [[0.46, 0.36, 0.36], [0.36, 0.485, 0.41], [0.36, 0.41, 0.56]],
            rtol=0,
            atol=1e-12,
        )

    def test_product_structure(self) -> None:
        comp = self.spec.components[0]
        structure = product_structure(comp)
        assert structure is not None
        self.assertEqual(
            [str(m) for m in structure.stress_basis], ['1', 'x1', 'x2', 'x1*x2']
        )
        self.assertEqual(structure.time_exponents, (0, 1))
        rng = np.random.default_rng(3)
        for x in rng.uniform(size=(5, 2)):
            f = fixed_design_matrix(comp, x, TIMES)[:, list(structure.order)]
            f1 = eval_basis(structure.stress_basis, x, 0.0)
            for j, t in enumerate(TIMES):
                np.testing.assert_allclose(
                    f[j], np.kron(f1, [1.0, t]), rtol=0, atol=1e-15
                )


class TestExample2Model(_Abstract.ExampleModelTest):
    FILENAME = 'example2.toml'

    def test_eval_basis(self) -> None:
        basis = self.spec.components[0].fixed_basis
        np.testing.assert_array_equal(
            eval_basis(basis, (1.0, 0.0), 0.5), [1, 1, 0, 0.5, 0]
        )

    def test_fixed_design_matrix(self) -> None:
        np.testing.assert_array_equal(
            fixed_design_matrix(self.spec.components[0], (0.0, 0.0), TIMES),
            [[1, 0, 0, 0, 0], [1, 0, 0, 0.5, 0], [1, 0, 0, 1, 0]],
        )

    def test_no_product_structure(self) -> None:
        self.assertIsNone(product_structure(self.spec.components[0]))
