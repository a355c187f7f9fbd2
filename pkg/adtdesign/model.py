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

"""The multivariate linear mixed-effects degradation model.

Each of the r components of a unit degrades along
y(x, t) = f(x, t)^T beta + g(t)^T gamma + eps, with monomial regression
functions f, random time effects gamma ~ N(0, Sigma_gamma) and measurement
error eps ~ N(0, sigma_eps^2), observed at a fixed time plan t_1 < ... < t_k.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import math
import re
from typing import Any, NamedTuple, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from adtdesign.lowlevel import (
    DimensionError,
    ValidationError,
    Violation,
    is_positive_definite,
)

_FACTOR_RE = re.compile(r'^(?:x(?P<var>[1-9][0-9]*)|(?P<t>t))(?:\^(?P<exp>[0-9]+))?$')


def _frozen_array(value: ArrayLike, ndim: int | None = None) -> NDArray[np.float64]:
    arr = np.array(value, dtype=np.float64)
    if ndim is not None and arr.ndim != ndim:
        raise DimensionError(
            f'DimensionMismatch: expected {ndim}-d array, got {arr.shape}'
        )
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Monomial:
    """A regression function x_1^e_1 * ... * x_d^e_d * t^e_t."""

    stress_exponents: tuple[int, ...]
    time_exponent: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(
            self, 'stress_exponents', tuple(int(e) for e in self.stress_exponents)
        )
        if min(self.stress_exponents + (self.time_exponent,)) < 0:
            raise ValueError(f'Negative exponent in {self.stress_exponents}')

    @classmethod
    def parse(cls, text: str, stress_dim: int) -> Monomial:
        """Parse a product such as '1', 'x1*x2*t' or 't^2'."""
        exps = [0] * stress_dim
        time = 0
        body = text.replace(' ', '')
        if body != '1':
            for factor in body.split('*'):
                m = _FACTOR_RE.match(factor)
                if m is None:
                    raise ValueError(
                        f"Can't parse monomial factor {factor!r} in {text!r}"
                    )
                exp = int(m['exp'] or 1)
                if m['t']:
                    time += exp
                else:
                    var = int(m['var'])
                    if var > stress_dim:
                        raise DimensionError(
                            f'DimensionMismatch: {text!r} uses x{var} but '
                            f'stress_dim is {stress_dim}'
                        )
                    exps[var - 1] += exp
        return cls(tuple(exps), time)

    @property
    def stress_dim(self) -> int:
        return len(self.stress_exponents)

    @property
    def is_pure_time(self) -> bool:
        return not any(self.stress_exponents)

    def stress_part(self) -> Monomial:
        return Monomial(self.stress_exponents, 0)

    def __call__(self, x: Sequence[float], t: float) -> float:
        if len(x) != self.stress_dim:
            raise DimensionError(
                f'DimensionMismatch: stress vector of length {len(x)}, '
                f'expected {self.stress_dim}'
            )
        value = float(t) ** self.time_exponent
        for xj, ej in zip(x, self.stress_exponents):
            value *= float(xj) ** ej
        return value

    def __str__(self) -> str:
        factors = []
        for j, e in enumerate(self.stress_exponents):
            if e:
                factors.append(f'x{j + 1}' if e == 1 else f'x{j + 1}^{e}')
        if self.time_exponent:
            e = self.time_exponent
            factors.append('t' if e == 1 else f't^{e}')
        return '*'.join(factors) or '1'


@dataclass(frozen=True, eq=False)
class ComponentSpec:
    """One degradation characteristic of the test unit.

    fixed_basis:            the p regression monomials f(x, t).
    random_time_exponents:  g(t) = (t^e for e in these exponents).
    sigma_gamma:            q x q covariance of the random effects.
    beta:                   nominal fixed effects, length p.
    threshold:              soft-failure level y_0.
    error_variance:         overrides the model's shared sigma_eps^2 if set."""

    fixed_basis: tuple[Monomial, ...]
    random_time_exponents: tuple[int, ...]
    sigma_gamma: NDArray[np.float64]
    beta: NDArray[np.float64]
    threshold: float
    error_variance: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, 'fixed_basis', tuple(self.fixed_basis))
        object.__setattr__(
            self,
            'random_time_exponents',
            tuple(int(e) for e in self.random_time_exponents),
        )
        object.__setattr__(self, 'sigma_gamma', _frozen_array(self.sigma_gamma, 2))
        object.__setattr__(self, 'beta', _frozen_array(self.beta, 1))
        object.__setattr__(self, 'threshold', float(self.threshold))

    @classmethod
    def random_intercept_slope(
        cls,
        fixed_basis: Sequence[Monomial],
        variances: tuple[float, float],
        rho: float,
        beta: ArrayLike,
        threshold: float,
        error_variance: float | None = None,
    ) -> ComponentSpec:
        """Component with g(t) = (1, t) and Sigma_gamma built from two
        variances and a correlation."""
        s1, s2 = math.sqrt(variances[0]), math.sqrt(variances[1])
        sigma = [[variances[0], rho * s1 * s2], [rho * s1 * s2, variances[1]]]
        return cls(tuple(fixed_basis), (0, 1), sigma, beta, threshold, error_variance)

    @property
    def p(self) -> int:
        return len(self.fixed_basis)

    @property
    def q(self) -> int:
        return len(self.random_time_exponents)

    def replace(self, **changes: Any) -> ComponentSpec:
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """The complete design problem.

    Construction only normalizes types; call validate_system() to check
    the model invariants."""

    components: tuple[ComponentSpec, ...]
    error_variance: float
    time_plan: NDArray[np.float64]
    stress_dim: int
    use_condition: NDArray[np.float64]
    system_s: int = 1
    alpha: float = 0.5
    design_region: NDArray[np.float64] = field(default=None)  # type: ignore[assignment]
    t_max: float = 1e6

    def __post_init__(self) -> None:
        object.__setattr__(self, 'components', tuple(self.components))
        object.__setattr__(self, 'error_variance', float(self.error_variance))
        object.__setattr__(self, 'time_plan', _frozen_array(self.time_plan, 1))
        object.__setattr__(self, 'use_condition', _frozen_array(self.use_condition, 1))
        if self.design_region is None:
            region = [[0.0, 1.0]] * self.stress_dim
        else:
            region = self.design_region
        object.__setattr__(self, 'design_region', _frozen_array(region, 2))

    @property
    def r(self) -> int:
        """Number of components."""
        return len(self.components)

    @property
    def k(self) -> int:
        """Number of measurement times per unit."""
        return len(self.time_plan)

    def component_error_variance(self, l: int) -> float:
        override = self.components[l].error_variance
        return self.error_variance if override is None else override

    def replace(self, **changes: Any) -> ModelSpec:
        return replace(self, **changes)

    def with_component(self, l: int, component: ComponentSpec) -> ModelSpec:
        comps = list(self.components)
        comps[l] = component
        return self.replace(components=tuple(comps))


@dataclass(frozen=True, eq=False)
class DesignMatrices:
    """F(x, t), G(t) and V for one component at one stress setting."""

    fixed: NDArray[np.float64]
    random: NDArray[np.float64]
    covariance: NDArray[np.float64]


def _exponent_arrays(
    basis: Sequence[Monomial],
) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    stress = np.array([m.stress_exponents for m in basis], dtype=np.int64)
    time = np.array([m.time_exponent for m in basis], dtype=np.int64)
    return stress, time


def eval_basis(
    basis: Sequence[Monomial], x: ArrayLike, t: float
) -> NDArray[np.float64]:
    """Evaluate the regression monomials at stress x and time t."""
    x = np.asarray(x, dtype=np.float64)
    stress, time = _exponent_arrays(basis)
    if x.ndim != 1 or stress.shape[1] != x.shape[0]:
        raise DimensionError(
            f'DimensionMismatch: stress vector has shape {x.shape}, '
            f'basis expects {stress.shape[1]} variables'
        )
    return np.prod(x**stress, axis=1) * float(t) ** time


def fixed_design_matrix(
    component: ComponentSpec, x: ArrayLike, time_plan: ArrayLike
) -> NDArray[np.float64]:
    """k x p matrix whose row j is f(x, t_j)."""
    return np.array([eval_basis(component.fixed_basis, x, tj) for tj in time_plan])


def random_design_matrix(
    component: ComponentSpec, time_plan: ArrayLike
) -> NDArray[np.float64]:
    """k x q matrix whose row j is g(t_j)."""
    t = np.asarray(time_plan, dtype=np.float64)
    return t[:, None] ** np.array(component.random_time_exponents)[None, :]


def unit_covariance(
    component: ComponentSpec, time_plan: ArrayLike, error_variance: float
) -> NDArray[np.float64]:
    """Marginal covariance V = G Sigma_gamma G^T + sigma_eps^2 I of one unit."""
    g = random_design_matrix(component, time_plan)
    v = g @ component.sigma_gamma @ g.T + error_variance * np.eye(g.shape[0])
    return 0.5 * (v + v.T)


def design_matrices(spec: ModelSpec, l: int, x: ArrayLike) -> DesignMatrices:
    comp = spec.components[l]
    return DesignMatrices(
        fixed_design_matrix(comp, x, spec.time_plan),
        random_design_matrix(comp, spec.time_plan),
        unit_covariance(comp, spec.time_plan, spec.component_error_variance(l)),
    )


def fixed_design_tensor(
    component: ComponentSpec, points: ArrayLike, time_plan: ArrayLike
) -> NDArray[np.float64]:
    """F(x_i, t) for many stress points at once, as an (n, k, p) array."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    stress, time = _exponent_arrays(component.fixed_basis)
    if pts.shape[1] != stress.shape[1]:
        raise DimensionError(
            f'DimensionMismatch: points have {pts.shape[1]} coordinates, '
            f'basis expects {stress.shape[1]}'
        )
    stress_values = np.prod(pts[:, None, :] ** stress[None, :, :], axis=2)
    time_values = np.asarray(time_plan, dtype=np.float64)[:, None] ** time[None, :]
    return stress_values[:, None, :] * time_values[None, :, :]


class ProductStructure(NamedTuple):
    """Factorization f(x, t) = P (f1(x) kron g(t)) of a fixed basis.

    stress_basis holds f1; order maps position a * q + b of the Kronecker
    product to the index of the matching monomial in the fixed basis."""

    stress_basis: tuple[Monomial, ...]
    time_exponents: tuple[int, ...]
    order: tuple[int, ...]


def product_structure(component: ComponentSpec) -> ProductStructure | None:
    """Return the product-type factorization of the fixed basis, if any.

    The basis has product type when it is exactly the set of products of
    some stress monomials with the random-effects time monomials."""
    basis = component.fixed_basis
    exps = component.random_time_exponents
    if not exps or len(set(exps)) != len(exps) or len(basis) % len(exps):
        return None
    index = {(m.stress_exponents, m.time_exponent): i for i, m in enumerate(basis)}
    if len(index) != len(basis):
        return None
    stress_basis: list[Monomial] = []
    for m in basis:
        part = m.stress_part()
        if part not in stress_basis:
            stress_basis.append(part)
    if len(stress_basis) * len(exps) != len(basis):
        return None
    order = []
    for s in stress_basis:
        for e in exps:
            i = index.get((s.stress_exponents, e))
            if i is None:
                return None
            order.append(i)
    return ProductStructure(tuple(stress_basis), exps, tuple(order))


def validate_system(spec: ModelSpec) -> ModelSpec:
    """Check every model invariant and return spec unchanged.

    Raise ValidationError listing all violations found."""
    problems: list[Violation] = []

    def bad(code: str, message: str) -> None:
        problems.append(Violation(code, message))

    d = spec.stress_dim
    if d < 1:
        bad('DimensionMismatch', f'stress_dim must be at least 1, got {d}')
    if spec.r < 1:
        bad('BadSystemOrder', 'model has no components')
    if not 1 <= spec.system_s <= max(spec.r, 1):
        bad('BadSystemOrder', f's = {spec.system_s} outside [1, {spec.r}]')
    if not 0.0 < spec.alpha < 1.0:
        bad('BadAlpha', f'alpha = {spec.alpha} outside (0, 1)')
    if not spec.t_max > 0:
        bad('BadTimePlan', f't_max = {spec.t_max} must be positive')

    t = spec.time_plan
    if t.size == 0:
        bad('BadTimePlan', 'time plan is empty')
    elif t[0] < 0 or np.any(np.diff(t) <= 0) or not np.all(np.isfinite(t)):
        bad(
            'BadTimePlan',
            f'time plan {t.tolist()} must be nonnegative and strictly increasing',
        )

    if spec.use_condition.shape != (d,):
        bad(
            'DimensionMismatch',
            f'use condition has {spec.use_condition.size} coordinates, expected {d}',
        )
    region = spec.design_region
    if region.shape != (d, 2):
        bad(
            'DimensionMismatch',
            f'design region has shape {region.shape}, expected ({d}, 2)',
        )
    elif np.any(region[:, 0] >= region[:, 1]):
        bad('BadRegion', f'design region {region.tolist()} has an empty interval')

    if not spec.error_variance > 0:
        bad(
            'NotPositiveDefinite',
            f'error variance {spec.error_variance} must be positive',
        )

    for l, comp in enumerate(spec.components):
        name = f'component {l + 1}'
        if comp.error_variance is not None and not comp.error_variance > 0:
            bad('NotPositiveDefinite', f'{name}: error variance must be positive')
        wrong_dim = [str(m) for m in comp.fixed_basis if m.stress_dim != d]
        if wrong_dim:
            bad(
                'DimensionMismatch',
                f'{name}: monomials {wrong_dim} not in {d} variables',
            )
        if comp.beta.shape != (comp.p,):
            bad(
                'DimensionMismatch',
                f'{name}: beta has {comp.beta.size} entries, basis has {comp.p}',
            )
        if comp.sigma_gamma.shape != (comp.q, comp.q):
            bad(
                'DimensionMismatch',
                f'{name}: sigma_gamma has shape {comp.sigma_gamma.shape}, '
                f'expected ({comp.q}, {comp.q})',
            )
        elif not is_positive_definite(comp.sigma_gamma):
            bad('NotPositiveDefinite', f'{name}: sigma_gamma is not positive definite')
        pure_time = {m.time_exponent for m in comp.fixed_basis if m.is_pure_time}
        for e in comp.random_time_exponents:
            if e not in pure_time:
                bad(
                    'SpanViolation',
                    f'{name}: random effect t^{e} is not in the fixed basis',
                )
        if not math.isfinite(comp.threshold):
            bad('DimensionMismatch', f'{name}: threshold must be finite')

    if problems:
        raise ValidationError(problems)
    return spec
