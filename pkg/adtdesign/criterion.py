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

"""Information matrices and the c-optimality criterion.

By the delta method the asymptotic variance of the estimated quantile
t_alpha is, up to the constant (dF_T/dt)^-2, the sum over components of
c_l^T M_l(xi)^-1 c_l, where c_l = c_l f_l(x_u, t_alpha) is the gradient of
F_T(t_alpha) in beta_l and M_l(xi) = sum_i w_i F_l(x_i)^T V_l^-1 F_l(x_i).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from adtdesign.failure import (
    FailureSystem,
    Quantile,
    density_at_quantile,
    marginal_cdfs,
    quantile,
)
from adtdesign.lowlevel import (
    DesignNormalizationError,
    DimensionError,
    PreconditionNotMetError,
    inclusion_exclusion_partial,
    norm_pdf,
    spd_inverse,
    spd_solve,
)
from adtdesign.model import (
    ModelSpec,
    Monomial,
    ProductStructure,
    eval_basis,
    fixed_design_tensor,
    product_structure,
    random_design_matrix,
    unit_covariance,
)

# tolerance on the sum of design weights
WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ApproximateDesign:
    """Stress settings x_i with proportions w_i of the test units.

    points:  (m, d) array of distinct support points.
    weights: (m,) nonnegative weights summing to one."""

    points: NDArray[np.float64]
    weights: NDArray[np.float64]

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None]
        weights = np.array(self.weights, dtype=np.float64)
        if points.ndim != 2 or weights.shape != (points.shape[0],):
            raise DimensionError(
                f'DimensionMismatch: {points.shape[0]} points but '
                f'{weights.size} weights'
            )
        if weights.size == 0:
            raise DesignNormalizationError('Design has no support points')
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise DesignNormalizationError('Design weights must be nonnegative')
        total = float(weights.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise DesignNormalizationError(f'Design weights sum to {total:.12g}, not 1')
        if len(np.unique(points, axis=0)) != len(points):
            raise DesignNormalizationError('Design support points are not distinct')
        points.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'weights', weights)

    @classmethod
    def from_raw(
        cls, points: ArrayLike, weights: ArrayLike, normalize: bool = False
    ) -> ApproximateDesign:
        """Build a design, summing the weights of repeated points and
        optionally rescaling the weights to sum to one."""
        pts = np.array(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        w = np.array(weights, dtype=np.float64)
        if w.shape != (pts.shape[0],):
            raise DimensionError(
                f'DimensionMismatch: {pts.shape[0]} points but {w.size} weights'
            )
        unique, inverse = np.unique(pts, axis=0, return_inverse=True)
        merged = np.zeros(len(unique))
        np.add.at(merged, inverse.reshape(-1), w)
        if normalize:
            total = merged.sum()
            if not total > 0:
                raise DesignNormalizationError('Design weights sum to zero')
            merged = merged / total
        return cls(unique, merged)

    @classmethod
    def uniform(cls, points: ArrayLike) -> ApproximateDesign:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return cls(pts, np.full(len(pts), 1.0 / len(pts)))

    @property
    def size(self) -> int:
        return int(self.weights.size)

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    def weight_at(self, point: ArrayLike, atol: float = 1e-9) -> float:
        """Weight of the support point at point, or 0."""
        hit = np.all(np.abs(self.points - np.asarray(point)) <= atol, axis=1)
        return float(self.weights[hit].sum())

    def sorted(self) -> ApproximateDesign:
        """The same design with support points in lexicographic order."""
        order = np.lexsort(self.points.T[::-1])
        return ApproximateDesign(self.points[order], self.weights[order])

    def __iter__(self) -> Iterator[tuple[tuple[float, ...], float]]:
        for x, w in zip(self.points, self.weights):
            yield tuple(float(v) for v in x), float(w)

    def __repr__(self) -> str:
        body = ', '.join(
            f'{tuple(round(v, 6) for v in x)}: {w:.6g}' for x, w in self
        )
        return f'{self.__class__.__name__}({{{body}}})'


def c_constants(system: FailureSystem, t_alpha: float) -> NDArray[np.float64]:
    """c_l = phi(h_l(t)) / sigma_l(t) * dF_T/dF_Tl at t = t_alpha."""
    marg = marginal_cdfs(system, t_alpha)
    out = np.empty(system.r)
    for l in range(system.r):
        h = float(system.standardized_margin(l, t_alpha))
        bracket = inclusion_exclusion_partial(marg, system.s, l)
        out[l] = float(norm_pdf(h)) / float(system.path_sd(l, t_alpha)) * bracket
    return out


@dataclass(frozen=True, eq=False)
class CriterionContext:
    """Everything the criterion needs at fixed nominal values.

    c_vectors[l] = c_consts[l] * f_l(x_u, t_alpha); v_inverses[l] = V_l^-1."""

    spec: ModelSpec
    system: FailureSystem
    t_alpha: float
    c_consts: NDArray[np.float64]
    c_vectors: tuple[NDArray[np.float64], ...]
    v_inverses: tuple[NDArray[np.float64], ...]
    quantile: Quantile | None = None

    @classmethod
    def build(
        cls,
        spec: ModelSpec,
        system: FailureSystem | None = None,
        t_alpha: float | None = None,
    ) -> CriterionContext:
        """Solve for t_alpha (unless given) and assemble the c-vectors."""
        if system is None:
            system = FailureSystem.from_spec(spec)
        q = None
        if t_alpha is None:
            q = quantile(system, spec.alpha)
            t_alpha = q.t_alpha
        consts = c_constants(system, t_alpha)
        vectors = tuple(
            consts[l] * eval_basis(comp.fixed_basis, spec.use_condition, t_alpha)
            for l, comp in enumerate(spec.components)
        )
        v_inv = tuple(
            spd_inverse(
                unit_covariance(comp, spec.time_plan, spec.component_error_variance(l))
            )
            for l, comp in enumerate(spec.components)
        )
        return cls(spec, system, float(t_alpha), consts, vectors, v_inv, q)

    @property
    def r(self) -> int:
        return self.spec.r

    @property
    def degenerate(self) -> bool:
        return self.quantile is not None and self.quantile.degenerate

    def scaled(self, factor: float) -> CriterionContext:
        """The same context with every c_l multiplied by factor."""
        return replace(
            self,
            c_consts=self.c_consts * factor,
            c_vectors=tuple(c * factor for c in self.c_vectors),
        )

    def candidate_information(
        self, points: ArrayLike
    ) -> tuple[NDArray[np.float64], ...]:
        """Per component, the (n, p, p) stack of F(x_i)^T V^-1 F(x_i)."""
        out = []
        for comp, v_inv in zip(self.spec.components, self.v_inverses):
            f = fixed_design_tensor(comp, points, self.spec.time_plan)
            a = np.einsum('nkp,kj,njq->npq', f, v_inv, f)
            out.append(0.5 * (a + a.transpose(0, 2, 1)))
        return tuple(out)


def info_matrix_component(
    ctx: CriterionContext, design: ApproximateDesign, l: int
) -> NDArray[np.float64]:
    """M_l(xi) = sum_i w_i F_l(x_i)^T V_l^-1 F_l(x_i)."""
    comp = ctx.spec.components[l]
    f = fixed_design_tensor(comp, design.points, ctx.spec.time_plan)
    m = np.einsum('n,nkp,kj,njq->pq', design.weights, f, ctx.v_inverses[l], f)
    return np.asarray(0.5 * (m + m.T))


def _solve(
    ctx: CriterionContext, design: ApproximateDesign
) -> tuple[float, list[NDArray[np.float64]]]:
    """Return the criterion and u_l = M_l^-1 c_l for every component."""
    total = 0.0
    us = []
    for l in range(ctx.r):
        u = spd_solve(info_matrix_component(ctx, design, l), ctx.c_vectors[l], l)
        total += float(ctx.c_vectors[l] @ u)
        us.append(u)
    return total, us


def objective(ctx: CriterionContext, design: ApproximateDesign) -> float:
    """sum_l c_l^T M_l(xi)^-1 c_l.

    Raise SingularInformationError if a block cannot be inverted."""
    return _solve(ctx, design)[0]


def sensitivities(
    ctx: CriterionContext, design: ApproximateDesign, points: ArrayLike
) -> NDArray[np.float64]:
    """d(x, xi) at many stress points."""
    _, us = _solve(ctx, design)
    out = np.zeros(len(np.atleast_2d(np.asarray(points, dtype=np.float64))))
    for u, a in zip(us, ctx.candidate_information(points)):
        out += np.einsum('p,npq,q->n', u, a, u)
    # quadratic forms in PSD blocks; roundoff can leave tiny negatives
    return np.maximum(out, 0.0)


def sensitivity(
    ctx: CriterionContext, design: ApproximateDesign, x: ArrayLike
) -> float:
    """Directional derivative of the criterion towards the one-point
    design at x:

    d(x, xi) = sum_l c_l^T M_l^-1 F_l(x)^T V_l^-1 F_l(x) M_l^-1 c_l

    The design is optimal iff d(x, xi) <= objective(xi) for all x."""
    point = np.atleast_2d(np.asarray(x, dtype=np.float64))
    return float(sensitivities(ctx, design, point)[0])


def avar(ctx: CriterionContext, design: ApproximateDesign) -> float:
    """Asymptotic variance of the quantile estimate, fixed-effects part,
    without the (dF_T/dt)^-2 factor.  Identical to objective()."""
    return objective(ctx, design)


def scaled_avar(ctx: CriterionContext, design: ApproximateDesign) -> float:
    """avar() divided by the squared density of T at t_alpha."""
    density = density_at_quantile(ctx.system, ctx.t_alpha)
    return objective(ctx, design) / density**2


def efficiency(
    ctx: CriterionContext, design: ApproximateDesign, reference: ApproximateDesign
) -> float:
    """objective(reference) / objective(design)."""
    return objective(ctx, reference) / objective(ctx, design)


def shared_product_structure(spec: ModelSpec) -> ProductStructure:
    """The common product-type factorization of identical components.

    Raise PreconditionNotMetError unless all components share basis,
    random effects, Sigma_gamma and error variance, and the basis has
    product type."""
    first = spec.components[0]
    for l, comp in enumerate(spec.components[1:], 1):
        if (
            comp.fixed_basis != first.fixed_basis
            or comp.random_time_exponents != first.random_time_exponents
            or not np.array_equal(comp.sigma_gamma, first.sigma_gamma)
            or spec.component_error_variance(l) != spec.component_error_variance(0)
        ):
            raise PreconditionNotMetError(
                f'Component {l + 1} differs from component 1 in basis or '
                'variance structure'
            )
    structure = product_structure(first)
    if structure is None:
        raise PreconditionNotMetError(
            'Fixed basis is not a product of stress and random-effects time terms'
        )
    return structure


def marginal_information(
    stress_basis: Sequence[Monomial], design: ApproximateDesign
) -> NDArray[np.float64]:
    """M1(xi) = sum_i w_i f1(x_i) f1(x_i)^T for the stress-only basis."""
    f1 = np.array([eval_basis(stress_basis, x, 0.0) for x in design.points])
    return np.asarray(np.einsum('n,np,nq->pq', design.weights, f1, f1))


def time_information(ctx: CriterionContext, l: int = 0) -> NDArray[np.float64]:
    """M2 = G^T V^-1 G."""
    g = random_design_matrix(ctx.spec.components[l], ctx.spec.time_plan)
    return np.asarray(g.T @ ctx.v_inverses[l] @ g)


def factorized_objective(ctx: CriterionContext, design: ApproximateDesign) -> float:
    """objective() through the Kronecker factorization M_l = M1 kron M2.

    The criterion becomes f1(x_u)^T M1^-1 f1(x_u) times
    sum_l c_l^2 g(t_alpha)^T M2^-1 g(t_alpha)."""
    structure = shared_product_structure(ctx.spec)
    f1u = eval_basis(structure.stress_basis, ctx.spec.use_condition, 0.0)
    m1 = marginal_information(structure.stress_basis, design)
    stress_term = float(f1u @ spd_solve(m1, f1u))
    g = ctx.t_alpha ** np.array(structure.time_exponents, dtype=np.float64)
    time_term = float(g @ spd_solve(time_information(ctx), g))
    return stress_term * time_term * float(np.sum(ctx.c_consts**2))


def marginal_extrapolation_efficiency(
    ctx: CriterionContext, design: ApproximateDesign, reference: ApproximateDesign
) -> float:
    """Efficiency of design relative to reference for extrapolating the
    stress-only marginal model to x_u.

    Under the product-type conditions of factorized_objective() this equals
    efficiency(); any additional variance term common to both designs would
    only raise the quantile efficiency above it."""
    structure = shared_product_structure(ctx.spec)
    f1u = eval_basis(structure.stress_basis, ctx.spec.use_condition, 0.0)

    def crit(xi: ApproximateDesign) -> float:
        m1 = marginal_information(structure.stress_basis, xi)
        return float(f1u @ spd_solve(m1, f1u))

    return crit(reference) / crit(design)
