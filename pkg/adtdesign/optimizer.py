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

"""Computation and certification of c-optimal approximate designs.

Designs are optimized over a rectangular candidate grid by the
multiplicative algorithm and certified with the general equivalence
theorem: xi is c-optimal iff max_x d(x, xi) equals the criterion value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import itertools
import logging
import math
from typing import NamedTuple
import warnings

import numpy as np
from numpy.typing import ArrayLike, NDArray

from adtdesign.criterion import (
    ApproximateDesign,
    CriterionContext,
    sensitivities,
)
from adtdesign.lowlevel import (
    EmptySupportError,
    GridTooLargeError,
    InfeasibleDesignError,
    NotExtrapolationWarning,
    NumericalError,
    SingularInformationError,
    ValidationError,
    Violation,
    spd_solve,
)

logger = logging.getLogger(__name__)

# relative slack on the per-iteration monotonicity check
MONOTONE_RTOL = 1e-10
# default point cap for candidate and verification grids
DEFAULT_GRID_CAP = 10**6


@dataclass(frozen=True)
class OptimizerOptions:
    """Tuning of the multiplicative algorithm and of certification."""

    grid_step: float = 0.05
    max_iterations: int = 100000
    convergence_tol: float = 1e-9
    equivalence_tol: float = 1e-6
    prune_threshold: float = 1e-8
    report_threshold: float = 1e-3
    power: float = 1.0
    verification_refine: int = 2
    grid_cap: int = DEFAULT_GRID_CAP

    def __post_init__(self) -> None:
        bad = [
            Violation('BadOption', f'{name} = {getattr(self, name)} must be positive')
            for name in (
                'grid_step',
                'max_iterations',
                'convergence_tol',
                'equivalence_tol',
                'prune_threshold',
                'report_threshold',
                'power',
                'verification_refine',
                'grid_cap',
            )
            if not getattr(self, name) > 0
        ]
        if bad:
            raise ValidationError(bad)

    @property
    def verification_step(self) -> float:
        return self.grid_step / self.verification_refine


@dataclass(frozen=True, eq=False)
class EquivalenceReport:
    """Equivalence-theorem check of a design over a verification grid."""

    objective_value: float
    max_sensitivity: float
    argmax_point: tuple[float, ...]
    gap: float
    support_sensitivities: NDArray[np.float64]
    certified: bool


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    """Outcome of multiplicative().

    design is the pruned final iterate; report certifies it on the
    candidate grid; history holds the criterion value per iteration."""

    design: ApproximateDesign
    report: EquivalenceReport
    iterations: int
    converged: bool
    history: tuple[float, ...] = field(repr=False)

    @property
    def certified(self) -> bool:
        return self.report.certified


def _axis_lattice(lo: float, hi: float, step: float) -> NDArray[np.float64]:
    edge = hi - lo
    n = round(edge / step)
    if n < 1 or abs(n * step - edge) > 1e-12 * max(1.0, abs(edge)):
        raise ValidationError(
            [
                Violation(
                    'BadOption',
                    f'grid step {step:g} does not divide interval [{lo:g}, {hi:g}]',
                )
            ]
        )
    return lo + (hi - lo) * np.arange(n + 1) / n


def make_grid(
    region: ArrayLike, step: float, cap: int = DEFAULT_GRID_CAP
) -> NDArray[np.float64]:
    """All points of the lattice with spacing step over the region,
    endpoints included, in lexicographic order.

    Raise GridTooLargeError if the grid would exceed cap points."""
    bounds = np.atleast_2d(np.asarray(region, dtype=np.float64))
    if not step > 0:
        raise ValidationError(
            [Violation('BadOption', f'grid step {step} must be positive')]
        )
    axes = [_axis_lattice(lo, hi, step) for lo, hi in bounds]
    count = math.prod(len(a) for a in axes)
    if count > cap:
        raise GridTooLargeError(f'Grid of {count} points exceeds cap {cap}')
    mesh = np.meshgrid(*axes, indexing='ij')
    return np.column_stack([m.reshape(-1) for m in mesh])


def region_vertices(region: ArrayLike) -> NDArray[np.float64]:
    """The 2^d corners of a rectangular region, lexicographically."""
    bounds = np.atleast_2d(np.asarray(region, dtype=np.float64))
    return np.array(list(itertools.product(*bounds)), dtype=np.float64)


def equivalence_report(
    ctx: CriterionContext,
    design: ApproximateDesign,
    grid: ArrayLike,
    equivalence_tol: float = 1e-6,
) -> EquivalenceReport:
    """Evaluate d(x, xi) on grid and on the support of design."""
    grid = np.atleast_2d(np.asarray(grid, dtype=np.float64))
    points = np.concatenate([grid, design.points])
    d = sensitivities(ctx, design, points)
    value = float(design.weights @ d[len(grid) :])
    i = int(np.argmax(d))
    gap = float(d[i]) / value - 1.0
    return EquivalenceReport(
        objective_value=value,
        max_sensitivity=float(d[i]),
        argmax_point=tuple(float(v) for v in points[i]),
        gap=gap,
        support_sensitivities=d[len(grid) :],
        certified=gap <= equivalence_tol,
    )


class _Kernel:
    """Criterion and sensitivities for weight vectors on a fixed grid."""

    def __init__(self, ctx: CriterionContext, candidates: NDArray[np.float64]):
        self.ctx = ctx
        self.blocks = ctx.candidate_information(candidates)

    def evaluate(self, w: NDArray[np.float64]) -> tuple[float, NDArray[np.float64]]:
        value = 0.0
        d = np.zeros(len(w))
        for l, (a, c) in enumerate(zip(self.blocks, self.ctx.c_vectors)):
            m = np.einsum('n,npq->pq', w, a)
            u = spd_solve(0.5 * (m + m.T), c, l)
            value += float(c @ u)
            d += np.einsum('p,npq,q->n', u, a, u)
        if not (math.isfinite(value) and np.all(np.isfinite(d))):
            raise NumericalError(f'Criterion value {value} is not finite')
        # quadratic forms in PSD blocks; roundoff can leave tiny negatives
        return value, np.maximum(d, 0.0)


def _step(
    w: NDArray[np.float64], d: NDArray[np.float64], value: float, power: float
) -> NDArray[np.float64]:
    new = w * (d / value) ** power
    return new / new.sum()


def multiplicative(
    ctx: CriterionContext,
    candidates: ArrayLike,
    options: OptimizerOptions | None = None,
) -> OptimizationResult:
    """Minimize the criterion over designs supported on candidates.

    Starting from uniform weights, iterate w_i <- w_i (d_i / phi)^power.
    Stop once the relative decrease of phi is at most convergence_tol and
    the equivalence gap on the candidates is at most equivalence_tol, or
    after max_iterations with converged False.  Weights below
    prune_threshold are then dropped.

    Raise InfeasibleDesignError if the uniform design is singular."""
    if options is None:
        options = OptimizerOptions()
    cand = np.atleast_2d(np.asarray(candidates, dtype=np.float64))
    n = len(cand)
    if n == 0:
        raise InfeasibleDesignError('No candidate points')
    kernel = _Kernel(ctx, cand)
    w = np.full(n, 1.0 / n)
    try:
        value, d = kernel.evaluate(w)
    except SingularInformationError as exc:
        raise InfeasibleDesignError(
            f'Uniform design on {n} candidates is singular: {exc}'
        ) from exc
    logger.info(
        'Optimizing over %d candidates (power %g, tol %g, gap tol %g)',
        n,
        options.power,
        options.convergence_tol,
        options.equivalence_tol,
    )

    history = [value]
    converged = False
    decrease = 0.0
    it = 0
    while True:
        gap = float(d.max()) / value - 1.0
        if gap <= options.equivalence_tol and (
            it == 0 or decrease <= options.convergence_tol
        ):
            converged = True
            break
        if it >= options.max_iterations:
            break
        it += 1
        new_w = _step(w, d, value, options.power)
        new_value, new_d = kernel.evaluate(new_w)
        if new_value > value and options.power > 0.5:
            # the square-root update never increases the criterion
            new_w = _step(w, d, value, 0.5)
            new_value, new_d = kernel.evaluate(new_w)
        if new_value > value * (1 + MONOTONE_RTOL):
            logger.warning(
                'Criterion rose from %.12g to %.12g at iteration %d; stopping',
                value,
                new_value,
                it,
            )
            break
        decrease = (value - new_value) / value
        w, value, d = new_w, new_value, new_d
        history.append(value)
        if it % 1000 == 0:
            logger.debug('Iteration %d: criterion %.12g, gap %.3g', it, value, gap)

    keep = w >= options.prune_threshold
    design = ApproximateDesign(cand[keep], w[keep] / w[keep].sum())
    try:
        report = equivalence_report(ctx, design, cand, options.equivalence_tol)
    except SingularInformationError:
        design = ApproximateDesign(cand, w / w.sum())
        report = equivalence_report(ctx, design, cand, options.equivalence_tol)
    logger.info(
        'Stopped after %d iterations: criterion %.12g, gap %.3g, certified %s',
        it,
        report.objective_value,
        report.gap,
        report.certified,
    )
    return OptimizationResult(design, report, it, converged, tuple(history))


class Solution(NamedTuple):
    """An optimized design with its certificate on the verification grid."""

    result: OptimizationResult
    report: EquivalenceReport

    @property
    def design(self) -> ApproximateDesign:
        return self.result.design

    @property
    def certified(self) -> bool:
        return self.result.converged and self.report.certified


def optimize(
    ctx: CriterionContext, options: OptimizerOptions | None = None
) -> Solution:
    """Run multiplicative() on the design-region grid and certify the
    result on the refined verification grid."""
    if options is None:
        options = OptimizerOptions()
    region = ctx.spec.design_region
    candidates = make_grid(region, options.grid_step, options.grid_cap)
    result = multiplicative(ctx, candidates, options)
    verification = make_grid(region, options.verification_step, options.grid_cap)
    report = equivalence_report(
        ctx, result.design, verification, options.equivalence_tol
    )
    return Solution(result, report)


class ProductDesign(NamedTuple):
    """Result of product_extrapolation_design()."""

    design: ApproximateDesign
    marginal_weights: tuple[float, ...]
    extrapolation: bool


def _upper_weight(u: float) -> float:
    # weight at the upper end of [0, 1] for extrapolating a line to u
    if u <= 0.5:
        return abs(u) / (1 + 2 * abs(u))
    v = abs(u - 1)
    return 1 - v / (1 + 2 * v)


def product_extrapolation_design(
    x_u: ArrayLike, region: ArrayLike | None = None
) -> ProductDesign:
    """Closed-form c-optimal design for multilinear stress bases.

    Each axis carries the c-optimal design for extrapolating a straight
    line to x_u,j: weight |u| / (1 + 2|u|) on the upper end when u < 0 in
    standardized units, and the product of these marginal designs is
    returned.  If some coordinate lies inside the region the marginal
    formula is not optimal; a NotExtrapolationWarning is issued and the
    extrapolation flag cleared."""
    x = np.asarray(x_u, dtype=np.float64)
    if region is None:
        bounds = np.array([[0.0, 1.0]] * len(x))
    else:
        bounds = np.atleast_2d(np.asarray(region, dtype=np.float64))
    lo, hi = bounds[:, 0], bounds[:, 1]
    u = (x - lo) / (hi - lo)
    inside = (u >= 0) & (u <= 1)
    if inside.any():
        axes = ', '.join(f'x{j + 1}' for j in np.flatnonzero(inside))
        warnings.warn(
            f'Use condition lies inside the design region along {axes}; '
            'the product design is not c-optimal there',
            NotExtrapolationWarning,
            stacklevel=2,
        )
    marginal = tuple(_upper_weight(float(v)) for v in u)
    points = region_vertices(bounds)
    weights = np.ones(len(points))
    for j, wj in enumerate(marginal):
        weights *= np.where(points[:, j] == hi[j], wj, 1.0 - wj)
    keep = weights > 0
    design = ApproximateDesign(points[keep], weights[keep] / weights[keep].sum())
    return ProductDesign(design, marginal, not inside.any())


def consolidate(
    design: ApproximateDesign,
    report_threshold: float = 1e-3,
    grid_step: float | None = None,
    region: ArrayLike | None = None,
) -> ApproximateDesign:
    """Drop weights below report_threshold, renormalize, and merge support
    points closer than grid_step / 2.

    Merged clusters sit at their weighted centroid snapped to the lattice
    of make_grid(region, grid_step); without a region the lattice is
    anchored at the origin.
    Raise EmptySupportError if nothing is left."""
    keep = design.weights >= report_threshold
    if not keep.any():
        raise EmptySupportError(
            f'All {design.size} weights are below {report_threshold:g}'
        )
    points = design.points[keep]
    weights = design.weights[keep] / design.weights[keep].sum()
    if grid_step is None:
        return ApproximateDesign(points, weights)

    if region is None:
        origin = np.zeros(points.shape[1])
        lower = np.full(points.shape[1], -np.inf)
        upper = np.full(points.shape[1], np.inf)
    else:
        bounds = np.atleast_2d(np.asarray(region, dtype=np.float64))
        origin = lower = bounds[:, 0]
        upper = bounds[:, 1]

    order = np.argsort(-weights, kind='stable')
    used = np.zeros(len(points), dtype=bool)
    merged_points = []
    merged_weights = []
    for i in order:
        if used[i]:
            continue
        close = ~used & np.all(np.abs(points - points[i]) < grid_step / 2, axis=1)
        used |= close
        w = weights[close]
        if close.sum() == 1:
            merged_points.append(points[i])
        else:
            centroid = w @ points[close] / w.sum()
            snapped = origin + np.round((centroid - origin) / grid_step) * grid_step
            merged_points.append(np.clip(snapped, lower, upper))
        merged_weights.append(w.sum())
    return ApproximateDesign.from_raw(
        np.array(merged_points), np.array(merged_weights), normalize=True
    ).sorted()


def round_design(design: ApproximateDesign, n_units: int) -> NDArray[np.int64]:
    """Integer unit counts per support point summing to n_units.

    Largest-remainder rounding of n_units * w; ties go to the earlier
    point."""
    if n_units < 0:
        raise ValueError(f'Negative unit count {n_units}')
    raw = n_units * design.weights
    counts = np.floor(raw).astype(np.int64)
    short = n_units - int(counts.sum())
    if short:
        order = np.argsort(-(raw - counts), kind='stable')
        counts[order[:short]] += 1
    return counts
