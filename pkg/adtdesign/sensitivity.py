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

"""Robustness of locally optimal designs against misspecified nominal values.

A sweep varies one nominal value, rebuilds the criterion at each value
taken as the truth, and compares the design that is optimal at the
nominal values, and the balanced vertex design, with the design that is
optimal at the truth.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import functools
import logging
import math
import re
from typing import NamedTuple, Sequence

import numpy as np
from numpy.typing import ArrayLike

from adtdesign.criterion import (
    ApproximateDesign,
    CriterionContext,
    efficiency,
    objective,
)
from adtdesign.failure import FailureSystem, component_dominance, quantile
from adtdesign.lowlevel import (
    DesignError,
    QuantileUnattainableError,
    ValidationError,
    Violation,
)
from adtdesign.model import ModelSpec, validate_system
from adtdesign.optimizer import (
    OptimizerOptions,
    consolidate,
    optimize,
    region_vertices,
)

logger = logging.getLogger(__name__)

_TARGET_RE = re.compile(
    r'^(?:(?P<beta>beta)\[(?P<l>\d+)\]\[(?P<q>\d+)\]'
    r'|(?P<xu>x_u)\[(?P<j>\d+)\]'
    r'|(?P<thr>threshold)\[(?P<tl>\d+)\]'
    r'|(?P<alpha>alpha))$'
)


class SweepTarget(NamedTuple):
    """A single nominal value of a ModelSpec.

    kind is 'beta', 'x_u', 'threshold' or 'alpha'; indices are 0-based."""

    kind: str
    indices: tuple[int, ...] = ()

    @classmethod
    def parse(cls, text: str) -> SweepTarget:
        """Parse 'beta[l][q]', 'x_u[j]', 'threshold[l]' or 'alpha' with
        1-based indices."""
        m = _TARGET_RE.match(text.replace(' ', ''))
        if m is None:
            raise ValidationError(
                [Violation('BadSweep', f'unknown sweep target {text!r}')]
            )
        if m['beta']:
            target = cls('beta', (int(m['l']) - 1, int(m['q']) - 1))
        elif m['xu']:
            target = cls('x_u', (int(m['j']) - 1,))
        elif m['thr']:
            target = cls('threshold', (int(m['tl']) - 1,))
        else:
            target = cls('alpha')
        if any(i < 0 for i in target.indices):
            raise ValidationError(
                [Violation('BadSweep', f'sweep target {text!r} indices start at 1')]
            )
        return target

    def __str__(self) -> str:
        return self.kind + ''.join(f'[{i + 1}]' for i in self.indices)

    def check(self, spec: ModelSpec) -> None:
        """Raise ValidationError if the indices do not exist in spec."""
        ok = True
        if self.kind in ('beta', 'threshold'):
            ok = self.indices[0] < spec.r
            if ok and self.kind == 'beta':
                ok = self.indices[1] < spec.components[self.indices[0]].p
        elif self.kind == 'x_u':
            ok = self.indices[0] < spec.stress_dim
        if not ok:
            raise ValidationError(
                [Violation('BadSweep', f'sweep target {self} is out of range')]
            )

    def nominal(self, spec: ModelSpec) -> float:
        if self.kind == 'beta':
            l, q = self.indices
            return float(spec.components[l].beta[q])
        if self.kind == 'threshold':
            return spec.components[self.indices[0]].threshold
        if self.kind == 'x_u':
            return float(spec.use_condition[self.indices[0]])
        return spec.alpha

    def apply(self, spec: ModelSpec, value: float) -> ModelSpec:
        """spec with this nominal value replaced by value."""
        if self.kind == 'beta':
            l, q = self.indices
            beta = spec.components[l].beta.copy()
            beta[q] = value
            return spec.with_component(l, spec.components[l].replace(beta=beta))
        if self.kind == 'threshold':
            l = self.indices[0]
            return spec.with_component(l, spec.components[l].replace(threshold=value))
        if self.kind == 'x_u':
            x_u = spec.use_condition.copy()
            x_u[self.indices[0]] = value
            return spec.replace(use_condition=x_u)
        return spec.replace(alpha=value)


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep: target, the values it takes, and whether the
    design is re-optimized at each value."""

    target: SweepTarget
    values: tuple[float, ...]
    reoptimize: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, 'values', tuple(float(v) for v in self.values))
        if not self.values:
            raise ValidationError([Violation('BadSweep', 'sweep has no values')])
        if not all(math.isfinite(v) for v in self.values):
            raise ValidationError(
                [Violation('BadSweep', 'sweep values must be finite')]
            )

    @staticmethod
    def value_range(start: float, stop: float, step: float) -> tuple[float, ...]:
        """start, start + step, ... up to stop inclusive."""
        if not step > 0 or stop < start:
            raise ValidationError(
                [Violation('BadSweep', f'empty sweep range {start}:{stop}:{step}')]
            )
        n = math.floor((stop - start) / step + 1e-9)
        return tuple(round(start + i * step, 12) for i in range(n + 1))


@dataclass(frozen=True)
class SweepRow:
    """Outcome of one sweep value.

    status is 'ok', 'not-certified', 'degenerate', 'unattainable' or
    'error'; efficiencies are absent unless a criterion could be built.
    Without re-optimization the nominal design is the reference, so
    efficiency_star is absent and efficiency_bar compares with it."""

    value: float
    status: str
    t_alpha: float = math.nan
    optimal_weights: tuple[tuple[tuple[float, ...], float], ...] = ()
    efficiency_star: float | None = None
    efficiency_bar: float | None = None
    marginal_cdfs_at_quantile: tuple[float, ...] = ()
    dominant: int | None = None
    certified: bool | None = None
    message: str = field(default='', compare=False)


def balanced_vertex_design(region: ArrayLike) -> ApproximateDesign:
    """Equal weights on all 2^d vertices of the region."""
    return ApproximateDesign.uniform(region_vertices(region))


def _sweep_row(
    spec: ModelSpec,
    target: SweepTarget,
    reoptimize: bool,
    options: OptimizerOptions,
    nominal_design: ApproximateDesign,
    balanced: ApproximateDesign,
    value: float,
) -> SweepRow:
    try:
        truth = validate_system(target.apply(spec, value))
        system = FailureSystem.from_spec(truth)
        q = quantile(system, truth.alpha)
    except QuantileUnattainableError as exc:
        logger.warning('%s = %g: %s', target, value, exc)
        return SweepRow(value, 'unattainable', message=str(exc))
    except DesignError as exc:
        logger.warning('%s = %g: %s', target, value, exc)
        return SweepRow(value, 'error', message=str(exc))

    dominant, marginals = component_dominance(system, q.t_alpha)
    base = SweepRow(
        value,
        'degenerate',
        t_alpha=q.t_alpha,
        marginal_cdfs_at_quantile=marginals,
        dominant=dominant,
    )
    if q.degenerate:
        logger.warning('%s = %g: quantile degenerate at zero', target, value)
        return base

    try:
        ctx = CriterionContext.build(truth, system, q.t_alpha)
        if reoptimize:
            solution = optimize(ctx, options)
            weights = consolidate(
                solution.design,
                options.report_threshold,
                options.grid_step,
                truth.design_region,
            )
            # the optimizer stops within tolerance of the optimum, so a
            # compared design can come out marginally better
            reference = min(
                (solution.design, nominal_design, balanced),
                key=lambda design: objective(ctx, design),
            )
            efficiency_star: float | None = efficiency(ctx, nominal_design, reference)
            certified: bool | None = solution.certified
        else:
            weights = consolidate(
                nominal_design,
                options.report_threshold,
                options.grid_step,
                truth.design_region,
            )
            reference = nominal_design
            efficiency_star = None
            certified = None
        row = SweepRow(
            value,
            'not-certified' if certified is False else 'ok',
            t_alpha=q.t_alpha,
            optimal_weights=tuple(weights),
            efficiency_star=efficiency_star,
            efficiency_bar=efficiency(ctx, balanced, reference),
            marginal_cdfs_at_quantile=marginals,
            dominant=dominant,
            certified=certified,
        )
    except DesignError as exc:
        logger.warning('%s = %g: %s', target, value, exc)
        return SweepRow(
            value,
            'error',
            t_alpha=q.t_alpha,
            marginal_cdfs_at_quantile=marginals,
            dominant=dominant,
            message=str(exc),
        )
    if certified is False:
        logger.warning('%s = %g: re-optimized design not certified', target, value)
    return row


class SweepResult(NamedTuple):
    """Rows of a sweep plus the nominal designs they were compared with."""

    rows: tuple[SweepRow, ...]
    nominal_design: ApproximateDesign
    balanced_design: ApproximateDesign


def sweep(
    spec: ModelSpec,
    sweep: SweepSpec,
    options: OptimizerOptions | None = None,
    workers: int = 1,
    nominal_design: ApproximateDesign | None = None,
) -> SweepResult:
    """Evaluate the nominal-optimal and balanced designs across sweep values.

    nominal_design defaults to the optimized design at the nominal values
    of spec.  Rows are independent; with workers > 1 they are computed in
    a process pool and still returned in input order."""
    if options is None:
        options = OptimizerOptions()
    validate_system(spec)
    sweep.target.check(spec)
    if nominal_design is None:
        nominal_design = optimize(CriterionContext.build(spec), options).design
    balanced = balanced_vertex_design(spec.design_region)
    row = functools.partial(
        _sweep_row,
        spec,
        sweep.target,
        sweep.reoptimize,
        options,
        nominal_design,
        balanced,
    )
    logger.info('Sweeping %s over %d values', sweep.target, len(sweep.values))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(row, sweep.values))
    else:
        rows = tuple(map(row, sweep.values))
    return SweepResult(rows, nominal_design, balanced)


def support_union(rows: Sequence[SweepRow]) -> list[tuple[float, ...]]:
    """Lexicographically sorted union of the reported support points."""
    points = {x for r in rows for x, _ in r.optimal_weights}
    return sorted(points)


def weight_range(rows: Sequence[SweepRow]) -> float:
    """Largest change of any reported weight across the rows."""
    points = support_union(rows)
    if not points:
        return 0.0
    table = np.array(
        [[dict(r.optimal_weights).get(x, 0.0) for x in points] for r in rows]
    )
    return float(np.max(table.max(axis=0) - table.min(axis=0)))
