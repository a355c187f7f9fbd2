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

"""Failure-time distributions under normal use conditions.

A component fails softly once its unit-specific mean path crosses the
threshold y_0.  At the use condition x_u the failure time T_l therefore has
distribution function Phi((mu_l(t) - y_0) / sigma_l(t)); an s-out-of-r
system fails at the s-th component failure.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging
import math
from typing import NamedTuple, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from numpy.typing import ArrayLike, NDArray
from scipy import optimize

from adtdesign.lowlevel import (
    DimensionError,
    NumericalError,
    QuantileUnattainableError,
    ValidationError,
    Violation,
    inclusion_exclusion,
    norm_cdf,
)
from adtdesign.model import ModelSpec

logger = logging.getLogger(__name__)

# slack allowed on joint probabilities before they count as out of range
PROBABILITY_ATOL = 1e-12
# absolute tolerance of the final bisection in t
QUANTILE_XTOL = 1e-12


@dataclass(frozen=True, eq=False)
class TimePolynomial:
    """sum(coefficients[m] * t**m)."""

    coefficients: NDArray[np.float64]

    def __post_init__(self) -> None:
        coef = np.trim_zeros(np.array(self.coefficients, dtype=np.float64), 'b')
        if coef.size == 0:
            coef = np.zeros(1)
        coef.flags.writeable = False
        object.__setattr__(self, 'coefficients', coef)

    @property
    def degree(self) -> int:
        return int(self.coefficients.size - 1)

    def __call__(self, t: ArrayLike) -> NDArray[np.float64]:
        return np.asarray(P.polyval(t, self.coefficients))

    def __getitem__(self, m: int) -> float:
        return float(self.coefficients[m]) if m <= self.degree else 0.0

    def leading(self) -> float:
        return float(self.coefficients[-1])


def mean_path(spec: ModelSpec, l: int) -> TimePolynomial:
    """Aggregate degradation path mu_l(t) = f_l(x_u, t)^T beta_l."""
    comp = spec.components[l]
    coef = np.zeros(max(m.time_exponent for m in comp.fixed_basis) + 1)
    for mono, b in zip(comp.fixed_basis, comp.beta):
        coef[mono.time_exponent] += b * mono.stress_part()(spec.use_condition, 0.0)
    return TimePolynomial(coef)


def path_variance(spec: ModelSpec, l: int) -> TimePolynomial:
    """Variance g_l(t)^T Sigma_gamma g_l(t) of the unit path at time t."""
    comp = spec.components[l]
    exps = comp.random_time_exponents
    coef = np.zeros(2 * max(exps) + 1)
    for a, ea in enumerate(exps):
        for b, eb in enumerate(exps):
            coef[ea + eb] += comp.sigma_gamma[a, b]
    return TimePolynomial(coef)


@dataclass(frozen=True, eq=False)
class FailureSystem:
    """Marginal failure-time laws of r components plus the s-out-of-r rule."""

    mean_polys: tuple[TimePolynomial, ...]
    var_polys: tuple[TimePolynomial, ...]
    thresholds: NDArray[np.float64]
    s: int
    t_max: float = 1e6

    def __post_init__(self) -> None:
        object.__setattr__(self, 'mean_polys', tuple(self.mean_polys))
        object.__setattr__(self, 'var_polys', tuple(self.var_polys))
        thresholds = np.array(self.thresholds, dtype=np.float64)
        thresholds.flags.writeable = False
        object.__setattr__(self, 'thresholds', thresholds)
        r = len(self.mean_polys)
        if len(self.var_polys) != r or thresholds.shape != (r,):
            raise DimensionError(
                'DimensionMismatch: per-component lists differ in length'
            )
        problems = []
        if not 1 <= self.s <= r:
            problems.append(
                Violation('BadSystemOrder', f's = {self.s} outside [1, {r}]')
            )
        grid = np.unique(
            np.concatenate(
                [
                    np.linspace(0.0, self.t_max, 10001),
                    np.geomspace(min(1e-6, self.t_max), self.t_max, 2001),
                ]
            )
        )
        for l, var in enumerate(self.var_polys):
            if not np.all(var(grid) > 0):
                problems.append(
                    Violation(
                        'NotPositiveDefinite',
                        f'component {l + 1}: path variance vanishes on '
                        f'[0, {self.t_max:g}]',
                    )
                )
        if problems:
            raise ValidationError(problems)

    @classmethod
    def from_spec(cls, spec: ModelSpec) -> FailureSystem:
        return cls(
            tuple(mean_path(spec, l) for l in range(spec.r)),
            tuple(path_variance(spec, l) for l in range(spec.r)),
            np.array([c.threshold for c in spec.components]),
            spec.system_s,
            spec.t_max,
        )

    @property
    def r(self) -> int:
        return len(self.mean_polys)

    def standardized_margin(self, l: int, t: ArrayLike) -> NDArray[np.float64]:
        """h_l(t) = (mu_l(t) - y_0) / sigma_l(t)."""
        return (self.mean_polys[l](t) - self.thresholds[l]) / np.sqrt(
            self.var_polys[l](t)
        )

    def path_sd(self, l: int, t: ArrayLike) -> NDArray[np.float64]:
        return np.sqrt(self.var_polys[l](t))


def marginal_cdf(system: FailureSystem, l: int, t: float) -> float:
    """P(T_l <= t) for component l."""
    return float(norm_cdf(system.standardized_margin(l, t)))


def marginal_cdfs(system: FailureSystem, t: ArrayLike) -> NDArray[np.float64]:
    """All marginal CDFs at t; the component axis is last."""
    t = np.asarray(t, dtype=np.float64)
    return np.stack(
        [norm_cdf(system.standardized_margin(l, t)) for l in range(system.r)], axis=-1
    )


def joint_cdf(system: FailureSystem, t: ArrayLike) -> NDArray[np.float64] | float:
    """P(T <= t) for the s-out-of-r system failure time T."""
    value = inclusion_exclusion(marginal_cdfs(system, t), system.s)
    if not np.all((value >= -PROBABILITY_ATOL) & (value <= 1 + PROBABILITY_ATOL)):
        raise NumericalError(f'system failure probability outside [0, 1] at t = {t}')
    return value


class Quantile(NamedTuple):
    """Result of quantile()."""

    t_alpha: float
    alpha: float
    marginal_cdfs: tuple[float, ...]
    joint_value: float
    degenerate: bool
    bracket_steps: int


def _quantile_result(
    system: FailureSystem, t: float, alpha: float, degenerate: bool, steps: int
) -> Quantile:
    marg = marginal_cdfs(system, t)
    return Quantile(
        t,
        alpha,
        tuple(float(v) for v in marg),
        float(inclusion_exclusion(marg, system.s)),
        degenerate,
        steps,
    )


def quantile(system: FailureSystem, alpha: float) -> Quantile:
    """Solve F_T(t) = alpha on [0, t_max].

    If F_T(0) >= alpha the quantile is degenerate and t_alpha = 0 is
    returned with the degenerate flag set.  Raise QuantileUnattainableError
    if F_T(t_max) < alpha."""
    if not 0.0 < alpha < 1.0:
        raise ValidationError(
            [Violation('BadAlpha', f'alpha = {alpha} outside (0, 1)')]
        )

    def excess(t: float) -> float:
        return float(joint_cdf(system, t)) - alpha

    if excess(0.0) >= 0:
        logger.warning('F_T(0) >= %g, quantile is degenerate at zero', alpha)
        return _quantile_result(system, 0.0, alpha, True, 0)

    lo, hi, steps = 0.0, min(1.0, system.t_max), 0
    while excess(hi) < 0:
        if hi >= system.t_max:
            raise QuantileUnattainableError(
                alpha, float(joint_cdf(system, system.t_max)), system.t_max
            )
        lo, hi = hi, min(2.0 * hi, system.t_max)
        steps += 1
        logger.debug('Expanding quantile bracket to [%g, %g]', lo, hi)
    t = optimize.bisect(excess, lo, hi, xtol=QUANTILE_XTOL, maxiter=400)
    return _quantile_result(system, float(t), alpha, False, steps)


def failure_curve(system: FailureSystem, times: ArrayLike) -> NDArray[np.float64]:
    """Rows (t, F_T(t), F_T1(t), ..., F_Tr(t)) for plotting."""
    t = np.asarray(times, dtype=np.float64)
    marg = marginal_cdfs(system, t)
    joint = inclusion_exclusion(marg, system.s)
    return np.column_stack([t, joint, marg])


def component_dominance(
    system: FailureSystem, t: float
) -> tuple[int, tuple[float, ...]]:
    """Index of the component most likely to have failed by t, and all
    marginal CDF values at t."""
    marg = marginal_cdfs(system, t)
    return int(np.argmax(marg)), tuple(float(v) for v in marg)


def density_at_quantile(system: FailureSystem, t_alpha: float) -> float:
    """dF_T/dt at t_alpha by central differences."""
    h = 1e-6 * max(1.0, abs(t_alpha))
    if t_alpha - h < 0:
        lo, hi = t_alpha, t_alpha + h
    else:
        lo, hi = t_alpha - h, t_alpha + h
    return (float(joint_cdf(system, hi)) - float(joint_cdf(system, lo))) / (hi - lo)


def saturation_limit(system: FailureSystem, l: int) -> float | None:
    """lim F_Tl(t) as t grows, or None if it cannot be read off the
    polynomial degrees."""
    mean, var = system.mean_polys[l], system.var_polys[l]
    if mean.degree == 0 and var.degree == 0:
        return marginal_cdf(system, l, 0.0)
    if 2 * mean.degree == var.degree:
        return float(norm_cdf(mean.leading() / math.sqrt(var.leading())))
    if 2 * mean.degree > var.degree:
        return 1.0 if mean.leading() > 0 else 0.0
    return 0.5


def scan_first_crossing(
    system: FailureSystem, alpha: float, times: Sequence[float] | NDArray[np.float64]
) -> tuple[float, float] | None:
    """First grid interval [t_i, t_i+1] on which F_T reaches alpha."""
    t = np.asarray(times, dtype=np.float64)
    values = np.asarray(joint_cdf(system, t))
    hits = np.flatnonzero(values >= alpha)
    if hits.size == 0:
        return None
    i = int(hits[0])
    if i == 0:
        return float(t[0]), float(t[0])
    return float(t[i - 1]), float(t[i])
