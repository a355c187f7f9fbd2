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

"""
Low-level numerical kernels shared by the adtdesign modules.

Most users should use the adtdesign package namespace rather than this
module.

This module provides the standard normal distribution, the s-out-of-r
inclusion-exclusion sums, guarded symmetric solves and the exception
hierarchy.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg, special, stats

# smallest eigenvalue must exceed this fraction of the largest
PD_RTOL = 1e-10
# largest admissible condition number of an information block
MAX_CONDITION = 1e12

class DesignError(Exception):
    """An error produced by adtdesign.

    Import this from adtdesign rather than from adtdesign.lowlevel.
    """


class DimensionError(DesignError, ValueError):
    """An argument has the wrong length or shape.

    Import this from adtdesign rather than from adtdesign.lowlevel.
    """


@dataclass(frozen=True)
class Violation:
    """One violated model invariant.

    code:    machine-readable name, e.g. 'SpanViolation'.
    message: human-readable description."""

    code: str
    message: str

    def __str__(self) -> str:
        return f'{self.code}: {self.message}'


class ValidationError(DesignError):
    """A model specification violates one or more invariants.

    The complete list of violations is available as .violations.

    Import this from adtdesign rather than from adtdesign.lowlevel.
    """

    def __init__(self, violations: Iterable[Violation]):
        self.violations = tuple(violations)
        super().__init__('; '.join(str(v) for v in self.violations))

    @property
    def codes(self) -> tuple[str, ...]:
        """The violation codes, in detection order."""
        return tuple(v.code for v in self.violations)


class SingularInformationError(DesignError):
    """An information block is singular or too badly conditioned to invert.

    Import this from adtdesign rather than from adtdesign.lowlevel.
    """

    def __init__(self, condition: float, component: int | None = None):
        where = '' if component is None else f' for component {component + 1}'
        super().__init__(
            f'SingularInformation: information matrix{where} has condition '
            f'number {condition:.3g} (limit {MAX_CONDITION:.0e})'
        )
        self.condition = condition
        self.component = component


class NumericalError(DesignError):
    """A computed probability or criterion value is out of range or not finite.

    Import this from adtdesign rather than from adtdesign.lowlevel.
    """


class InfeasibleDesignError(DesignError):
    """No design on the candidate set has nonsingular information.

    Import this from adtdesign rather than from adtdesign.lowlevel.
    """


class QuantileUnattainableError(DesignError):
    """The failure-time distribution never reaches the requested level.

    Import this from adtdesign rather than from adtdesign.lowlevel.
    """

    def __init__(self, alpha: float, limit: float, t_max: float):
        super().__init__(
            f'QuantileUnattainable: F_T({t_max:g}) = {limit:.6g} < alpha = {alpha:g}'
        )
        self.alpha = alpha
        self.limit = limit
        self.t_max = t_max


class PreconditionNotMetError(DesignError):
    """A specialised computation was requested for an unsuitable model.

    Import this from adtdesign rather than from adtdesign.lowlevel.
    """


class GridTooLargeError(DesignError):
    """A candidate grid would exceed the configured point cap.

    Import this from adtdesign rather than from adtdesign.lowlevel.
    """


class EmptySupportError(DesignError):
    """Every support point of a design was pruned.

    Import this from adtdesign rather than from adtdesign.lowlevel.
    """


class DesignNormalizationError(DesignError):
    """Design weights are negative or do not sum to one.

    Import this from adtdesign rather than from adtdesign.lowlevel.
    """


class ConfigError(DesignError):
    """A problem file is malformed.

    Import this from adtdesign rather than from adtdesign.lowlevel.
    """


class NotExtrapolationWarning(UserWarning):
    """The use condition lies inside the design region.

    Import this from adtdesign rather than from adtdesign.lowlevel.
    """


def norm_cdf(x: ArrayLike) -> NDArray[np.float64]:
    """Standard normal distribution function, accurate to double precision."""
    return np.asarray(special.ndtr(x), dtype=np.float64)


def norm_pdf(x: ArrayLike) -> NDArray[np.float64]:
    """Standard normal density."""
    return np.asarray(stats.norm.pdf(x), dtype=np.float64)


def elementary_symmetric(probs: ArrayLike) -> NDArray[np.float64]:
    """Return e_0 ... e_r of the last axis of probs.

    e_k is the sum over all k-subsets D of prod_{d in D} probs[d]; leading
    axes are broadcast, so a (n, r) array yields an (n, r + 1) array."""
    p = np.asarray(probs, dtype=np.float64)
    r = p.shape[-1]
    e = np.zeros(p.shape[:-1] + (r + 1,))
    e[..., 0] = 1.0
    for j in range(r):
        # right-hand side is built from the previous e before assignment
        e[..., 1 : j + 2] = e[..., 1 : j + 2] + p[..., j, None] * e[..., : j + 1]
    return e


def _order_coefficients(r: int, s: int, offset: int) -> list[tuple[int, float]]:
    return [
        (m + offset, (-1) ** m * math.comb(m + s - 1, m)) for m in range(r - s + 1)
    ]


def inclusion_exclusion(probs: ArrayLike, s: int) -> NDArray[np.float64] | float:
    """Probability that at least s of r independent events occur.

    probs holds the r marginal probabilities along its last axis.  Returns
    sum_{m=0}^{r-s} (-1)^m C(m+s-1, m) e_{m+s}(probs)."""
    p = np.asarray(probs, dtype=np.float64)
    r = p.shape[-1]
    if not 1 <= s <= r:
        raise DimensionError(f'BadSystemOrder: s = {s} outside [1, {r}]')
    e = elementary_symmetric(p)
    total = sum(coef * e[..., k] for k, coef in _order_coefficients(r, s, s))
    if np.ndim(total) == 0:
        return float(total)
    return np.asarray(total)


def inclusion_exclusion_partial(probs: Sequence[float], s: int, l: int) -> float:
    """Partial derivative of inclusion_exclusion(probs, s) in probs[l].

    Equal to sum_{m=0}^{r-s} (-1)^m C(m+s-1, m) times the sum over
    (m+s-1)-subsets D not containing l of prod_{d in D} probs[d]."""
    p = np.asarray(probs, dtype=np.float64)
    r = p.shape[-1]
    if not 1 <= s <= r:
        raise DimensionError(f'BadSystemOrder: s = {s} outside [1, {r}]')
    e = elementary_symmetric(np.delete(p, l))
    return float(sum(coef * e[k] for k, coef in _order_coefficients(r, s, s - 1)))


def is_positive_definite(a: ArrayLike, rtol: float = PD_RTOL) -> bool:
    """Return True if the symmetric matrix a is positive definite.

    The smallest eigenvalue must exceed rtol times the largest."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        return False
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(a).max())):
        return False
    eig = linalg.eigvalsh(a)
    return bool(eig[-1] > 0 and eig[0] > rtol * eig[-1])


def condition_number(a: NDArray[np.float64]) -> float:
    """Spectral condition number of a symmetric matrix (inf if singular)."""
    eig = linalg.eigvalsh(a)
    if eig[0] <= 0:
        return math.inf
    return float(eig[-1] / eig[0])


def guarded_cho_factor(
    a: NDArray[np.float64],
    component: int | None = None,
    max_condition: float = MAX_CONDITION,
) -> tuple[NDArray[np.float64], bool]:
    """Cholesky-factor a symmetric information matrix.

    Raise SingularInformationError if its condition number exceeds
    max_condition.  No ridge is added; singularity is reported."""
    cond = condition_number(a)
    if not cond <= max_condition:
        raise SingularInformationError(cond, component)
    try:
        return linalg.cho_factor(a, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise SingularInformationError(cond, component) from exc


def spd_solve(
    a: NDArray[np.float64],
    b: NDArray[np.float64],
    component: int | None = None,
) -> NDArray[np.float64]:
    """Solve a x = b for a symmetric positive definite a, with the guard."""
    factor = guarded_cho_factor(a, component)
    return np.asarray(linalg.cho_solve(factor, b, check_finite=False))


def spd_inverse(a: NDArray[np.float64]) -> NDArray[np.float64]:
    """Inverse of a symmetric positive definite matrix, symmetrised."""
    inv = spd_solve(a, np.eye(a.shape[0]))
    return np.asarray(0.5 * (inv + inv.T))
