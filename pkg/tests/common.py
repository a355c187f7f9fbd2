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

import functools
from pathlib import Path

import numpy as np

from adtdesign import (
    ApproximateDesign,
    ComponentSpec,
    CriterionContext,
    ModelSpec,
    Monomial,
)
from adtdesign.config import ProblemConfig, load_problem
from adtdesign.optimizer import Solution, optimize

# vertex order of the unit square, as returned by make_grid()
VERTICES = ((0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0))


def problem_path(name: str) -> Path:
    return Path(__file__).parent.parent / 'problems' / name


@functools.cache
def problem(name: str) -> ProblemConfig:
    return load_problem(problem_path(name))


@functools.cache
def context(name: str) -> CriterionContext:
    return CriterionContext.build(problem(name).spec)


@functools.cache
def solution(name: str) -> Solution:
    return optimize(context(name), problem(name).options)


def random_designs(
    stress_dim: int, count: int, seed: int, size: int = 6
) -> list[ApproximateDesign]:
    """Designs on size random points of the unit cube with Dirichlet
    weights."""
    rng = np.random.default_rng(seed)
    return [
        ApproximateDesign(
            rng.uniform(size=(size, stress_dim)), rng.dirichlet(np.ones(size))
        )
        for _ in range(count)
    ]


def line_model(
    x_u: float = -0.5,
    time_plan: tuple[float, ...] = (0.0, 0.5, 1.0),
    basis: tuple[str, ...] = ('1', 'x1', 't', 'x1*t'),
    beta: tuple[float, ...] = (1.0, 0.5, 1.0, 0.2),
) -> ModelSpec:
    """One component under one stress with random intercept and slope."""
    component = ComponentSpec.random_intercept_slope(
        [Monomial.parse(m, 1) for m in basis], (0.2, 0.05), 0.3, beta, 3.0
    )
    return ModelSpec((component,), 0.1, np.array(time_plan), 1, np.array([x_u]))

