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

"""Problem files and design files.

A problem file is a TOML document with a [model] table, one
[[component]] table per component and optional [optimizer] and [sweep]
tables.  Unknown keys are errors.  Design files are CSV with header
x_1,...,x_d,weight.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
import math
from os import PathLike
import tomllib
from typing import Any, Callable, TextIO, TypeVar, Union

import numpy as np

from adtdesign.criterion import ApproximateDesign
from adtdesign.lowlevel import ConfigError
from adtdesign.model import ComponentSpec, ModelSpec, Monomial, validate_system
from adtdesign.optimizer import OptimizerOptions
from adtdesign.sensitivity import SweepSpec, SweepTarget

StrPath = Union[str, PathLike[str]]
T = TypeVar('T')

_REQUIRED = object()


def _is_real(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _real(value: Any, key: str) -> float:
    if not _is_real(value):
        raise ConfigError(f'{key}: expected a number, got {value!r}')
    return float(value)


def _integer(value: Any, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f'{key}: expected an integer, got {value!r}')
    return value


def _boolean(value: Any, key: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f'{key}: expected true or false, got {value!r}')
    return value


def _string(value: Any, key: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(f'{key}: expected a string, got {value!r}')
    return value


def _reals(value: Any, key: str) -> list[float]:
    if not isinstance(value, list):
        raise ConfigError(f'{key}: expected an array of numbers')
    return [_real(v, f'{key}[{i + 1}]') for i, v in enumerate(value)]


def _integers(value: Any, key: str) -> list[int]:
    if not isinstance(value, list):
        raise ConfigError(f'{key}: expected an array of integers')
    return [_integer(v, f'{key}[{i + 1}]') for i, v in enumerate(value)]


def _matrix(value: Any, key: str) -> list[list[float]]:
    if not isinstance(value, list):
        raise ConfigError(f'{key}: expected an array of arrays')
    rows = [_reals(row, f'{key}[{i + 1}]') for i, row in enumerate(value)]
    if len({len(row) for row in rows}) > 1:
        raise ConfigError(f'{key}: rows differ in length')
    return rows


class _Table:
    """Strict accessor for one TOML table."""

    def __init__(self, data: Any, path: str):
        if not isinstance(data, dict):
            raise ConfigError(f'{path}: expected a table')
        self._data = dict(data)
        self.path = path

    def key(self, name: str) -> str:
        return f'{self.path}.{name}' if self.path else name

    def __contains__(self, name: str) -> bool:
        return name in self._data

    def take(
        self,
        name: str,
        convert: Callable[[Any, str], T],
        default: Any = _REQUIRED,
    ) -> T:
        if name not in self._data:
            if default is _REQUIRED:
                raise ConfigError(f'{self.key(name)}: missing required key')
            return default  # type: ignore[no-any-return]
        return convert(self._data.pop(name), self.key(name))

    def finish(self) -> None:
        if self._data:
            names = ', '.join(self.key(k) for k in sorted(self._data))
            raise ConfigError(f'Unknown key {names}')


@dataclass(frozen=True)
class ProblemConfig:
    """A parsed problem file."""

    spec: ModelSpec
    options: OptimizerOptions
    sweep: SweepSpec | None = None
    source: str = '<string>'

    def with_overrides(
        self,
        alpha: float | None = None,
        grid_step: float | None = None,
        tol: float | None = None,
        sweep_target: str | None = None,
        sweep_range: str | None = None,
        reoptimize: bool | None = None,
    ) -> ProblemConfig:
        """Apply command-line overrides and re-validate."""
        spec, options, sweep = self.spec, self.options, self.sweep
        if alpha is not None:
            spec = validate_system(spec.replace(alpha=alpha))
        if grid_step is not None:
            options = replace(options, grid_step=grid_step)
        if tol is not None:
            options = replace(options, equivalence_tol=tol)
        if sweep_target is not None or sweep_range is not None:
            if sweep_target is not None:
                target = SweepTarget.parse(sweep_target)
            elif sweep is not None:
                target = sweep.target
            else:
                raise ConfigError('--sweep-range needs a sweep target')
            if sweep_range is not None:
                values = parse_range(sweep_range)
            elif sweep is not None:
                values = sweep.values
            else:
                raise ConfigError('--sweep-target needs a sweep range')
            sweep = SweepSpec(
                target, values, True if sweep is None else sweep.reoptimize
            )
        if reoptimize is not None and sweep is not None:
            sweep = replace(sweep, reoptimize=reoptimize)
        return replace(self, spec=spec, options=options, sweep=sweep)


def parse_range(text: str) -> tuple[float, ...]:
    """Values of a 'start:stop:step' range, stop included."""
    parts = text.split(':')
    if len(parts) != 3:
        raise ConfigError(f'Sweep range {text!r} is not start:stop:step')
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f'Sweep range {text!r} is not numeric') from None
    return SweepSpec.value_range(start, stop, step)


def _monomial(value: Any, key: str, stress_dim: int) -> Monomial:
    try:
        if isinstance(value, str):
            return Monomial.parse(value, stress_dim)
        table = _Table(value, key)
        stress = table.take('stress', _integers, [0] * stress_dim)
        time = table.take('time', _integer, 0)
        table.finish()
        if len(stress) != stress_dim:
            raise ConfigError(f'{key}.stress: expected {stress_dim} exponents')
        return Monomial(tuple(stress), time)
    except ValueError as exc:
        raise ConfigError(f'{key}: {exc}') from None


def _component(table: _Table, stress_dim: int) -> ComponentSpec:
    raw_basis = table.take('fixed_basis', lambda v, k: v)
    if not isinstance(raw_basis, list) or not raw_basis:
        raise ConfigError(f'{table.key("fixed_basis")}: expected a nonempty array')
    basis = tuple(
        _monomial(m, f'{table.key("fixed_basis")}[{i + 1}]', stress_dim)
        for i, m in enumerate(raw_basis)
    )
    exps = table.take('random_time_exponents', _integers)
    beta = table.take('beta', _reals)
    threshold = table.take('threshold', _real)
    error_variance = table.take('error_variance', _real, None)
    if 'sigma_gamma' in table:
        if 'sigma' in table or 'rho' in table:
            raise ConfigError(
                f'{table.path}: give either sigma_gamma or sigma and rho, not both'
            )
        sigma_gamma = table.take('sigma_gamma', _matrix)
        table.finish()
        return ComponentSpec(basis, exps, sigma_gamma, beta, threshold, error_variance)
    variances = table.take('sigma', _reals)
    rho = table.take('rho', _real, 0.0)
    table.finish()
    if len(variances) != 2 or exps != [0, 1]:
        raise ConfigError(
            f'{table.key("sigma")}: the sigma/rho shorthand needs two variances '
            'and random_time_exponents = [0, 1]'
        )
    if min(variances) < 0 or abs(rho) > 1:
        raise ConfigError(f'{table.key("sigma")}: variances or rho out of range')
    return ComponentSpec.random_intercept_slope(
        basis, (variances[0], variances[1]), rho, beta, threshold, error_variance
    )


def _options(table: _Table) -> OptimizerOptions:
    defaults = OptimizerOptions()
    options = OptimizerOptions(
        grid_step=table.take('grid_step', _real, defaults.grid_step),
        max_iterations=table.take('max_iterations', _integer, defaults.max_iterations),
        convergence_tol=table.take(
            'convergence_tol', _real, defaults.convergence_tol
        ),
        equivalence_tol=table.take(
            'equivalence_tol', _real, defaults.equivalence_tol
        ),
        prune_threshold=table.take(
            'prune_threshold', _real, defaults.prune_threshold
        ),
        report_threshold=table.take(
            'report_threshold', _real, defaults.report_threshold
        ),
        power=table.take('power', _real, defaults.power),
        verification_refine=table.take(
            'verification_refine', _integer, defaults.verification_refine
        ),
        grid_cap=table.take('grid_cap', _integer, defaults.grid_cap),
    )
    table.finish()
    return options


def _sweep(table: _Table) -> SweepSpec:
    target = SweepTarget.parse(table.take('target', _string))
    reoptimize = table.take('reoptimize', _boolean, True)
    if 'values' in table:
        if any(k in table for k in ('start', 'stop', 'step')):
            raise ConfigError(f'{table.path}: give either values or start/stop/step')
        values = tuple(table.take('values', _reals))
    else:
        values = SweepSpec.value_range(
            table.take('start', _real),
            table.take('stop', _real),
            table.take('step', _real),
        )
    table.finish()
    return SweepSpec(target, values, reoptimize)


def parse_problem(document: dict[str, Any], source: str = '<string>') -> ProblemConfig:
    """Build a ProblemConfig from a decoded TOML document.

    Raise ConfigError for malformed documents and ValidationError if the
    model violates its invariants."""
    root = _Table(document, '')
    model = _Table(root.take('model', lambda v, k: v), 'model')
    stress_dim = model.take('stress_dim', _integer)
    time_plan = model.take('time_plan', _reals)
    error_variance = model.take('error_variance', _real)
    use_condition = model.take('use_condition', _reals)
    region = model.take('region', _matrix, None)
    system_s = model.take('system_s', _integer, 1)
    alpha = model.take('alpha', _real, 0.5)
    t_max = model.take('t_max', _real, 1e6)
    model.finish()

    raw_components = root.take('component', lambda v, k: v)
    if not isinstance(raw_components, list) or not raw_components:
        raise ConfigError('component: expected one or more [[component]] tables')
    components = tuple(
        _component(_Table(c, f'component[{i + 1}]'), stress_dim)
        for i, c in enumerate(raw_components)
    )
    options = _options(_Table(root.take('optimizer', lambda v, k: v, {}), 'optimizer'))
    sweep = None
    if 'sweep' in root:
        sweep = _sweep(_Table(root.take('sweep', lambda v, k: v), 'sweep'))
    root.finish()

    spec = ModelSpec(
        components=components,
        error_variance=error_variance,
        time_plan=np.array(time_plan),
        stress_dim=stress_dim,
        use_condition=np.array(use_condition),
        system_s=system_s,
        alpha=alpha,
        design_region=(
            None if region is None else np.array(region)  # type: ignore[arg-type]
        ),
        t_max=t_max,
    )
    validate_system(spec)
    if sweep is not None:
        sweep.target.check(spec)
    return ProblemConfig(spec, options, sweep, source)


def load_problem(path: StrPath) -> ProblemConfig:
    """Read and parse a TOML problem file."""
    try:
        with open(path, 'rb') as fh:
            document = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"Can't read problem file {path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f'{path}: {exc}') from exc
    return parse_problem(document, str(path))


def format_real(value: float) -> str:
    """Shortest text that reads back as exactly value."""
    text = repr(float(value))
    return text[:-2] if text.endswith('.0') else text


def write_design_csv(design: ApproximateDesign, fh: TextIO) -> None:
    """Write a design as x_1,...,x_d,weight rows."""
    writer = csv.writer(fh, lineterminator='\n')
    writer.writerow([f'x_{j + 1}' for j in range(design.dim)] + ['weight'])
    for x, w in design:
        writer.writerow([format_real(v) for v in x] + [format_real(w)])


def save_design(design: ApproximateDesign, path: StrPath) -> None:
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        write_design_csv(design, fh)


def read_design_csv(
    fh: TextIO, stress_dim: int, source: str = '<design>'
) -> ApproximateDesign:
    """Parse a design file written by write_design_csv().

    Raise ConfigError if the file is malformed and
    DesignNormalizationError if the weights are invalid."""
    rows = list(csv.reader(fh))
    expected = [f'x_{j + 1}' for j in range(stress_dim)] + ['weight']
    if not rows or [c.strip() for c in rows[0]] != expected:
        raise ConfigError(f'{source}: header must be {",".join(expected)}')
    points = []
    weights = []
    for n, row in enumerate(rows[1:], 2):
        if not row:
            continue
        if len(row) != stress_dim + 1:
            raise ConfigError(f'{source}:{n}: expected {stress_dim + 1} fields')
        try:
            values = [float(v) for v in row]
        except ValueError:
            raise ConfigError(f'{source}:{n}: non-numeric field') from None
        if not all(math.isfinite(v) for v in values):
            raise ConfigError(f'{source}:{n}: non-finite field')
        points.append(values[:-1])
        weights.append(values[-1])
    if not points:
        raise ConfigError(f'{source}: no design points')
    return ApproximateDesign(np.array(points), np.array(weights))


def load_design(path: StrPath, stress_dim: int) -> ApproximateDesign:
    try:
        with open(path, encoding='utf-8', newline='') as fh:
            return read_design_csv(fh, stress_dim, str(path))
    except OSError as exc:
        raise ConfigError(f"Can't read design file {path}: {exc.strerror}") from exc
