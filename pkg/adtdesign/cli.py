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

"""Command-line front end.

Exit status: 0 on success, 1 for invalid problems, configuration or
design files and infeasible designs, 2 when a design is not certified
optimal, 3 when the requested quantile does not exist.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from typing import Callable, Sequence, TextIO
import warnings

import numpy as np

from adtdesign._version import __version__
from adtdesign.config import (
    ProblemConfig,
    format_real,
    load_design,
    load_problem,
    save_design,
)
from adtdesign.criterion import (
    ApproximateDesign,
    CriterionContext,
    scaled_avar,
)
from adtdesign.failure import FailureSystem, failure_curve, marginal_cdfs, quantile
from adtdesign.lowlevel import (
    ConfigError,
    DesignError,
    NotExtrapolationWarning,
    QuantileUnattainableError,
)
from adtdesign.optimizer import (
    EquivalenceReport,
    OptimizerOptions,
    consolidate,
    equivalence_report,
    make_grid,
    optimize,
    product_extrapolation_design,
    round_design,
)
from adtdesign.sensitivity import SweepRow, support_union, sweep

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CERTIFIED = 2
EXIT_UNATTAINABLE = 3

_NOTE = (
    'Note: criterion and efficiencies cover the fixed effects only; '
    'efficiencies are lower bounds for the quantile.'
)


def _print(*args: object) -> None:
    print(*args, file=sys.stdout)


def _err(message: str) -> None:
    print(f'adt-design: {message}', file=sys.stderr)


def _point(x: Sequence[float]) -> str:
    return '(' + ', '.join(format(v, '.4g') for v in x) + ')'


def _load(args: argparse.Namespace) -> ProblemConfig:
    config = load_problem(args.config)
    return config.with_overrides(
        alpha=getattr(args, 'alpha', None),
        grid_step=getattr(args, 'grid_step', None),
        tol=getattr(args, 'tol', None),
        sweep_target=getattr(args, 'sweep_target', None),
        sweep_range=getattr(args, 'sweep_range', None),
        reoptimize=getattr(args, 'reoptimize', None),
    )


def _context(config: ProblemConfig) -> CriterionContext:
    ctx = CriterionContext.build(config.spec)
    _print(f'Problem: {config.source}')
    _print(f't_alpha (alpha = {config.spec.alpha:g}): {ctx.t_alpha:.6f}')
    _print(
        'Marginal CDFs at t_alpha: '
        + ' '.join(f'{v:.4f}' for v in marginal_cdfs(ctx.system, ctx.t_alpha))
    )
    if ctx.degenerate:
        _err('warning: quantile is degenerate at t = 0')
    return ctx


def _print_design(design: ApproximateDesign, units: int | None) -> None:
    header = [f'x_{j + 1}' for j in range(design.dim)] + ['weight']
    counts = None
    if units is not None:
        header.append('units')
        counts = round_design(design, units)
    _print('  '.join(f'{h:>8}' for h in header))
    for i, (x, w) in enumerate(design):
        cells = [f'{v:8.3f}' for v in x] + [f'{w:8.3f}']
        if counts is not None:
            cells.append(f'{counts[i]:8d}')
        _print('  '.join(cells))


def _print_report(report: EquivalenceReport) -> None:
    _print(f'Criterion: {report.objective_value:.10g}')
    _print(
        f'Max sensitivity: {report.max_sensitivity:.10g} '
        f'at {_point(report.argmax_point)}'
    )
    _print(f'Equivalence gap: {report.gap:.3e}')
    _print(f'Certified: {"yes" if report.certified else "no"}')


def _verification(ctx: CriterionContext, options: OptimizerOptions) -> np.ndarray:
    return make_grid(
        ctx.spec.design_region, options.verification_step, options.grid_cap
    )


def cmd_solve(args: argparse.Namespace) -> int:
    config = _load(args)
    ctx = _context(config)
    solution = optimize(ctx, config.options)
    result = solution.result
    _print('Design:')
    _print_design(
        consolidate(
            solution.design,
            config.options.report_threshold,
            config.options.grid_step,
            ctx.spec.design_region,
        ),
        args.units,
    )
    _print(f'Iterations: {result.iterations}')
    _print(f'Converged: {"yes" if result.converged else "no"}')
    _print_report(solution.report)
    _print(f'Scaled aVar: {scaled_avar(ctx, solution.design):.10g}')
    _print(_NOTE)
    if args.out is not None:
        save_design(solution.design, args.out)
    return EXIT_OK if solution.certified else EXIT_NOT_CERTIFIED


def cmd_quantile(args: argparse.Namespace) -> int:
    config = _load(args)
    system = FailureSystem.from_spec(config.spec)
    q = quantile(system, config.spec.alpha)
    _print(f'alpha: {q.alpha:g}')
    _print(f't_alpha: {q.t_alpha:.10g}')
    _print(f'F_T(t_alpha): {q.joint_value:.12g}')
    for l, v in enumerate(q.marginal_cdfs):
        _print(f'F_T{l + 1}(t_alpha): {v:.10g}')
    _print(f'Degenerate: {"yes" if q.degenerate else "no"}')
    if q.degenerate:
        _err('warning: quantile is degenerate at t = 0')
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    config = _load(args)
    design = load_design(args.design, config.spec.stress_dim)
    ctx = _context(config)
    report = equivalence_report(
        ctx, design, _verification(ctx, config.options), config.options.equivalence_tol
    )
    _print('Design:')
    _print_design(design, None)
    _print_report(report)
    return EXIT_OK if report.certified else EXIT_NOT_CERTIFIED


def cmd_product_design(args: argparse.Namespace) -> int:
    config = _load(args)
    ctx = _context(config)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always', NotExtrapolationWarning)
        product = product_extrapolation_design(
            config.spec.use_condition, config.spec.design_region
        )
    for w in caught:
        _err(f'warning: {w.message}')
    _print(
        'Marginal upper weights: '
        + ' '.join(f'{v:.4f}' for v in product.marginal_weights)
    )
    _print('Design:')
    _print_design(product.design, args.units)
    report = equivalence_report(
        ctx,
        product.design,
        _verification(ctx, config.options),
        config.options.equivalence_tol,
    )
    _print_report(report)
    _print(_NOTE)
    if args.out is not None:
        save_design(product.design, args.out)
    return EXIT_OK if report.certified else EXIT_NOT_CERTIFIED


def _write_sweep(rows: Sequence[SweepRow], r: int, fh: TextIO) -> None:
    points = support_union(rows)
    writer = csv.writer(fh, lineterminator='\n')
    writer.writerow(
        ['value', 't_alpha']
        + ['w(' + ';'.join(format(v, 'g') for v in x) + ')' for x in points]
        + ['eff_star', 'eff_bar']
        + [f'F_T{l + 1}' for l in range(r)]
        + ['dominant', 'status']
    )

    def cell(v: float | None) -> str:
        return '' if v is None or v != v else format_real(v)

    for row in rows:
        weights = dict(row.optimal_weights)
        marg = list(row.marginal_cdfs_at_quantile) or [None] * r
        writer.writerow(
            [cell(row.value), cell(row.t_alpha)]
            + [cell(weights.get(x, 0.0)) if weights else '' for x in points]
            + [cell(row.efficiency_star), cell(row.efficiency_bar)]
            + [cell(v) for v in marg]
            + ['' if row.dominant is None else str(row.dominant + 1), row.status]
        )


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _load(args)
    if config.sweep is None:
        raise ConfigError('No [sweep] table and no --sweep-target/--sweep-range')
    result = sweep(config.spec, config.sweep, config.options, workers=args.jobs)
    if args.out is None:
        _write_sweep(result.rows, config.spec.r, sys.stdout)
    else:
        with open(args.out, 'w', encoding='utf-8', newline='') as fh:
            _write_sweep(result.rows, config.spec.r, fh)
    return EXIT_OK


def cmd_curve(args: argparse.Namespace) -> int:
    config = _load(args)
    system = FailureSystem.from_spec(config.spec)
    if not args.t_max > 0 or args.points < 2:
        raise ConfigError('--t-max must be positive and --points at least 2')
    rows = failure_curve(system, np.linspace(0.0, args.t_max, args.points))
    if args.out is None:
        out = sys.stdout
    else:
        out = open(args.out, 'w', encoding='utf-8', newline='')
    try:
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(['t', 'F_T'] + [f'F_T{l + 1}' for l in range(system.r)])
        for row in rows:
            writer.writerow([format_real(float(v)) for v in row])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '-c', '--config', required=True, metavar='FILE', help='problem file (TOML)'
    )
    common.add_argument(
        '-v',
        '--verbose',
        action='count',
        default=0,
        help='log progress to stderr (repeat for more detail)',
    )
    common.add_argument('--alpha', type=float, help='override the quantile level')

    optimizer = argparse.ArgumentParser(add_help=False)
    optimizer.add_argument('--grid-step', type=float, help='candidate grid spacing')
    optimizer.add_argument('--tol', type=float, help='equivalence gap tolerance')

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument('-o', '--out', metavar='FILE', help='write CSV to FILE')

    units = argparse.ArgumentParser(add_help=False)
    units.add_argument(
        '--units', type=int, metavar='N', help='also allocate N test units'
    )

    parser = argparse.ArgumentParser(
        prog='adt-design',
        description='Locally c-optimal designs for accelerated degradation tests.',
    )
    parser.add_argument('--version', action='version', version=__version__)
    sub = parser.add_subparsers(dest='command', required=True)

    def add(
        name: str,
        func: Callable[[argparse.Namespace], int],
        help: str,
        parents: list[argparse.ArgumentParser],
    ) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help, parents=[common] + parents)
        p.set_defaults(func=func)
        return p

    add(
        'solve',
        cmd_solve,
        'compute and certify the optimal design',
        [optimizer, out, units],
    )
    add('quantile', cmd_quantile, 'solve for the failure-time quantile', [])
    check = add('check', cmd_check, 'certify a design from a CSV file', [optimizer])
    check.add_argument('-d', '--design', required=True, metavar='FILE')
    add(
        'product-design',
        cmd_product_design,
        'closed-form product design for extrapolation',
        [optimizer, out, units],
    )
    sw = add(
        'sweep', cmd_sweep, 'efficiency sweep over one nominal value', [optimizer, out]
    )
    sw.add_argument('--sweep-target', metavar='TARGET', help="e.g. 'beta[1][1]'")
    sw.add_argument('--sweep-range', metavar='START:STOP:STEP')
    sw.add_argument(
        '--reoptimize',
        action=argparse.BooleanOptionalAction,
        default=None,
        help='re-optimize the design at every value',
    )
    sw.add_argument('-j', '--jobs', type=int, default=1, help='worker processes')
    curve = add('curve', cmd_curve, 'failure-time distribution curves', [out])
    curve.add_argument('--t-max', type=float, default=10.0)
    curve.add_argument('--points', type=int, default=201)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(
        level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s'
    )
    try:
        return int(args.func(args))
    except QuantileUnattainableError as exc:
        _err(str(exc))
        return EXIT_UNATTAINABLE
    except DesignError as exc:
        _err(str(exc))
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
