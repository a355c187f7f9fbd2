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

"""A library for planning accelerated degradation tests.

This package computes locally c-optimal approximate designs for tests
whose components follow linear mixed-effects degradation paths, when the
quantity of interest is a quantile of the failure time of an
s-out-of-r system under normal use.
"""

from __future__ import annotations

# Re-exports for the benefit of library users
from adtdesign._version import (  # noqa: F401  module-imported-but-unused
    __version__ as __version__,
)
from adtdesign.criterion import ApproximateDesign as ApproximateDesign
from adtdesign.criterion import CriterionContext as CriterionContext
from adtdesign.criterion import avar as avar
from adtdesign.criterion import c_constants as c_constants
from adtdesign.criterion import efficiency as efficiency
from adtdesign.criterion import factorized_objective as factorized_objective
from adtdesign.criterion import info_matrix_component as info_matrix_component
from adtdesign.criterion import (
    marginal_extrapolation_efficiency as marginal_extrapolation_efficiency,
)
from adtdesign.criterion import objective as objective
from adtdesign.criterion import scaled_avar as scaled_avar
from adtdesign.failure import FailureSystem as FailureSystem
from adtdesign.failure import TimePolynomial as TimePolynomial
from adtdesign.failure import component_dominance as component_dominance
from adtdesign.failure import density_at_quantile as density_at_quantile
from adtdesign.failure import failure_curve as failure_curve
from adtdesign.failure import joint_cdf as joint_cdf
from adtdesign.failure import marginal_cdf as marginal_cdf
from adtdesign.failure import mean_path as mean_path
from adtdesign.failure import path_variance as path_variance
from adtdesign.failure import quantile as quantile
from adtdesign.lowlevel import ConfigError as ConfigError
from adtdesign.lowlevel import DesignError as DesignError
from adtdesign.lowlevel import DesignNormalizationError as DesignNormalizationError
from adtdesign.lowlevel import DimensionError as DimensionError
from adtdesign.lowlevel import EmptySupportError as EmptySupportError
from adtdesign.lowlevel import GridTooLargeError as GridTooLargeError
from adtdesign.lowlevel import InfeasibleDesignError as InfeasibleDesignError
from adtdesign.lowlevel import NotExtrapolationWarning as NotExtrapolationWarning
from adtdesign.lowlevel import NumericalError as NumericalError
from adtdesign.lowlevel import PreconditionNotMetError as PreconditionNotMetError
from adtdesign.lowlevel import (
    QuantileUnattainableError as QuantileUnattainableError,
)
from adtdesign.lowlevel import (
    SingularInformationError as SingularInformationError,
)
from adtdesign.lowlevel import ValidationError as ValidationError
from adtdesign.lowlevel import Violation as Violation
from adtdesign.model import ComponentSpec as ComponentSpec
from adtdesign.model import DesignMatrices as DesignMatrices
from adtdesign.model import ModelSpec as ModelSpec
from adtdesign.model import Monomial as Monomial
from adtdesign.model import eval_basis as eval_basis
from adtdesign.model import fixed_design_matrix as fixed_design_matrix
from adtdesign.model import random_design_matrix as random_design_matrix
from adtdesign.model import unit_covariance as unit_covariance
from adtdesign.model import validate_system as validate_system
from adtdesign.optimizer import EquivalenceReport as EquivalenceReport
from adtdesign.optimizer import OptimizerOptions as OptimizerOptions
from adtdesign.optimizer import consolidate as consolidate
from adtdesign.optimizer import equivalence_report as equivalence_report
from adtdesign.optimizer import make_grid as make_grid
from adtdesign.optimizer import multiplicative as multiplicative
from adtdesign.optimizer import optimize as optimize
from adtdesign.optimizer import (
    product_extrapolation_design as product_extrapolation_design,
)
from adtdesign.optimizer import round_design as round_design
from adtdesign.sensitivity import SweepRow as SweepRow
from adtdesign.sensitivity import SweepSpec as SweepSpec
from adtdesign.sensitivity import SweepTarget as SweepTarget
from adtdesign.sensitivity import balanced_vertex_design as balanced_vertex_design
from adtdesign.sensitivity import sweep as sweep
