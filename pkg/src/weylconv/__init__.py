"""Stepanov and Weyl seminorms, convolution products with singular kernels and
degenerate fractional relaxation solvers."""

from __future__ import annotations

from ._backend import BACKEND
from .convolution import (
    ConvolutionJob,
    decompose,
    finite_conv,
    infinite_conv,
    verify_decomposition,
    verify_translation_transfer,
)
from .errors import (
    AccuracyError,
    AdmissibilityError,
    ConsistencyError,
    DivergenceError,
    DomainError,
    GridMismatchError,
    IntegrabilityError,
    SpanError,
    WeylconvError,
)
from .fracops import (
    PencilModel,
    RLKernel,
    SubordinatedKernel,
    caputo_derivative,
    check_condition_P,
    weyl_liouville_derivative,
)
from .funcspace import (
    Exponent,
    GridFunction,
    SeminormParams,
    TranslationSearch,
    classify_vanishing,
    find_translation_numbers,
    make_example,
    stepanov_metric,
    stepanov_norm,
    weyl_seminorm,
)
from .kernels import AlgLaw, ExpLaw, ScalarFamily, check_admissible, parse_kernel
from .solvers import IVProblem, LineProblem, heat1d_demo, solve_ivp, solve_line
from .special import mittag_leffler, wright_eval

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_") and name != "annotations"]
