"""Certified-precision evaluation of the real Lambert W branches ``W0`` and ``W-1``.

The main entry point is :func:`eval_certified`, which returns an
:class:`Enclosure` ``[lo, hi]`` proven to contain ``W_k(x)`` with width at most
``10**-digits``.  Supporting modules provide elementary bounds
(:mod:`lambertcert.bounds`), the underlying quadratically convergent
recursions (:mod:`lambertcert.recursions`), the ``x**y = y**x`` application
(:mod:`lambertcert.xyyx`) and a command-line tool (:mod:`lambertcert.cli`).
"""

__version__ = "0.1.0"

from .bounds import (
    BoundsPair,
    Constants,
    classic_bounds_w0,
    compute_constants,
    refined_bounds_w0,
    simple_bounds,
    taylor_w0,
)
from .certify import Enclosure, eval_certified, required_iterations, verify_enclosure
from .domain import Argument, Branch, Region, classify, exact_value, locate
from .errors import CertificationError, DomainError, LambertError, NumericalError, PrecisionError
from .reals import E, NEG_INV_E, ZERO, ExactReal, lambert_point, real
from .recursions import (
    IterationTrace,
    TraceEntry,
    beta_error_bound,
    beta_iterate,
    beta_start,
    beta_step,
    lambda_error_bound,
    lambda_iterate,
    lambda_ratio,
    reference_iterate,
    reference_step,
)
from .xyyx import XyResult, asymptote_gap, conjecture_margin, solve, y_of_x

__all__ = [
    "Argument",
    "BoundsPair",
    "Branch",
    "CertificationError",
    "Constants",
    "DomainError",
    "E",
    "Enclosure",
    "ExactReal",
    "IterationTrace",
    "LambertError",
    "NEG_INV_E",
    "NumericalError",
    "PrecisionError",
    "Region",
    "TraceEntry",
    "XyResult",
    "ZERO",
    "asymptote_gap",
    "beta_error_bound",
    "beta_iterate",
    "beta_start",
    "beta_step",
    "classic_bounds_w0",
    "classify",
    "compute_constants",
    "conjecture_margin",
    "eval_certified",
    "exact_value",
    "lambda_error_bound",
    "lambda_iterate",
    "lambda_ratio",
    "lambert_point",
    "locate",
    "real",
    "reference_iterate",
    "reference_step",
    "refined_bounds_w0",
    "required_iterations",
    "simple_bounds",
    "solve",
    "taylor_w0",
    "verify_enclosure",
    "y_of_x",
]
