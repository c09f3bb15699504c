"""Berezin-Toeplitz quantization lab on CP1.

Thin layer over the native core: matrices come back as numpy arrays, and
experiment reports as plain dicts.
"""

import json

from ._core import (
    ArgumentError,
    Error,
    Level,
    PreconditionError,
    RangeError,
    ResolutionError,
    ValidationError,
    evolution,
    exact_weight_trace,
    gaussian_closed_form,
    level,
    model_phase_hessian,
    omega0,
    poincare_data,
    polar_decompose,
    predict_trace_fixed,
    predict_trace_rescaled,
    szego_kernel,
    toeplitz,
)
from . import _core

__all__ = [
    "ArgumentError", "Error", "Level", "PreconditionError", "RangeError", "ResolutionError",
    "ValidationError", "evolution", "exact_weight_trace", "gaussian_closed_form", "level",
    "model_phase_hessian", "omega0", "poincare_data", "polar_decompose", "predict_trace_fixed",
    "predict_trace_rescaled", "run", "selftest", "szego_kernel", "toeplitz",
]


def run(kind, config):
    """Run an experiment ("kernel-scaling", "trace-fixed", "trace-rescaled").

    config is a dict in the same schema as the CLI's JSON config files.
    """
    return json.loads(_core._run(kind, json.dumps(config)))


def selftest(seed=1):
    return json.loads(_core._selftest(int(seed)))
