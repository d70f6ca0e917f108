"""Correlated and independent Bernoulli bits from binary expansions.

A draw ``x`` from a density on [0, 1] is written as ``0.b1 b2 ... bn`` and the
bits are used as Bernoulli variates. The bit marginals and correlations are
determined by the density; this package computes them exactly and simulates
them.
"""

__version__ = "0.1.0"

from .distributions import (Beta, CustomPdf, DistributionModel, PiecewiseConstant,
                            Trapezoidal, Uniform, cdf, inverse_cdf, is_symmetric,
                            model_from_config, parse_model, pdf)
from .dyadic import (MAX_BITS, BitVector, DyadicIntervalSet, bit_intervals, expand,
                     expand_array, value_of)
from .estimators import BinaryExpansion, BitCorrelation, ExpansionSampler
from .exact import (BitStatistics, bit_marginal, independence_check, joint_probability,
                    statistics)
from .exceptions import DomainError, NumericalError
from .sampler import (STREAM_NAME, BitCounts, SampleRun, bits_from_uniforms, draw_bits,
                      empirical_statistics, uniforms, write_bits)
from .sweep import SweepConfig, SweepResult, run_example1, run_sweep

__all__ = [
    "Beta", "BinaryExpansion", "BitCorrelation", "BitCounts", "BitStatistics",
    "BitVector", "CustomPdf", "DistributionModel", "DomainError", "DyadicIntervalSet",
    "ExpansionSampler", "MAX_BITS", "NumericalError", "PiecewiseConstant",
    "STREAM_NAME", "SampleRun", "SweepConfig", "SweepResult", "Trapezoidal", "Uniform",
    "bit_intervals", "bit_marginal", "bits_from_uniforms", "cdf", "draw_bits",
    "empirical_statistics", "expand", "expand_array", "independence_check",
    "inverse_cdf", "is_symmetric", "joint_probability", "model_from_config",
    "parse_model", "pdf", "run_example1", "run_sweep", "statistics", "uniforms",
    "value_of", "write_bits",
]
