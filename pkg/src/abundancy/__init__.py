"""Numerical checks of divisor-function and totient inequalities.

Exact arithmetic on factored integers, Mertens-type sums over a prime
table, Robin/Lagarias/Nicolas style criteria, record-setting integers,
distributional statistics and four-square counts.
"""
from .arith import FactoredInteger, abundancy, factor_int, factorize, phi, sigma, sigma_s
from .errors import (AbundancyError, DomainError, IncompleteFactorizationError,
                     PreconditionError, RangeError, ResourceError)
from .primes import PrimeTable, build_table
from .reports import CriterionReport

__version__ = "0.1.0"
