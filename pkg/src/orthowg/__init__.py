"""Exact Weingarten calculus for Haar orthogonal matrices.

Expectations, covariances and cumulants of traces of words in a Haar
distributed orthogonal matrix and deterministic matrices, computed exactly as
rational functions of the dimension, plus large-dimension limits and a Monte
Carlo cross-check.
"""

from .combinatorics import Pairing, Permutation, SetPartition, SignedPermutation
from .parser import parse_word, word_to_spec
from .polynomial import RationalFunctionD
from .trace_calculus import (
    MatrixSet,
    Symbol,
    TraceExpression,
    TraceMonomial,
    WordSpec,
    covariance_symbolic,
    cumulant_expression,
    exact_cumulant,
    expected_trace,
    expected_trace_numeric,
    expected_trace_symbolic,
    merge,
)
from .weingarten import weingarten_numeric, weingarten_symbolic, wg_class_function

__version__ = "0.1.0"

__all__ = [
    "MatrixSet",
    "Pairing",
    "Permutation",
    "RationalFunctionD",
    "SetPartition",
    "SignedPermutation",
    "Symbol",
    "TraceExpression",
    "TraceMonomial",
    "WordSpec",
    "covariance_symbolic",
    "cumulant_expression",
    "exact_cumulant",
    "expected_trace",
    "expected_trace_numeric",
    "expected_trace_symbolic",
    "merge",
    "parse_word",
    "weingarten_numeric",
    "weingarten_symbolic",
    "wg_class_function",
    "word_to_spec",
]
