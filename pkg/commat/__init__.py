"""Counting commuting matrix pairs over finite fields, with their asymptotics."""

from .arith import PrimePower, f_q, gl_order, partitions  # noqa: F401
from .exact_counts import (  # noqa: F401
    commuting_pairs,
    commuting_series_coeff,
    nilpotent_commuting_pairs,
    nilpotent_count,
)
from .hookspecs import hookimpl  # noqa: F401

__version__ = "0.1.0"
