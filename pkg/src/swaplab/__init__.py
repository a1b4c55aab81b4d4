"""Constructive swapping lemmas for regular and context-free languages."""

from swaplab.core import Alphabet, Interval, SampleSet, middle, prefix, sample_partition, splice, suffix, word
from swaplab.swap_cfl import find_cfl_swap, find_ideal_subinterval, stack_transition
from swaplab.swap_regular import find_swap, find_swap_multi

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "Interval",
    "SampleSet",
    "find_cfl_swap",
    "find_ideal_subinterval",
    "find_swap",
    "find_swap_multi",
    "middle",
    "prefix",
    "sample_partition",
    "splice",
    "stack_transition",
    "suffix",
    "word",
]
