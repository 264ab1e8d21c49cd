"""Numerical checks for finite-capacity quantum structure."""

from .statecore import (
    TOL_ALG,
    TOL_ITER,
    Basis,
    DensityOperator,
    PureState,
    RandomSource,
    Unitary,
    affinities,
    haar_random_state,
    haar_random_unitary,
    kernel,
    make_state,
    mixed_kernel,
)

__version__ = "0.1.0"

__all__ = [
    "TOL_ALG",
    "TOL_ITER",
    "Basis",
    "DensityOperator",
    "PureState",
    "RandomSource",
    "Unitary",
    "affinities",
    "haar_random_state",
    "haar_random_unitary",
    "kernel",
    "make_state",
    "mixed_kernel",
]
