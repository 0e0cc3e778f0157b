"""Numerical harmonic analysis on N, AN, SL(n,R) and GL(n,R) for n = 2, 3.

Modules
-------
grids       tensor grids, quadrature, per-axis DFT, test functions
iwasawa     matrix-level group structure: KAN factors, GL- laws, scale split
unipotent   upper-triangular unipotent group: law, convolution, Fourier
solvable    the semidirect product AN: extension, convolutions, Fourier
rotations   Peter-Weyl analysis on SO(2) and SO(3)
slgroup     combined transform and Plancherel on SL(n,R)
glgroup     scale (Mellin) factor and the two-component GL(n,R) picture
checks      identity and axiom verification reports
cli         command-line entry point
"""

from .grids import (GridAxis, SampledFunction, TestFunctionSpec, build_grid,
                    dft_axis, integrate, make_test_function, norm_squared)

__all__ = [
    "GridAxis", "SampledFunction", "TestFunctionSpec", "build_grid",
    "dft_axis", "integrate", "make_test_function", "norm_squared",
]

__version__ = "0.1.0"
