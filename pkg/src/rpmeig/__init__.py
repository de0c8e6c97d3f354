"""High-precision bound-state energies for power-law radial potentials.

The quantization condition is the vanishing of Hankel determinants built
from an exact rational series expansion of the regularized logarithmic
derivative of the radial wavefunction; sequences of determinant roots
converge exponentially to the eigenvalues.  An independent double-precision
shooting integrator is included for validation.
"""

from .bigmath import BigFloat, BigRational, Polynomial, decimal_str, parse_decimal, rational, workprec
from .core import (
    CoefficientTable,
    DetValue,
    DomainError,
    ExponentSpec,
    ProblemSpec,
    TableTooShortError,
    UnitScale,
    build_coefficients,
    compress_parity,
    hankel_det_exact,
    hankel_det_value,
    hankel_matrix_indices,
    reduce_exponent,
    scale_to_physical,
)

__version__ = "0.1.0"
