"""Numerical core: matrices, tolerances, eigenvalues, ranks and similarity."""

from .linalg import (
    commutant_basis,
    find_similarity,
    kernel_basis,
    numerical_rank,
    orthonormalize,
    singular_values,
    smallest_right_vectors,
    spectra_match,
)
from .qr import raw_eigenvalues
from .spectrum import eigenvalues
from .types import (
    DEFAULT_TOL,
    EigenCluster,
    GeneratorMatrix,
    Spectrum,
    ToleranceProfile,
    as_generator,
)

__all__ = [
    "DEFAULT_TOL",
    "EigenCluster",
    "GeneratorMatrix",
    "Spectrum",
    "ToleranceProfile",
    "as_generator",
    "commutant_basis",
    "eigenvalues",
    "find_similarity",
    "kernel_basis",
    "numerical_rank",
    "orthonormalize",
    "raw_eigenvalues",
    "singular_values",
    "smallest_right_vectors",
    "spectra_match",
]
