"""tubelet: Jordan-algebra tube domains, kernels, and modular theory at desk scale."""

from .jordan import (
    AlgebraDescriptor,
    CJordanElem,
    JordanElem,
    in_positive_cone,
    jordan_det,
    jordan_inverse,
    jordan_product,
    quad_rep,
    spectral_decomp,
)

__all__ = [
    "AlgebraDescriptor",
    "JordanElem",
    "CJordanElem",
    "jordan_product",
    "quad_rep",
    "jordan_det",
    "jordan_inverse",
    "spectral_decomp",
    "in_positive_cone",
]

__version__ = "0.1.0"
