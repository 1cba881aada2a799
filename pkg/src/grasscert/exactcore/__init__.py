"""Exact rational linear algebra, polynomial roots and certified enclosures."""

from .interval import (DyadicInterval, Ordering, compare_norm, norm_enclosure,
                       sqrt_ceil, sqrt_floor)
from .matrix import (RatMatrix, as_rational, as_vector, dot, mat_arith, mat_inverse,
                     norm_sq, rank, vadd, vscale, vsub)
from .poly import (RatPolynomial, RootIsolator, char_poly, has_eigenvalue_above,
                   isolate_real_roots, rational_root_multiplicity, sigma_max,
                   sigma_min_nonzero, strip_root)

__all__ = [
    "DyadicInterval", "Ordering", "RatMatrix", "RatPolynomial", "RootIsolator",
    "as_rational", "as_vector", "char_poly", "compare_norm", "dot",
    "has_eigenvalue_above", "isolate_real_roots", "mat_arith", "mat_inverse",
    "norm_enclosure", "norm_sq", "rank", "rational_root_multiplicity", "sigma_max",
    "sigma_min_nonzero", "sqrt_ceil", "sqrt_floor", "strip_root", "vadd", "vscale", "vsub",
]
