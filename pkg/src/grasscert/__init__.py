"""Certified exact-rational geometry on the Grassmannian and affine Grassmannian."""

from .errors import GrassError
from .grassmann import (GrassPoint, MetricSample, is_grassmann, m_dist,
                        rational_grassmann_sample, rho, span_to_projection)

__version__ = "0.1.0"

__all__ = [
    "GrassError", "GrassPoint", "MetricSample", "is_grassmann", "m_dist",
    "rational_grassmann_sample", "rho", "span_to_projection",
]
