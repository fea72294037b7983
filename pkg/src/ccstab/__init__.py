"""Numerical companion for weighted relative-entropy stability of scalar laws with concave-convex flux."""

from .models import Models, build_models, cubic_flux, exp_entropy, quadratic_entropy

__all__ = ["Models", "build_models", "cubic_flux", "exp_entropy", "quadratic_entropy"]
__version__ = "0.1.0"
