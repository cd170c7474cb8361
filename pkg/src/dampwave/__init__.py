"""Fourier-multiplier toolkit for the wave equation with scale-invariant damping,

    u_tt - Laplace u + mu/(1+t) u_t = 0.
"""

__version__ = "0.1.0"

from .multiplier import Mat2, ModelParams, MultiplierIndex  # noqa: E402

__all__ = ["Mat2", "ModelParams", "MultiplierIndex", "__version__"]
