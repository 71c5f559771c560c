"""Half-space Helmholtz Green's function with an impedance boundary condition.

The package evaluates the kernel through its eikonal factorization, builds
tensor Chebyshev interpolants on admissible block pairs and audits the
analytic bounds that certify their convergence.
"""

from ._accel import NUMBA_ENABLED, backend_name, set_threads
from .errors import (BudgetError, ConfigError, ConvergenceError, DomainError, ImpGreenError,
                     RegimeError)
from .geometry import BlockPair, Cuboid, ExtendedPoint, ExtensionSpec
from .kernel import GreenComponents, QuadratureSpec, green_components, psi_eval
from .transform import KernelParams

__version__ = "0.1.0"

__all__ = [
    "NUMBA_ENABLED", "backend_name", "set_threads",
    "ImpGreenError", "DomainError", "RegimeError", "ConvergenceError", "BudgetError", "ConfigError",
    "Cuboid", "BlockPair", "ExtendedPoint", "ExtensionSpec",
    "KernelParams", "QuadratureSpec", "GreenComponents", "green_components", "psi_eval",
    "__version__",
]
